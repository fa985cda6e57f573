//! `ncmatrix` command-line tool.

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(a) => commands::build(a),
        Command::Decompose(a) => commands::decompose_cmd(a),
        Command::Vqe(a) => commands::vqe(a),
        Command::Eoh(a) => commands::eoh(a),
        Command::Brst(a) => commands::brst(a),
        Command::PhysicalStates(a) => commands::physical_states_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
