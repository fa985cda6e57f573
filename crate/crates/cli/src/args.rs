use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncmatrix::model::{BuildParams, DeformationParams, FermionConvention, ModelId, RhoProfile, DEFAULT_PENALTY};
use ncmatrix::vqe::VqeOptions;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ncmatrix", version, about = "SU(2) matrix-model operators, VQE, time evolution and BRST tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a model operator and write it as JSON.
    Build(BuildArgs),
    /// Decompose an operator into a Pauli sum.
    Decompose(DecomposeArgs),
    /// Minimize the energy of a Pauli sum with the Ry/CZ ansatz.
    Vqe(VqeArgs),
    /// Trotterized time evolution next to the slice-exact oracle.
    Eoh(EohArgs),
    /// BRST charge, Laplacian spectrum and zero modes.
    Brst(BrstArgs),
    /// Gauge-invariant states of the bosonic oscillator model.
    PhysicalStates(PhysicalStatesArgs),
}

fn parse_model(s: &str) -> Result<ModelId, String> {
    s.parse().map_err(|e: ncmatrix::Error| e.to_string())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    #[default]
    Literal,
    JordanWigner,
}

impl From<Convention> for FermionConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Literal => FermionConvention::Literal,
            Convention::JordanWigner => FermionConvention::JordanWigner,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Deformation Λ(t) = −k²/t² and the linear drive ρ(t).
#[derive(Clone, Debug, Args)]
pub struct DeformationArgs {
    /// k²; mutually exclusive with --alpha/--beta.
    #[arg(long, conflicts_with_all = ["alpha", "beta"])]
    pub ksq: Option<f64>,
    #[arg(long, requires = "beta", allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, requires = "alpha", allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Constant ρ, or the amplitude when --rho-exponent is given.
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, requires = "rho", allow_negative_numbers = true)]
    pub rho_exponent: Option<f64>,
}

impl DeformationArgs {
    pub fn params(&self) -> Result<DeformationParams, CliError> {
        let base = match (self.alpha, self.beta) {
            (Some(a), Some(b)) => DeformationParams::new(a, b)?,
            _ => DeformationParams::from_k_squared(self.ksq.unwrap_or(0.25))?,
        };
        let rho = match (self.rho, self.rho_exponent) {
            (None, _) => RhoProfile::Zero,
            (Some(value), None) => RhoProfile::Constant { value },
            (Some(amplitude), Some(exponent)) => RhoProfile::PowerLaw { amplitude, exponent },
        };
        Ok(base.with_rho(rho))
    }
}

#[derive(Clone, Debug, Args)]
pub struct ModelArgs {
    /// Coupling g.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub g: f64,
    /// Levels per bosonic mode (model default when omitted).
    #[arg(long)]
    pub n: Option<usize>,
    /// Drop the fermion factor from osc/fd.
    #[arg(long)]
    pub no_fermions: bool,
    #[arg(long, value_enum, default_value_t = Convention::Literal)]
    pub fermions: Convention,
    /// Sampling time for cosmo.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub t: f64,
    #[command(flatten)]
    pub deformation: DeformationArgs,
    /// Penalty strength λ.
    #[arg(long, default_value_t = DEFAULT_PENALTY)]
    pub lambda: f64,
    /// Gauss generator index for the gauss model.
    #[arg(long, default_value_t = 1)]
    pub component: usize,
}

impl ModelArgs {
    pub fn params(&self) -> Result<BuildParams, CliError> {
        Ok(BuildParams {
            g: self.g,
            levels: self.n,
            include_fermions: !self.no_fermions,
            fermions: self.fermions.into(),
            t: self.t,
            deformation: self.deformation.params()?,
            lambda: self.lambda,
            component: self.component,
        })
    }
}

/// Either a model id with its parameters or an input file.
#[derive(Clone, Debug, Args)]
pub struct SourceArgs {
    /// osc, fd, cosmo, brst-unitary, gauss or penalty.
    #[arg(value_parser = parse_model, required_unless_present = "input", conflicts_with = "input")]
    pub model: Option<ModelId>,
    /// Operator or Pauli-sum JSON written by this tool.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub model_args: ModelArgs,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(value_parser = parse_model)]
    pub model: ModelId,
    #[command(flatten)]
    pub model_args: ModelArgs,
    /// Also report the lowest eigenvalue.
    #[arg(long)]
    pub min_eig: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Drop terms with |coefficient| at or below this.
    #[arg(long, default_value_t = ncmatrix::pauli::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VqeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, default_value_t = ncmatrix::pauli::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Entangling layers of the ansatz.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Total optimizer starts, the first from all-zero angles.
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    /// Energy evaluations allowed per start.
    #[arg(long, default_value_t = 5000)]
    pub max_evals: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Result JSON path (stdout when omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Trace CSV path (eval_index,energy).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

impl VqeArgs {
    pub fn options(&self) -> Result<VqeOptions, CliError> {
        if self.restarts == 0 || self.max_evals == 0 {
            return Err(CliError::Usage("--restarts and --max-evals must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Usage(format!("--tol must be positive, got {}", self.tol)));
        }
        Ok(VqeOptions {
            restarts: self.restarts,
            seed: self.seed,
            max_evals: self.max_evals,
            tol: self.tol,
            ..VqeOptions::default()
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Driving {
    /// ½P² − ½Λ(t)X² − ρ(t)X in the finite-difference basis.
    Cosmo,
    /// Static oscillator ½P² + ½ω²X².
    Sho,
    /// The zero operator.
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Order {
    First,
    Second,
}

#[derive(Debug, Args)]
pub struct EohArgs {
    #[arg(long, value_enum, default_value_t = Driving::Cosmo)]
    pub hamiltonian: Driving,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub t_i: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub t_f: f64,
    #[arg(long, default_value_t = 100)]
    pub slices: usize,
    /// Grid points (state dimension).
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[command(flatten)]
    pub deformation: DeformationArgs,
    /// Frequency for --hamiltonian sho.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// basis:K, uniform, ground (of H(t_i)) or a statevector JSON path.
    #[arg(long, default_value = "basis:0")]
    pub initial: String,
    #[arg(long, value_enum, default_value_t = Order::First)]
    pub order: Order,
    /// Trotter snapshots CSV (t,index,re,im,prob).
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    /// Oracle snapshots CSV, same columns.
    #[arg(long)]
    pub exact_snapshots: Option<PathBuf>,
    /// Exit with status 3 if the final max |trotter − exact| exceeds this.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Final-state JSON path (stdout when omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BrstArgs {
    /// Levels per bosonic mode.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub g: f64,
    #[arg(long, value_enum, default_value_t = Convention::JordanWigner)]
    pub ghosts: Convention,
    /// Include the zero-mode vectors in the report.
    #[arg(long)]
    pub zero_modes: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhysicalStatesArgs {
    /// Levels per bosonic mode.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
