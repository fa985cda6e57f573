use std::fmt;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Invalid flags or input files.
    Usage(String),
    /// A computed quantity broke its contract.
    Numerical(String),
    Core(ncmatrix::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use ncmatrix::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                E::NotHermitian { .. }
                | E::ComplexCoefficient { .. }
                | E::ImaginaryExpectation { .. }
                | E::NotNilpotent { .. }
                | E::NotNormalized(_)
                | E::Optimizer(_) => EXIT_NUMERICAL,
                E::Io(_) => 1,
                _ => EXIT_USAGE,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => f.write_str(m),
            CliError::Core(e) => e.fmt(f),
            CliError::Io(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ncmatrix::Error> for CliError {
    fn from(e: ncmatrix::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("malformed JSON: {e}"))
    }
}
