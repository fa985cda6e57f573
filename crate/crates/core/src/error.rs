use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian: max |h[j,k] - conj(h[k,j])| = {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator dimension {dim} is not a power of two; embed it with pad_to_qubits first")]
    NotPowerOfTwo { dim: usize },

    #[error("cannot pad a {dim}-dimensional operator into {n_qubits} qubits")]
    PaddingTooSmall { dim: usize, n_qubits: usize },

    #[error("Pauli coefficient of {string} has imaginary part {imag:e}")]
    ComplexCoefficient { string: String, imag: f64 },

    #[error("invalid Pauli string {0:?}")]
    InvalidPauliString(String),

    #[error("expected {expected} circuit parameters, got {found}")]
    ParameterCount { expected: usize, found: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("two-qubit gate endpoints must differ (both are {0})")]
    RepeatedQubit(usize),

    #[error("expectation value has imaginary residue {residue:e}")]
    ImaginaryExpectation { residue: f64 },

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("outside domain: {0}")]
    Domain(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("BRST charge not nilpotent on the truncation-safe subspace: max |Ω²| = {residual:e}")]
    NotNilpotent { residual: f64 },

    #[error("state is not normalized: norm = {0}")]
    NotNormalized(f64),

    #[error("optimizer failure: {0}")]
    Optimizer(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
