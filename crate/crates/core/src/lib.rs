//! Numerical toolkit for the SU(2) matrix model: truncated Hamiltonians,
//! Pauli-string mapping, a statevector simulator with VQE and
//! time-dependent evolution, and the unitary-gauge BRST Laplacian.

pub mod brst;
pub mod circuit;
pub mod eoh;
pub mod error;
pub mod model;
pub mod operator;
pub mod pauli;
pub mod vqe;

pub use error::{Error, Result};
pub use operator::{eigh, expm, kron, Operator, Spectrum, C64};
pub use pauli::{decompose, pad_to_qubits, reconstruct, PauliString, PauliSum, PauliTerm};
