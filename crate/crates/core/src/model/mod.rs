//! Hamiltonians, bases, constraints and deformations of the SU(2) matrix
//! model.

mod basis;
mod cosmology;
mod gauss;
mod hamiltonian;
mod registry;

pub use basis::{annihilation, embed, p2_fd, p_osc, q_fd, q_osc, BasisKind, BasisTag};
pub use cosmology::{build_h_cosmo, build_h_sho, lambda_deformation, DeformationParams, RhoProfile};
pub use gauss::{
    bounded_occupation_indices, casimir, gauge_invariant_basis, gauss_bosonic, gauss_susy, gram_schmidt,
    penalty_hamiltonian, physical_states, raw_physical_states, DEFAULT_PENALTY,
};
pub use hamiltonian::{
    build_bosons_osc, build_fermions, build_h_fd, build_h_osc, fermion_lowering, lift, FermionConvention,
    ModelParams,
};
pub use registry::{build_model, BuildParams, ModelId};
