//! SU(2) Gauss-law generators, gauge-invariant states and the penalty term.

use super::basis::{annihilation, embed, p_osc, q_osc, BasisKind, BasisTag};
use super::hamiltonian::{build_fermions, FermionConvention, CYCLIC};
use crate::circuit::Statevector;
use crate::error::{Error, Result};
use crate::operator::{eigh, kron, Operator, C64, I};

/// Default penalty strength λ.
pub const DEFAULT_PENALTY: f64 = 10.0;

/// Vectors with norm below this are treated as annihilated by the truncation.
const NULL_NORM: f64 = 1e-12;

/// `G_a = ε_abc x_b p_c` on the three-direction bosonic space.
pub fn gauss_bosonic(basis: BasisKind) -> Result<[Operator; 3]> {
    if basis.tag == BasisTag::FiniteDifference {
        return Err(Error::Domain(
            "the finite-difference basis has no first-order momentum; use the oscillator basis".into(),
        ));
    }
    let n = basis.levels;
    let dims = [n; 3];
    let x: Vec<Operator> = (0..3).map(|i| embed(&q_osc(n), i, &dims)).collect();
    let p: Vec<Operator> = (0..3).map(|i| embed(&p_osc(n), i, &dims)).collect();
    Ok(CYCLIC.map(|(b, c, _)| &(&x[b] * &p[c]) - &(&x[c] * &p[b])))
}

/// Supersymmetric generators `G_a ⊗ I − i(ψ†_b ψ_c − ψ†_c ψ_b)` on the
/// boson ⊗ fermion space.
///
/// Exact invariance of the interacting Hamiltonian needs anticommuting
/// fermions, so pass [`FermionConvention::JordanWigner`] for that.
pub fn gauss_susy(levels: usize, convention: FermionConvention) -> Result<[Operator; 3]> {
    let bos = gauss_bosonic(BasisKind::oscillator(levels))?;
    let c = build_fermions(convention);
    let nb = levels.pow(3);
    let id_f = Operator::identity(8);
    let id_b = Operator::identity(nb);
    let mut out = Vec::with_capacity(3);
    for (a, &(b, cc, _)) in CYCLIC.iter().enumerate() {
        let hop = &(&c[b].adjoint() * &c[cc]) - &(&c[cc].adjoint() * &c[b]);
        let ferm = hop.scale(-I);
        out.push(&kron(&bos[a], &id_f) + &kron(&id_b, &ferm));
    }
    Ok(out.try_into().expect("three generators"))
}

/// `Σ_a G_a²`.
pub fn casimir(gauss: &[Operator; 3]) -> Operator {
    gauss.iter().fold(Operator::zeros(gauss[0].dim()), |acc, g| acc + g * g)
}

/// Orthonormalizes in order, dropping vectors that become numerically zero.
pub fn gram_schmidt(vectors: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for u in &out {
            let ov: C64 = u.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= ov * ui;
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > NULL_NORM {
            out.push(w.into_iter().map(|z| z / norm).collect());
        }
    }
    out
}

/// Raw states `(Σ_i a_i† a_i†)ⁿ |0,0,0⟩`, n = 0..=3, with truncated creation
/// operators. Not normalized.
pub fn raw_physical_states(levels: usize) -> Vec<Vec<C64>> {
    let a = annihilation(levels);
    let ad = a.adjoint();
    let pair = &ad * &ad;
    let dims = [levels; 3];
    let raise = (0..3).fold(Operator::zeros(levels.pow(3)), |acc, i| acc + embed(&pair, i, &dims));
    let mut v = vec![C64::new(0.0, 0.0); levels.pow(3)];
    v[0] = C64::new(1.0, 0.0);
    let mut out = vec![v.clone()];
    for _ in 1..=3 {
        v = raise.apply(&v);
        out.push(v.clone());
    }
    out
}

/// Orthonormalized physical states on the bosonic space. States annihilated
/// by the truncation are dropped, so fewer than four may be returned for
/// small `levels`.
pub fn physical_states(levels: usize) -> Result<Vec<Statevector>> {
    gram_schmidt(&raw_physical_states(levels)).into_iter().map(Statevector::from_amplitudes).collect()
}

/// Orthonormal basis of the kernel of `Σ G_a²`, i.e. the states the
/// truncated generators annihilate exactly.
pub fn gauge_invariant_basis(gauss: &[Operator; 3], tol: f64) -> Result<Vec<Vec<C64>>> {
    let spec = eigh(&casimir(gauss))?;
    Ok((0..spec.len()).take_while(|&k| spec.values[k] < tol).map(|k| spec.vector(k)).collect())
}

/// `h + λ Σ G_a²`.
pub fn penalty_hamiltonian(h: &Operator, lambda: f64, gauss: &[Operator; 3]) -> Result<Operator> {
    if gauss[0].dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: gauss[0].dim() });
    }
    Ok(h + &casimir(gauss).scale_real(lambda))
}

/// Indices whose per-direction occupations are all at most `max_level`.
pub fn bounded_occupation_indices(levels: usize, max_level: usize, inner_dim: usize) -> Vec<usize> {
    let nb = levels.pow(3);
    (0..nb * inner_dim)
        .filter(|&k| {
            let b = k / inner_dim;
            let (n1, n2, n3) = (b / (levels * levels), (b / levels) % levels, b % levels);
            n1.max(n2).max(n3) <= max_level
        })
        .collect()
}
