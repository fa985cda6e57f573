//! The SU(2) matrix-model Hamiltonians on `levels³·8` states: three bosonic
//! directions followed by three fermion modes.

use serde::{Deserialize, Serialize};

use super::basis::{annihilation, embed, p2_fd, q_fd};
use crate::operator::{kron, Operator};

const FERMION_MODES: usize = 3;
const FERMION_DIM: usize = 8;

/// How the three fermion modes are represented on their qubits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FermionConvention {
    /// `c_i = I ⊗ … ⊗ [[0,1],[0,0]] ⊗ … ⊗ I`; modes commute with each other.
    #[default]
    Literal,
    /// Jordan–Wigner: `Z` on every earlier mode, so distinct modes anticommute.
    JordanWigner,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub g: f64,
    pub levels: usize,
    pub include_fermions: bool,
    #[serde(default)]
    pub fermions: FermionConvention,
}

impl ModelParams {
    pub fn new(g: f64, levels: usize) -> Self {
        assert!(levels >= 2, "levels must be at least 2");
        Self { g, levels, include_fermions: true, fermions: FermionConvention::Literal }
    }

    pub fn with_fermions(mut self, convention: FermionConvention) -> Self {
        self.fermions = convention;
        self
    }

    pub fn bosonic(mut self) -> Self {
        self.include_fermions = false;
        self
    }

    pub fn dim(&self) -> usize {
        let b = self.levels.pow(3);
        if self.include_fermions {
            b * FERMION_DIM
        } else {
            b
        }
    }
}

/// Single-mode lowering matrix `[[0,1],[0,0]]`.
pub fn fermion_lowering() -> Operator {
    Operator::from_real_fn(2, |j, k| if (j, k) == (0, 1) { 1.0 } else { 0.0 })
}

/// `a_i` on the three-direction bosonic space (dim levels³).
pub fn build_bosons_osc(levels: usize) -> [Operator; 3] {
    let a = annihilation(levels);
    let dims = [levels; 3];
    [embed(&a, 0, &dims), embed(&a, 1, &dims), embed(&a, 2, &dims)]
}

/// `c_i` on the 8-dimensional fermion space.
pub fn build_fermions(convention: FermionConvention) -> [Operator; 3] {
    let f = fermion_lowering();
    let z = Operator::from_diagonal(&[1.0, -1.0]);
    let id = Operator::identity(2);
    let mode = |i: usize| {
        let factors: Vec<&Operator> = (0..FERMION_MODES)
            .map(|j| {
                if j == i {
                    &f
                } else if j < i && convention == FermionConvention::JordanWigner {
                    &z
                } else {
                    &id
                }
            })
            .collect();
        crate::operator::kron_all(&factors)
    };
    [mode(0), mode(1), mode(2)]
}

/// `A_i = a_i ⊗ I_8`, `C_i = I_{levels³} ⊗ c_i`.
pub fn lift(bosons: &[Operator; 3], fermions: &[Operator; 3]) -> ([Operator; 3], [Operator; 3]) {
    let ib = Operator::identity(bosons[0].dim());
    let i_f = Operator::identity(fermions[0].dim());
    let a = [kron(&bosons[0], &i_f), kron(&bosons[1], &i_f), kron(&bosons[2], &i_f)];
    let c = [kron(&ib, &fermions[0]), kron(&ib, &fermions[1]), kron(&ib, &fermions[2])];
    (a, c)
}

/// Index triples (p, q, r) of the cubic terms: fermion pair (p, q) couples to
/// boson direction r.
pub(crate) const CYCLIC: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];

/// `c_p c_q + (c_p c_q)†` on the fermion factor.
fn pair_hermitian(c: &[Operator; 3], p: usize, q: usize) -> Operator {
    let cc = &c[p] * &c[q];
    &cc + &cc.adjoint()
}

fn fermion_number(c: &[Operator; 3]) -> Operator {
    c.iter().fold(Operator::zeros(FERMION_DIM), |acc, ci| acc + &ci.adjoint() * ci)
}

/// Oscillator-basis Hamiltonian
/// `Σ A†A + Σ C†C + (g/√2) Σ_cyc (C_p C_q + h.c.)(A_r + A_r†)`.
///
/// Each cubic term factorizes across the boson/fermion split, so the 512-dim
/// operator is assembled from Kronecker products of the small factors.
pub fn build_h_osc(params: &ModelParams) -> Operator {
    let a = build_bosons_osc(params.levels);
    let nb = params.levels.pow(3);
    let boson_number = a.iter().fold(Operator::zeros(nb), |acc, ai| acc + &ai.adjoint() * ai);
    if !params.include_fermions {
        return boson_number;
    }
    let c = build_fermions(params.fermions);
    let mut h = kron(&boson_number, &Operator::identity(FERMION_DIM));
    h += &kron(&Operator::identity(nb), &fermion_number(&c));
    let coupling = params.g * std::f64::consts::FRAC_1_SQRT_2;
    for (p, q, r) in CYCLIC {
        let x = &a[r] + &a[r].adjoint();
        h += &kron(&x, &pair_hermitian(&c, p, q)).scale_real(coupling);
    }
    h
}

/// Finite-difference Hamiltonian
/// `½(ΣP_i² + ΣX_i²) + ΣC†C − (3/2)I + g Σ_cyc (C_p C_q + h.c.) X_r`.
pub fn build_h_fd(params: &ModelParams) -> Operator {
    let n = params.levels;
    let dims = [n; 3];
    let nb = n.pow(3);
    let q = q_fd(n);
    let single = (&p2_fd(n) + &(&q * &q)).scale_real(0.5);
    let mut bosonic = Operator::identity(nb).scale_real(-1.5);
    for slot in 0..3 {
        bosonic += &embed(&single, slot, &dims);
    }
    if !params.include_fermions {
        return bosonic;
    }
    let x: Vec<Operator> = (0..3).map(|slot| embed(&q, slot, &dims)).collect();
    let c = build_fermions(params.fermions);
    let mut h = kron(&bosonic, &Operator::identity(FERMION_DIM));
    h += &kron(&Operator::identity(nb), &fermion_number(&c));
    for (p, qq, r) in CYCLIC {
        h += &kron(&x[r], &pair_hermitian(&c, p, qq)).scale_real(params.g);
    }
    h
}
