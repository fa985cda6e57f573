//! Unitary-gauge BRST charge, its Laplacian and the numerical kernel.
//!
//! Layout: three oscillator-basis bosons followed by three ghost qubits,
//! `boson₁ ⊗ boson₂ ⊗ boson₃ ⊗ ghost₁ ⊗ ghost₂ ⊗ ghost₃`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circuit::Statevector;
use crate::error::{Error, Result};
use crate::model::{bounded_occupation_indices, build_fermions, embed, p_osc, q_osc, FermionConvention};
use crate::operator::{eigh, kron, Operator, C64, ZERO};
use crate::pauli::{pad_to_qubits, qubits_for_dim};

/// Tolerance for Ω² on the truncation-safe subspace.
pub const NILPOTENCY_TOL: f64 = 1e-10;

/// Eigenvalues of Q_L below this count as zero modes.
pub const KERNEL_TOL: f64 = 1e-10;

const GHOST_DIM: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrstConfig {
    pub boson_levels: usize,
    pub g: f64,
    /// Ghost representation. Only anticommuting ghosts give a nilpotent Ω.
    #[serde(default = "default_ghosts")]
    pub ghosts: FermionConvention,
}

fn default_ghosts() -> FermionConvention {
    FermionConvention::JordanWigner
}

impl BrstConfig {
    pub fn new(boson_levels: usize, g: f64) -> Self {
        assert!(boson_levels >= 2, "boson_levels must be at least 2");
        Self { boson_levels, g, ghosts: default_ghosts() }
    }

    pub fn with_ghosts(mut self, ghosts: FermionConvention) -> Self {
        self.ghosts = ghosts;
        self
    }

    pub fn dim(&self) -> usize {
        self.boson_levels.pow(3) * GHOST_DIM
    }

    pub fn padded_qubits(&self) -> usize {
        qubits_for_dim(self.dim())
    }

    /// Basis indices with every boson occupation at most N−2.
    pub fn safe_indices(&self) -> Vec<usize> {
        bounded_occupation_indices(self.boson_levels, self.boson_levels - 2, GHOST_DIM)
    }
}

/// Ghost lowering operators `c_a` and their adjoints `b_a` on the ghost factor.
pub fn build_ghosts(convention: FermionConvention) -> ([Operator; 3], [Operator; 3]) {
    let c = build_fermions(convention);
    let b = [c[0].adjoint(), c[1].adjoint(), c[2].adjoint()];
    (c, b)
}

/// `Σ_a c_a b_a` on the ghost factor; Ω raises it by one.
pub fn ghost_number(convention: FermionConvention) -> Operator {
    let (c, b) = build_ghosts(convention);
    (0..3).fold(Operator::zeros(GHOST_DIM), |acc, a| acc + &c[a] * &b[a])
}

fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Max |Ω²| over all entries and over the columns of the safe subspace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NilpotencyReport {
    pub global_max: f64,
    pub safe_max: f64,
}

pub fn nilpotency_report(omega: &Operator, cfg: &BrstConfig) -> NilpotencyReport {
    let sq = omega * omega;
    let m = sq.matrix();
    let safe_max = cfg
        .safe_indices()
        .into_iter()
        .flat_map(|c| m.column(c).iter().map(|z| z.norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max);
    NilpotencyReport { global_max: sq.max_abs(), safe_max }
}

#[derive(Clone, Debug)]
pub struct BrstOperators {
    pub config: BrstConfig,
    pub x: [Operator; 3],
    pub p: [Operator; 3],
    pub c: [Operator; 3],
    pub b: [Operator; 3],
    pub omega: Operator,
    pub q_l: Operator,
    pub h_eff: Operator,
    pub nilpotency: NilpotencyReport,
}

/// `Ω = c_a G_a − i(g/2) ε^{abc} c_a c_b b_c` with `G_a = g ε^{abc} X_b P_c`,
/// before any nilpotency check.
pub fn build_brst_charge_unchecked(cfg: &BrstConfig) -> Operator {
    let n = cfg.boson_levels;
    let dims = [n; 3];
    let nb = n.pow(3);
    let xb: Vec<Operator> = (0..3).map(|i| embed(&q_osc(n), i, &dims)).collect();
    let pb: Vec<Operator> = (0..3).map(|i| embed(&p_osc(n), i, &dims)).collect();
    let (c, b) = build_ghosts(cfg.ghosts);
    let mut omega = Operator::zeros(cfg.dim());
    let mut ghost_cubic = Operator::zeros(GHOST_DIM);
    for a in 0..3 {
        let mut ga = Operator::zeros(nb);
        for bb in 0..3 {
            for cc in 0..3 {
                let e = levi_civita(a, bb, cc);
                if e != 0.0 {
                    ga += &(&xb[bb] * &pb[cc]).scale_real(cfg.g * e);
                    ghost_cubic += &(&(&c[a] * &c[bb]) * &b[cc]).scale_real(e);
                }
            }
        }
        omega += &kron(&ga, &c[a]);
    }
    let cubic = ghost_cubic.scale(C64::new(0.0, -cfg.g / 2.0));
    omega + kron(&Operator::identity(nb), &cubic)
}

/// Ω with its square checked on the truncation-safe subspace.
pub fn build_brst_charge(cfg: &BrstConfig) -> Result<Operator> {
    let omega = build_brst_charge_unchecked(cfg);
    let report = nilpotency_report(&omega, cfg);
    if report.safe_max > NILPOTENCY_TOL {
        return Err(Error::NotNilpotent { residual: report.safe_max });
    }
    Ok(omega)
}

/// `Q_L = Ω†Ω`.
pub fn build_brst_laplacian(cfg: &BrstConfig) -> Result<Operator> {
    let omega = build_brst_charge(cfg)?;
    Ok(&omega.adjoint() * &omega)
}

/// `½ Σ P_a²` on the boson ⊗ ghost space.
pub fn build_h_eff(levels: usize) -> Operator {
    let dims = [levels; 3];
    let p2 = {
        let p = p_osc(levels);
        &p * &p
    };
    let bos = (0..3).fold(Operator::zeros(levels.pow(3)), |acc, i| acc + embed(&p2, i, &dims)).scale_real(0.5);
    kron(&bos, &Operator::identity(GHOST_DIM))
}

pub fn build_brst(cfg: &BrstConfig) -> Result<BrstOperators> {
    let n = cfg.boson_levels;
    let dims = [n, n, n, GHOST_DIM];
    let x = [0, 1, 2].map(|i| embed(&q_osc(n), i, &dims));
    let p = [0, 1, 2].map(|i| embed(&p_osc(n), i, &dims));
    let (cg, bg) = build_ghosts(cfg.ghosts);
    let id_b = Operator::identity(n.pow(3));
    let c = [0, 1, 2].map(|a| kron(&id_b, &cg[a]));
    let b = [0, 1, 2].map(|a| kron(&id_b, &bg[a]));
    let omega = build_brst_charge(cfg)?;
    let nilpotency = nilpotency_report(&omega, cfg);
    let q_l = &omega.adjoint() * &omega;
    Ok(BrstOperators { config: *cfg, x, p, c, b, omega, q_l, h_eff: build_h_eff(n), nilpotency })
}

/// Orthonormal kernel vectors of Q_L with their residuals ‖ΩΨ‖.
#[derive(Clone, Debug)]
pub struct ZeroModes {
    pub vectors: Vec<Vec<C64>>,
    pub residuals: Vec<f64>,
}

impl ZeroModes {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// The modes zero-padded onto `n_qubits` qubits.
    pub fn to_statevectors(&self, n_qubits: usize) -> Result<Vec<Statevector>> {
        self.vectors
            .iter()
            .map(|v| {
                if v.len() > 1 << n_qubits {
                    return Err(Error::PaddingTooSmall { dim: v.len(), n_qubits });
                }
                let mut amps = v.clone();
                amps.resize(1 << n_qubits, ZERO);
                Statevector::from_amplitudes(amps)
            })
            .collect()
    }
}

/// Kernel of Q_L (eigenvalues below [`KERNEL_TOL`]), rotated by an SVD of Ω
/// restricted to that kernel so each returned vector's residual is a
/// singular value of Ω rather than the square root of a tiny eigenvalue.
pub fn physical_zero_modes(omega: &Operator) -> Result<ZeroModes> {
    let q_l = &omega.adjoint() * omega;
    let spec = eigh(&q_l)?;
    let k = spec.values.iter().take_while(|&&v| v < KERNEL_TOL).count();
    if k == 0 {
        return Ok(ZeroModes { vectors: Vec::new(), residuals: Vec::new() });
    }
    let v = spec.vectors.columns(0, k).into_owned();
    let ov: DMatrix<C64> = omega.matrix() * &v;
    let svd = ov.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let rotated = &v * vt.adjoint();
    let vectors: Vec<Vec<C64>> = (0..k).map(|j| rotated.column(j).iter().copied().collect()).collect();
    let residuals = vectors.iter().map(|psi| norm(&omega.apply(psi))).collect();
    Ok(ZeroModes { vectors, residuals })
}

/// `pad_to_qubits(Q_L, ⌈log₂ dim⌉)`.
pub fn padded_laplacian(cfg: &BrstConfig) -> Result<Operator> {
    pad_to_qubits(&build_brst_laplacian(cfg)?, cfg.padded_qubits())
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
