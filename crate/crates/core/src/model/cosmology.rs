//! Time-dependent deformation Λ(t) and the single-direction cosmological
//! Hamiltonian.

use serde::{Deserialize, Serialize};

use super::basis::{p2_fd, q_fd};
use crate::error::{Error, Result};
use crate::operator::Operator;

/// Time profile of the linear deformation ρ(t).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RhoProfile {
    #[default]
    Zero,
    Constant { value: f64 },
    /// `amplitude · t^exponent`
    PowerLaw { amplitude: f64, exponent: f64 },
}

impl RhoProfile {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            RhoProfile::Zero => 0.0,
            RhoProfile::Constant { value } => value,
            RhoProfile::PowerLaw { amplitude, exponent } => amplitude * t.powf(exponent),
        }
    }
}

/// Deformation parameters. Built either from (α, β) or directly from k².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformationParams {
    alpha: Option<f64>,
    beta: Option<f64>,
    k_squared: f64,
    #[serde(default)]
    rho: RhoProfile,
}

impl DeformationParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if alpha == 0.0 || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("deformation needs finite α ≠ 0 and β, got α={alpha}, β={beta}")));
        }
        let k_squared = -(beta * beta - 2.0 * alpha * beta) / (2.0 * alpha).powi(2);
        Ok(Self { alpha: Some(alpha), beta: Some(beta), k_squared, rho: RhoProfile::Zero })
    }

    pub fn from_k_squared(k_squared: f64) -> Result<Self> {
        if !k_squared.is_finite() {
            return Err(Error::InvalidParameter(format!("k² must be finite, got {k_squared}")));
        }
        Ok(Self { alpha: None, beta: None, k_squared, rho: RhoProfile::Zero })
    }

    pub fn with_rho(mut self, rho: RhoProfile) -> Self {
        self.rho = rho;
        self
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn k_squared(&self) -> f64 {
        self.k_squared
    }

    pub fn rho(&self) -> RhoProfile {
        self.rho
    }
}

/// `Λ(t) = −k²/t²`.
pub fn lambda_deformation(t: f64, d: &DeformationParams) -> Result<f64> {
    if t == 0.0 {
        return Err(Error::Singularity("Λ(t) diverges at t = 0".into()));
    }
    Ok(-d.k_squared / (t * t))
}

/// `H(t) = ½P² − ½Λ(t)X² − ρ(t)X` in the finite-difference basis, so that the
/// classical motion obeys ẍ = Λ(t)x + ρ(t).
pub fn build_h_cosmo(t: f64, d: &DeformationParams, levels: usize) -> Result<Operator> {
    let lambda = lambda_deformation(t, d)?;
    let q = q_fd(levels);
    let mut h = p2_fd(levels).scale_real(0.5);
    h += &(&q * &q).scale_real(-0.5 * lambda);
    let rho = d.rho.at(t);
    if rho != 0.0 {
        h += &q.scale_real(-rho);
    }
    Ok(h)
}

/// Time-independent oscillator `½P² + ½ω²X²` in the finite-difference basis.
pub fn build_h_sho(omega: f64, levels: usize) -> Operator {
    let q = q_fd(levels);
    &p2_fd(levels).scale_real(0.5) + &(&q * &q).scale_real(0.5 * omega * omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{decompose, DEFAULT_THRESHOLD};

    #[test]
    fn unit_alpha_beta() {
        let d = DeformationParams::new(1.0, 1.0).unwrap();
        assert!((d.k_squared() - 0.25).abs() < 1e-14);
        assert!((lambda_deformation(2.0, &d).unwrap() + 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn both_forms_of_lambda_agree() {
        for (a, b) in [(1.0, 1.0), (2.0, -3.0), (-0.5, 0.7), (3.0, 6.5)] {
            let d = DeformationParams::new(a, b).unwrap();
            for t in [0.1, 1.0, 2.5, 40.0] {
                let direct = (b * b - 2.0 * a * b) / (2.0 * a * t).powi(2);
                let got = lambda_deformation(t, &d).unwrap();
                assert!((got - direct).abs() <= 1e-14 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn singular_and_invalid_inputs() {
        let d = DeformationParams::new(1.0, 1.0).unwrap();
        assert!(matches!(lambda_deformation(0.0, &d), Err(Error::Singularity(_))));
        assert!(matches!(build_h_cosmo(0.0, &d, 4), Err(Error::Singularity(_))));
        assert!(DeformationParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn lambda_decays() {
        let d = DeformationParams::new(1.0, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for t in [1.0, 10.0, 100.0, 1e4, 1e8] {
            let l = lambda_deformation(t, &d).unwrap().abs();
            assert!(l < prev);
            prev = l;
        }
        assert!(prev < 1e-16);
    }

    #[test]
    fn two_qubit_cosmology_has_five_terms() {
        let d = DeformationParams::new(1.0, 1.0).unwrap();
        let h = build_h_cosmo(2.0, &d, 4).unwrap();
        assert!(h.is_hermitian(1e-12));
        let p = decompose(&h, DEFAULT_THRESHOLD).unwrap();
        assert_eq!(p.n_qubits(), 2);
        assert_eq!(p.len(), 5);
        assert!((p.coeff(&"ZZ".parse().unwrap()) - 0.015625).abs() < 1e-14);
        assert!((p.coeff(&"IX".parse().unwrap()) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn confining_sign() {
        // positive k² gives a positive X² coefficient
        let d = DeformationParams::from_k_squared(1.0).unwrap();
        let h = build_h_cosmo(1.0, &d, 4).unwrap();
        let free = p2_fd(4).scale_real(0.5);
        let q = q_fd(4);
        assert!((&(&h - &free) - &(&q * &q).scale_real(0.5)).max_abs() < 1e-14);
    }

    #[test]
    fn rho_shifts_linear_term() {
        let d = DeformationParams::from_k_squared(0.25).unwrap();
        let with = d.with_rho(RhoProfile::Constant { value: 0.3 });
        let diff = &build_h_cosmo(1.5, &with, 4).unwrap() - &build_h_cosmo(1.5, &d, 4).unwrap();
        assert!((&diff + &q_fd(4).scale_real(0.3)).max_abs() < 1e-15);
        let p = RhoProfile::PowerLaw { amplitude: 2.0, exponent: -1.0 };
        assert!((p.at(4.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sho_matches_cosmology_at_fixed_frequency() {
        // Λ = −ω² ⇔ k² = ω² t²
        let t: f64 = 1.7;
        let omega: f64 = 0.8;
        let d = DeformationParams::from_k_squared(omega * omega * t * t).unwrap();
        assert!((&build_h_cosmo(t, &d, 4).unwrap() - &build_h_sho(omega, 4)).max_abs() < 1e-14);
    }
}
