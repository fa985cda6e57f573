//! Truncated single-direction operators in the oscillator and
//! finite-difference bases.

use serde::{Deserialize, Serialize};

use crate::operator::{kron_all, Operator, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisTag {
    Oscillator,
    FiniteDifference,
}

/// A basis choice with `levels` states per bosonic direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisKind {
    pub tag: BasisTag,
    pub levels: usize,
}

impl BasisKind {
    pub fn oscillator(levels: usize) -> Self {
        assert!(levels >= 2, "a basis needs at least two levels");
        Self { tag: BasisTag::Oscillator, levels }
    }

    pub fn finite_difference(levels: usize) -> Self {
        assert!(levels >= 2, "a basis needs at least two levels");
        Self { tag: BasisTag::FiniteDifference, levels }
    }

    pub fn position(&self) -> Operator {
        match self.tag {
            BasisTag::Oscillator => q_osc(self.levels),
            BasisTag::FiniteDifference => q_fd(self.levels),
        }
    }

    pub fn momentum_squared(&self) -> Operator {
        match self.tag {
            BasisTag::Oscillator => {
                let p = p_osc(self.levels);
                &p * &p
            }
            BasisTag::FiniteDifference => p2_fd(self.levels),
        }
    }
}

fn check_levels(n: usize) {
    assert!(n >= 2, "truncation needs at least two levels, got {n}");
}

/// Truncated annihilation operator: superdiagonal √1 … √(N−1).
pub fn annihilation(n: usize) -> Operator {
    check_levels(n);
    Operator::from_real_fn(n, |j, k| if k == j + 1 { (k as f64).sqrt() } else { 0.0 })
}

/// (a + a†)/√2 in the truncated oscillator basis.
pub fn q_osc(n: usize) -> Operator {
    check_levels(n);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Operator::from_real_fn(n, |j, k| {
        if k == j + 1 {
            s * (k as f64).sqrt()
        } else if j == k + 1 {
            s * (j as f64).sqrt()
        } else {
            0.0
        }
    })
}

/// i(a† − a)/√2 in the truncated oscillator basis.
pub fn p_osc(n: usize) -> Operator {
    check_levels(n);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Operator::from_fn(n, |j, k| {
        if k == j + 1 {
            C64::new(0.0, -s * (k as f64).sqrt())
        } else if j == k + 1 {
            C64::new(0.0, s * (j as f64).sqrt())
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Diagonal grid `√(1/2N)·(2j − (N+1))`, j = 1..N.
pub fn q_fd(n: usize) -> Operator {
    check_levels(n);
    let s = (1.0 / (2.0 * n as f64)).sqrt();
    let diag: Vec<f64> = (1..=n).map(|j| s * (2.0 * j as f64 - (n as f64 + 1.0))).collect();
    Operator::from_diagonal(&diag)
}

/// `(N/2)·tridiag(−1, 2, −1)`.
pub fn p2_fd(n: usize) -> Operator {
    check_levels(n);
    let h = n as f64 / 2.0;
    Operator::from_real_fn(n, |j, k| {
        if j == k {
            2.0 * h
        } else if j.abs_diff(k) == 1 {
            -h
        } else {
            0.0
        }
    })
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` in tensor slot `slot` of a product of
/// spaces with the given dimensions.
pub fn embed(op: &Operator, slot: usize, dims: &[usize]) -> Operator {
    assert_eq!(op.dim(), dims[slot], "operator does not fit tensor slot {slot}");
    let ids: Vec<Operator> = dims.iter().map(|&d| Operator::identity(d)).collect();
    let factors: Vec<&Operator> = (0..dims.len()).map(|i| if i == slot { op } else { &ids[i] }).collect();
    kron_all(&factors)
}
