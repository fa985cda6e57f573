//! Dense complex operators: construction, Kronecker products, Hermitian
//! eigendecomposition and matrix exponentials.
//!
//! Every Hamiltonian, charge and constraint in the crate is carried as an
//! [`Operator`]. Storage is dense; the largest operators built here are
//! 512×512.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default Hermiticity tolerance for operations that require Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// A square complex matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub struct Operator {
    entries: DMatrix<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self { entries: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim) }
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self { entries: DMatrix::from_fn(dim, dim, f) }
    }

    pub fn from_real_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_fn(dim, |j, k| C64::new(f(j, k), 0.0))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_real_fn(n, |j, k| if j == k { diag[j] } else { 0.0 })
    }

    /// Builds an operator from `dim²` entries in row-major order.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        Ok(Self { entries: DMatrix::from_row_slice(dim, dim, entries) })
    }

    pub fn from_matrix(entries: DMatrix<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch { expected: entries.nrows(), found: entries.ncols() });
        }
        Ok(Self { entries })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        let n = self.dim();
        (0..n * n).map(|i| self.entries[(i / n, i % n)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { entries: &self.entries * s }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Largest |h[j,k] - conj(h[k,j])|.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in j..n {
                let d = (self.entries[(j, k)] - self.entries[(k, j)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_asymmetry() <= tol
    }

    pub fn ensure_hermitian(&self, tol: f64) -> Result<()> {
        let max_asymmetry = self.max_asymmetry();
        if max_asymmetry > tol {
            return Err(Error::NotHermitian { max_asymmetry });
        }
        Ok(())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        self * other - other * self
    }

    pub fn anticommutator(&self, other: &Operator) -> Operator {
        self * other + other * self
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim(), "vector length must match operator dimension");
        let n = self.dim();
        let mut out = vec![ZERO; n];
        for (k, &vk) in v.iter().enumerate() {
            if vk == ZERO {
                continue;
            }
            let col = self.entries.column(k);
            for (o, &h) in out.iter_mut().zip(col.iter()) {
                *o += h * vk;
            }
        }
        out
    }

    /// ⟨u|A|v⟩.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        let av = self.apply(v);
        u.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }

    /// Restriction to the columns/rows listed in `basis`, i.e. B†AB for the
    /// column-selection matrix B.
    pub fn restrict(&self, basis: &[usize]) -> Operator {
        Operator::from_fn(basis.len(), |j, k| self.entries[(basis[j], basis[k])])
    }

    /// Projection V†AV onto the span of the given orthonormal vectors.
    pub fn project(&self, vectors: &[Vec<C64>]) -> Operator {
        let images: Vec<Vec<C64>> = vectors.iter().map(|v| self.apply(v)).collect();
        Operator::from_fn(vectors.len(), |j, k| {
            vectors[j].iter().zip(&images[k]).map(|(a, b)| a.conj() * b).sum()
        })
    }

    pub fn pow(&self, n: u32) -> Operator {
        let mut out = Operator::identity(self.dim());
        for _ in 0..n {
            out = &out * self;
        }
        out
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = C64;

    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.entries[idx]
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&Operator> for &Operator {
            type Output = Operator;
            fn $m(self, rhs: &Operator) -> Operator {
                Operator { entries: &self.entries $op &rhs.entries }
            }
        }
        impl $tr<Operator> for Operator {
            type Output = Operator;
            fn $m(self, rhs: Operator) -> Operator {
                Operator { entries: self.entries $op rhs.entries }
            }
        }
        impl $tr<&Operator> for Operator {
            type Output = Operator;
            fn $m(self, rhs: &Operator) -> Operator {
                Operator { entries: self.entries $op &rhs.entries }
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl AddAssign<&Operator> for Operator {
    fn add_assign(&mut self, rhs: &Operator) {
        self.entries += &rhs.entries;
    }
}

impl Neg for Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator { entries: -self.entries }
    }
}

/// Wire format: `{"dim": n, "re": [...], "im": [...]}`, row-major.
#[derive(Serialize, Deserialize)]
struct OperatorJson {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<Operator> for OperatorJson {
    fn from(op: Operator) -> Self {
        let flat = op.to_row_major();
        OperatorJson {
            dim: op.dim(),
            re: flat.iter().map(|z| z.re).collect(),
            im: flat.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<OperatorJson> for Operator {
    type Error = Error;

    fn try_from(js: OperatorJson) -> Result<Self> {
        if js.dim == 0 {
            return Err(Error::InvalidParameter("operator dim must be positive".into()));
        }
        if js.re.len() != js.im.len() {
            return Err(Error::DimensionMismatch { expected: js.re.len(), found: js.im.len() });
        }
        let flat: Vec<C64> = js.re.iter().zip(&js.im).map(|(&r, &i)| C64::new(r, i)).collect();
        Operator::from_row_major(js.dim, &flat)
    }
}

/// Kronecker product, `result[(j·m+l),(k·m+n)] = a[j,k]·b[l,n]` with `m = b.dim`.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    Operator { entries: a.entries.kronecker(&b.entries) }
}

/// Left-to-right Kronecker product of all factors.
pub fn kron_all(factors: &[&Operator]) -> Operator {
    let mut iter = factors.iter();
    let first = match iter.next() {
        Some(f) => (*f).clone(),
        None => return Operator::identity(1),
    };
    iter.fold(first, |acc, f| kron(&acc, f))
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k).iter().copied().collect()
    }

    /// V·diag(f(λ))·V†.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> Operator {
        let d: DVector<C64> = DVector::from_iterator(self.values.len(), self.values.iter().map(|&l| f(l)));
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |j, k| self.vectors[(j, k)] * d[k]);
        Operator { entries: scaled * self.vectors.adjoint() }
    }

    pub fn reconstruct(&self) -> Operator {
        self.map(|l| C64::new(l, 0.0))
    }
}

/// Hermitian eigendecomposition; rejects input whose asymmetry exceeds
/// [`HERMITIAN_TOL`].
pub fn eigh(h: &Operator) -> Result<Spectrum> {
    eigh_with_tol(h, HERMITIAN_TOL)
}

pub fn eigh_with_tol(h: &Operator, tol: f64) -> Result<Spectrum> {
    h.ensure_hermitian(tol)?;
    let eig = h
        .entries
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or_else(|| Error::Optimizer("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(h.dim(), h.dim(), |j, k| eig.eigenvectors[(j, order[k])]);
    Ok(Spectrum { values, vectors })
}

/// exp(scale·a). Hermitian generators go through the eigendecomposition;
/// anything else falls back to Padé scaling-and-squaring.
pub fn expm(a: &Operator, scale: C64) -> Operator {
    if a.is_hermitian(1e-12) {
        if let Ok(spec) = eigh_with_tol(a, 1e-12) {
            return spec.map(|l| (scale * l).exp());
        }
    }
    Operator { entries: (&a.entries * scale).exp() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> Operator {
        let raw = Operator::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&raw + &raw.adjoint()).scale_real(0.5)
    }

    fn random_op(dim: usize, rng: &mut ChaCha8Rng) -> Operator {
        Operator::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn kron_identities_and_diagonal() {
        assert_eq!(kron(&Operator::identity(2), &Operator::identity(2)), Operator::identity(4));
        let z = Operator::from_diagonal(&[1.0, -1.0]);
        assert_eq!(kron(&z, &Operator::identity(2)), Operator::from_diagonal(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn kron_matches_index_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_op(4, &mut rng);
        let b = random_op(8, &mut rng);
        let ab = kron(&a, &b);
        assert_eq!(ab.dim(), 32);
        for _ in 0..5 {
            let (j, k, l, m) = (
                rng.random_range(0..4),
                rng.random_range(0..4),
                rng.random_range(0..8),
                rng.random_range(0..8),
            );
            assert_eq!(ab[(j * 8 + l, k * 8 + m)], a[(j, k)] * b[(l, m)]);
        }
    }

    #[test]
    fn kron_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random_op(2, &mut rng);
            let b = random_op(3, &mut rng);
            let c = random_op(2, &mut rng);
            let left = kron(&kron(&a, &b), &c);
            let right = kron(&a, &kron(&b, &c));
            assert!((&left - &right).max_abs() <= 1e-14);
        }
    }

    #[test]
    fn eigh_diagonal_and_offdiagonal() {
        let s = eigh(&Operator::from_diagonal(&[1.0, -1.0])).unwrap();
        assert_eq!(s.values, vec![-1.0, 1.0]);
        let h = Operator::from_real_fn(2, |j, k| if j != k { std::f64::consts::FRAC_1_SQRT_2 } else { 0.0 });
        let s = eigh(&h).unwrap();
        assert!((s.values[0] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.values[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn eigh_rejects_non_hermitian_with_asymmetry() {
        let h = Operator::from_real_fn(2, |j, k| if j == 0 && k == 1 { 1.0 } else { 0.0 });
        match eigh(&h) {
            Err(Error::NotHermitian { max_asymmetry }) => assert!((max_asymmetry - 1.0).abs() < 1e-15),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn eigh_residual_and_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [3, 8, 33] {
            let h = random_hermitian(dim, &mut rng);
            let s = eigh(&h).unwrap();
            let norm = h.frobenius_norm();
            assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
            for k in 0..dim {
                let v = s.vector(k);
                let hv = h.apply(&v);
                let res: f64 = hv.iter().zip(&v).map(|(a, b)| (a - b * s.values[k]).norm_sqr()).sum::<f64>().sqrt();
                assert!(res <= 1e-9 * norm, "residual {res}");
            }
            assert!((&s.reconstruct() - &h).max_abs() <= 1e-9 * norm);
            let vv = &s.vectors.adjoint() * &s.vectors;
            assert!((vv - DMatrix::<C64>::identity(dim, dim)).iter().all(|z| z.norm() < 1e-10));
        }
    }

    #[test]
    fn expm_zero_and_diagonal() {
        let z = expm(&Operator::zeros(3), C64::new(0.3, -2.0));
        assert!((&z - &Operator::identity(3)).max_abs() < 1e-15);
        let theta = 0.7;
        let u = expm(&Operator::from_diagonal(&[1.0, -1.0]), C64::new(0.0, -theta));
        assert!((u[(0, 0)] - C64::new(0.0, -theta).exp()).norm() < 1e-15);
        assert!((u[(1, 1)] - C64::new(0.0, theta).exp()).norm() < 1e-15);
        assert!(u[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn expm_matches_eigen_reconstruction_and_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(8, &mut rng);
        let t = 0.9;
        let u = expm(&h, C64::new(0.0, -t));
        // independent route: Padé scaling-and-squaring from nalgebra
        let pade = Operator::from_matrix((h.matrix() * C64::new(0.0, -t)).exp()).unwrap();
        assert!((&u - &pade).max_abs() <= 1e-10);
        let s = eigh(&h).unwrap();
        let manual = s.map(|l| C64::new(0.0, -t * l).exp());
        assert!((&u - &manual).max_abs() <= 1e-10);
        let uu = &u.adjoint() * &u;
        assert!((&uu - &Operator::identity(8)).max_abs() <= 1e-10);
    }

    #[test]
    fn expm_group_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hermitian(6, &mut rng);
        let (t1, t2) = (0.4, 1.3);
        let lhs = &expm(&h, C64::new(0.0, -t1)) * &expm(&h, C64::new(0.0, -t2));
        let rhs = expm(&h, C64::new(0.0, -(t1 + t2)));
        assert!((&lhs - &rhs).max_abs() <= 1e-9);
    }

    #[test]
    fn expm_unitary_at_dim_512() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_hermitian(512, &mut rng);
        let u = expm(&h, C64::new(0.0, -0.05));
        let uu = &u.adjoint() * &u;
        assert!((&uu - &Operator::identity(512)).max_abs() <= 1e-10);
    }

    #[test]
    fn json_round_trip_is_row_major() {
        let op = Operator::from_row_major(2, &[ONE, I, -I, ONE]).unwrap();
        let js = serde_json::to_value(&op).unwrap();
        assert_eq!(js["dim"], 2);
        assert_eq!(js["re"], serde_json::json!([1.0, 0.0, 0.0, 1.0]));
        assert_eq!(js["im"], serde_json::json!([0.0, 1.0, -1.0, 0.0]));
        let back: Operator = serde_json::from_value(js).unwrap();
        assert_eq!(back, op);
        let bad = serde_json::json!({"dim": 3, "re": [1.0], "im": [0.0]});
        assert!(serde_json::from_value::<Operator>(bad).is_err());
    }

    #[test]
    fn non_hermitian_expm_uses_pade() {
        let n = Operator::from_real_fn(2, |j, k| if j == 0 && k == 1 { 1.0 } else { 0.0 });
        // nilpotent: exp(N) = I + N
        let e = expm(&n, ONE);
        assert!((&e - &(&Operator::identity(2) + &n)).max_abs() < 1e-14);
    }
}
