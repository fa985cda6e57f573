//! Weighted sums of Pauli strings and the map between them and dense
//! Hermitian operators.
//!
//! Letter 0 of a string acts on the leftmost tensor factor, which is the most
//! significant bit of a basis-state index.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Operator, C64, HERMITIAN_TOL, I, ONE, ZERO};

/// Default pruning threshold for [`decompose`].
pub const DEFAULT_THRESHOLD: f64 = 1e-12;

/// Largest tolerated imaginary part of a Pauli coefficient.
pub const IMAG_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Operator {
        match self {
            Pauli::I => Operator::identity(2),
            Pauli::X => Operator::from_row_major(2, &[ZERO, ONE, ONE, ZERO]).unwrap(),
            Pauli::Y => Operator::from_row_major(2, &[ZERO, -I, I, ZERO]).unwrap(),
            Pauli::Z => Operator::from_diagonal(&[1.0, -1.0]),
        }
    }

    fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Bit-mask form of a Pauli string: `P|k⟩ = i^{n_y}·(-1)^{|k ∧ z|}·|k ⊕ x⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PauliMasks {
    pub x: usize,
    pub z: usize,
    pub n_y: u32,
}

impl PauliMasks {
    /// Phase picked up by basis state `k`.
    #[inline]
    pub fn phase(&self, k: usize) -> C64 {
        let sign = if (k & self.z).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        i_pow(self.n_y) * sign
    }
}

#[inline]
fn i_pow(n: u32) -> C64 {
    match n % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { letters }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { letters: vec![Pauli::I; n_qubits] }
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn masks(&self) -> PauliMasks {
        let n = self.letters.len();
        let mut m = PauliMasks { x: 0, z: 0, n_y: 0 };
        for (q, &p) in self.letters.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => m.x |= bit,
                Pauli::Y => {
                    m.x |= bit;
                    m.z |= bit;
                    m.n_y += 1;
                }
                Pauli::Z => m.z |= bit,
            }
        }
        m
    }

    fn from_masks(n_qubits: usize, x: usize, z: usize) -> Self {
        let letters = (0..n_qubits)
            .map(|q| {
                let bit = 1usize << (n_qubits - 1 - q);
                match (x & bit != 0, z & bit != 0) {
                    (false, false) => Pauli::I,
                    (true, false) => Pauli::X,
                    (true, true) => Pauli::Y,
                    (false, true) => Pauli::Z,
                }
            })
            .collect();
        Self { letters }
    }

    /// Dense matrix of the tensor product.
    pub fn matrix(&self) -> Operator {
        let dim = 1usize << self.len();
        let m = self.masks();
        let mut out = Operator::zeros(dim).into_matrix();
        for k in 0..dim {
            out[(k ^ m.x, k)] = m.phase(k);
        }
        Operator::from_matrix(out).expect("square by construction")
    }

    /// `P|ψ⟩` for an amplitude vector of length 2^len.
    pub fn apply(&self, amps: &[C64]) -> Vec<C64> {
        let m = self.masks();
        let mut out = vec![ZERO; amps.len()];
        for (k, &a) in amps.iter().enumerate() {
            out[k ^ m.x] = m.phase(k) * a;
        }
        out
    }

    /// `⟨ψ|P|ψ⟩` (complex; real for normalized states up to rounding).
    pub fn expectation(&self, amps: &[C64]) -> C64 {
        let m = self.masks();
        amps.iter().enumerate().map(|(k, &a)| amps[k ^ m.x].conj() * m.phase(k) * a).sum()
    }

    /// Whether the two strings commute as operators.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| Pauli::from_char(c.to_ascii_uppercase()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidPauliString(s.to_string()))?;
        if letters.is_empty() {
            return Err(Error::InvalidPauliString(s.to_string()));
        }
        Ok(Self { letters })
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub string: PauliString,
}

/// A real-weighted sum of distinct Pauli strings on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    /// Validates string lengths, merges duplicate strings and drops zero
    /// coefficients.
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidParameter("n_qubits must be positive".into()));
        }
        let mut merged: Vec<PauliTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            if t.string.len() != n_qubits {
                return Err(Error::DimensionMismatch { expected: n_qubits, found: t.string.len() });
            }
            match merged.iter_mut().find(|m| m.string == t.string) {
                Some(m) => m.coeff += t.coeff,
                None => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        Ok(Self { n_qubits, terms: merged })
    }

    /// Convenience constructor from `(coeff, "XYZ…")` pairs.
    pub fn from_labels(pairs: &[(f64, &str)]) -> Result<Self> {
        let terms = pairs
            .iter()
            .map(|&(coeff, s)| Ok(PauliTerm { coeff, string: s.parse()? }))
            .collect::<Result<Vec<_>>>()?;
        let n = terms.first().map(|t| t.string.len()).unwrap_or(0);
        Self::new(n, terms)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, s: &PauliString) -> f64 {
        self.terms.iter().find(|t| &t.string == s).map_or(0.0, |t| t.coeff)
    }

    /// `H|ψ⟩`.
    pub fn apply(&self, amps: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; amps.len()];
        for t in &self.terms {
            let m = t.string.masks();
            for (k, &a) in amps.iter().enumerate() {
                out[k ^ m.x] += m.phase(k) * a * t.coeff;
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// CSV with header `string,coeff`, coefficients at 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["string", "coeff"])?;
        for t in &self.terms {
            wr.write_record([t.string.to_string(), format!("{:.16e}", t.coeff)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

impl<'de> Deserialize<'de> for PauliSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n_qubits: usize,
            terms: Vec<PauliTerm>,
        }
        let raw = Raw::deserialize(d)?;
        PauliSum::new(raw.n_qubits, raw.terms).map_err(serde::de::Error::custom)
    }
}

/// Number of qubits needed to hold `dim` basis states.
pub fn qubits_for_dim(dim: usize) -> usize {
    dim.next_power_of_two().trailing_zeros() as usize
}

/// Expands a Hermitian `2ⁿ×2ⁿ` operator as `Σ_s coeff_s·P_s` with
/// `coeff_s = Tr(P_s·h)/2ⁿ`, keeping only `|coeff_s| > threshold`.
///
/// For each X-mask the traces over all Z-masks are a Walsh–Hadamard transform
/// of the diagonal `j ↦ h[j, j⊕x]`, so the full expansion costs O(n·4ⁿ).
pub fn decompose(h: &Operator, threshold: f64) -> Result<PauliSum> {
    let dim = h.dim();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::NotPowerOfTwo { dim });
    }
    h.ensure_hermitian(HERMITIAN_TOL)?;
    let n = dim.trailing_zeros() as usize;
    let m = h.matrix();
    let norm = 1.0 / dim as f64;

    let per_x: Vec<Result<Vec<PauliTerm>>> = (0..dim)
        .into_par_iter()
        .map(|x| {
            let mut f: Vec<C64> = (0..dim).map(|j| m[(j, j ^ x)]).collect();
            walsh_hadamard(&mut f);
            let mut out = Vec::new();
            for (z, &acc) in f.iter().enumerate() {
                let c = i_pow((x & z).count_ones()) * acc * norm;
                if c.im.abs() > IMAG_TOL {
                    let string = PauliString::from_masks(n, x, z).to_string();
                    return Err(Error::ComplexCoefficient { string, imag: c.im });
                }
                if c.re.abs() > threshold {
                    out.push(PauliTerm { coeff: c.re, string: PauliString::from_masks(n, x, z) });
                }
            }
            Ok(out)
        })
        .collect();

    let mut terms = Vec::new();
    for chunk in per_x {
        terms.extend(chunk?);
    }
    terms.sort_by(|a, b| a.string.cmp(&b.string));
    Ok(PauliSum { n_qubits: n, terms })
}

/// In-place unnormalized transform `f[z] ← Σ_j (-1)^{|j∧z|} f[j]`.
fn walsh_hadamard(f: &mut [C64]) {
    let n = f.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for j in block..block + h {
                let (a, b) = (f[j], f[j + h]);
                f[j] = a + b;
                f[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// `Σ coeff·(⊗ Pauli matrices)`, a `2ⁿ×2ⁿ` operator.
pub fn reconstruct(p: &PauliSum) -> Operator {
    let dim = 1usize << p.n_qubits;
    let mut out = Operator::zeros(dim).into_matrix();
    for t in &p.terms {
        let m = t.string.masks();
        for k in 0..dim {
            out[(k ^ m.x, k)] += m.phase(k) * t.coeff;
        }
    }
    Operator::from_matrix(out).expect("square by construction")
}

/// Embeds `h` as the top-left block of a zero `2ⁿ×2ⁿ` operator.
pub fn pad_to_qubits(h: &Operator, n_qubits: usize) -> Result<Operator> {
    let target = 1usize << n_qubits;
    if h.dim() > target {
        return Err(Error::PaddingTooSmall { dim: h.dim(), n_qubits });
    }
    let d = h.dim();
    Ok(Operator::from_fn(target, |j, k| if j < d && k < d { h[(j, k)] } else { ZERO }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{eigh, kron_all};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(dim: usize, seed: u64) -> Operator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = Operator::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&raw + &raw.adjoint()).scale_real(0.5)
    }

    /// Dense reference: Tr(P_s·h)/2ⁿ over all 4ⁿ strings built by kron.
    fn dense_coefficients(h: &Operator) -> Vec<(String, C64)> {
        let n = h.dim().trailing_zeros() as usize;
        let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        (0..1usize << (2 * n))
            .map(|s| {
                let ls: Vec<Pauli> = (0..n).map(|q| letters[(s >> (2 * (n - 1 - q))) & 3]).collect();
                let mats: Vec<Operator> = ls.iter().map(|p| p.matrix()).collect();
                let refs: Vec<&Operator> = mats.iter().collect();
                let p = kron_all(&refs);
                let c = (&p * h).trace() / h.dim() as f64;
                (PauliString::new(ls).to_string(), c)
            })
            .collect()
    }

    #[test]
    fn single_z() {
        let p = decompose(&Operator::from_diagonal(&[1.0, -1.0]), 1e-12).unwrap();
        assert_eq!(p.n_qubits(), 1);
        assert_eq!(p.terms(), &[PauliTerm { coeff: 1.0, string: "Z".parse().unwrap() }]);
    }

    #[test]
    fn matches_dense_trace_oracle() {
        let h = random_hermitian(16, 42);
        let p = decompose(&h, 0.0).unwrap();
        for (s, c) in dense_coefficients(&h) {
            assert!(c.im.abs() < 1e-14);
            let got = p.coeff(&s.parse().unwrap());
            assert!((got - c.re).abs() < 1e-14, "{s}: {got} vs {}", c.re);
        }
    }

    #[test]
    fn identity_reconstructs() {
        let p = PauliSum::from_labels(&[(1.0, "I")]).unwrap();
        assert_eq!(reconstruct(&p), Operator::identity(2));
    }

    #[test]
    fn xx_plus_yy_is_swap_block() {
        let p = PauliSum::from_labels(&[(0.5, "XX"), (0.5, "YY")]).unwrap();
        let m = reconstruct(&p);
        // ½(XX+YY) = |01⟩⟨10| + |10⟩⟨01|
        for j in 0..4 {
            for k in 0..4 {
                let want = if (j, k) == (1, 2) || (j, k) == (2, 1) { 1.0 } else { 0.0 };
                assert!((m[(j, k)] - C64::new(want, 0.0)).norm() < 1e-15, "({j},{k})");
            }
        }
    }

    #[test]
    fn string_matrix_matches_kron() {
        for label in ["XYZ", "YIY", "ZZI", "IXY"] {
            let s: PauliString = label.parse().unwrap();
            let mats: Vec<Operator> = s.letters().iter().map(|p| p.matrix()).collect();
            let refs: Vec<&Operator> = mats.iter().collect();
            assert!((&s.matrix() - &kron_all(&refs)).max_abs() < 1e-15, "{label}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(decompose(&Operator::identity(3), 1e-12), Err(Error::NotPowerOfTwo { dim: 3 })));
        let msg = decompose(&Operator::identity(6), 1e-12).unwrap_err().to_string();
        assert!(msg.contains("pad_to_qubits"));
        let nh = Operator::from_real_fn(2, |j, k| if (j, k) == (0, 1) { 1.0 } else { 0.0 });
        assert!(matches!(decompose(&nh, 1e-12), Err(Error::NotHermitian { .. })));
        assert!("XQ".parse::<PauliString>().is_err());
        assert!(PauliSum::from_labels(&[(1.0, "XX"), (1.0, "X")]).is_err());
    }

    #[test]
    fn sum_merges_duplicates() {
        let p = PauliSum::from_labels(&[(1.0, "XZ"), (0.5, "XZ"), (2.0, "ZZ"), (-2.0, "ZZ")]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&"XZ".parse().unwrap()), 1.5);
    }

    #[test]
    fn padding_is_zero_block() {
        let p = pad_to_qubits(&Operator::identity(3), 2).unwrap();
        assert_eq!(p, Operator::from_diagonal(&[1.0, 1.0, 1.0, 0.0]));
        assert!(matches!(pad_to_qubits(&Operator::identity(5), 2), Err(Error::PaddingTooSmall { .. })));
    }

    #[test]
    fn padding_adds_zero_eigenvalues() {
        let h = random_hermitian(6, 3);
        let padded = pad_to_qubits(&h, 3).unwrap();
        let mut want = eigh(&h).unwrap().values;
        want.extend([0.0, 0.0]);
        want.sort_by(f64::total_cmp);
        let got = eigh(&padded).unwrap().values;
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn json_and_csv_shapes() {
        let p = PauliSum::from_labels(&[(0.25, "ZXI"), (-1.0, "III")]).unwrap();
        let js: serde_json::Value = serde_json::from_str(&p.to_json().unwrap()).unwrap();
        assert_eq!(js["n_qubits"], 3);
        assert_eq!(js["terms"][0]["string"], "ZXI");
        assert_eq!(js["terms"][0]["coeff"], 0.25);
        assert_eq!(PauliSum::from_json(&p.to_json().unwrap()).unwrap(), p);
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("string,coeff\n"));
        assert!(text.contains("ZXI,2.5000000000000000e-1"));
        let bad = r#"{"n_qubits": 2, "terms": [{"coeff": 1.0, "string": "XXX"}]}"#;
        assert!(PauliSum::from_json(bad).is_err());
    }

    #[test]
    fn apply_matches_dense_matrix() {
        let p = PauliSum::from_labels(&[(0.3, "XY"), (-0.7, "ZI"), (1.1, "YY")]).unwrap();
        let amps: Vec<C64> = (0..4).map(|k| C64::new(k as f64 + 0.5, 1.0 - k as f64)).collect();
        let dense = reconstruct(&p).apply(&amps);
        for (a, b) in p.apply(&amps).iter().zip(&dense) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn commutation_rule() {
        let ix: PauliString = "IX".parse().unwrap();
        let yy: PauliString = "YY".parse().unwrap();
        let zz: PauliString = "ZZ".parse().unwrap();
        assert!(!ix.commutes_with(&yy));
        assert!(yy.commutes_with(&zz));
        let comm = ix.matrix().commutator(&yy.matrix());
        assert!(comm.max_abs() > 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn round_trip_and_parseval(seed in any::<u64>()) {
            let h = random_hermitian(16, seed);
            let p = decompose(&h, 0.0).unwrap();
            prop_assert!((&reconstruct(&p) - &h).max_abs() <= 1e-12);
            let parseval: f64 = p.terms().iter().map(|t| t.coeff * t.coeff).sum::<f64>() * 16.0;
            let fro = h.frobenius_norm().powi(2);
            prop_assert!((parseval - fro).abs() <= 1e-10 * fro.max(1.0));
        }

        #[test]
        fn decompose_inverts_reconstruct(coeffs in proptest::collection::vec(-2.0f64..2.0, 1..8), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let letters = ["I", "X", "Y", "Z"];
            let terms: Vec<PauliTerm> = coeffs.iter().map(|&c| {
                let s: String = (0..3).map(|_| letters[rng.random_range(0..4)]).collect();
                PauliTerm { coeff: c, string: s.parse().unwrap() }
            }).collect();
            let p = PauliSum::new(3, terms).unwrap();
            let back = decompose(&reconstruct(&p), 1e-12).unwrap();
            let kept: Vec<&PauliTerm> = p.terms().iter().filter(|t| t.coeff.abs() > 1e-12).collect();
            prop_assert_eq!(back.len(), kept.len());
            for t in kept {
                prop_assert!((back.coeff(&t.string) - t.coeff).abs() < 1e-12);
            }
        }

        #[test]
        fn term_count_monotone_in_threshold(seed in any::<u64>(), t1 in 0.0f64..0.5, t2 in 0.0f64..0.5) {
            let h = random_hermitian(8, seed);
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            prop_assert!(decompose(&h, hi).unwrap().len() <= decompose(&h, lo).unwrap().len());
        }
    }
}
