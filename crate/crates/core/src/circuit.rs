//! Noiseless statevector simulator. Qubit 0 is the most significant bit of
//! the amplitude index, matching the Kronecker order used everywhere else.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Operator, C64, I, ONE, ZERO};
use crate::pauli::{PauliString, PauliSum, IMAG_TOL};

/// Tolerance on ‖ψ‖ − 1 for states handed to the simulator.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StatevectorJson", into = "StatevectorJson")]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct StatevectorJson {
    n_qubits: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<Statevector> for StatevectorJson {
    fn from(s: Statevector) -> Self {
        Self {
            n_qubits: s.n_qubits,
            re: s.amps.iter().map(|z| z.re).collect(),
            im: s.amps.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<StatevectorJson> for Statevector {
    type Error = Error;

    fn try_from(j: StatevectorJson) -> Result<Self> {
        if j.re.len() != j.im.len() {
            return Err(Error::DimensionMismatch { expected: j.re.len(), found: j.im.len() });
        }
        let s = Self::from_amplitudes(j.re.iter().zip(&j.im).map(|(&r, &i)| C64::new(r, i)).collect())?;
        if s.n_qubits != j.n_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << j.n_qubits, found: s.amps.len() });
        }
        Ok(s)
    }
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let dim = 1usize << n_qubits;
        assert!(index < dim, "basis index {index} out of range for {n_qubits} qubits");
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self { n_qubits, amps }
    }

    /// Wraps a normalized amplitude vector whose length is a power of two.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { dim });
        }
        let norm = norm(&amps);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { n_qubits: dim.trailing_zeros() as usize, amps })
    }

    /// Normalizes `amps` first.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n = norm(&amps);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        amps.iter_mut().for_each(|z| *z /= n);
        Self::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Statevector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `⟨ψ|A|ψ⟩` with a dense operator.
    pub fn expectation_dense(&self, a: &Operator) -> Result<f64> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: a.dim() });
        }
        real_or_err(a.sandwich(&self.amps, &self.amps))
    }

    /// `exp(−i(θ/2)·P)|ψ⟩`.
    pub fn pauli_rotation(&self, s: &PauliString, theta: f64) -> Result<Statevector> {
        let mut out = self.clone();
        out.apply_pauli_rotation(s, theta)?;
        Ok(out)
    }

    pub fn apply_pauli_rotation(&mut self, s: &PauliString, theta: f64) -> Result<()> {
        if s.len() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: s.len() });
        }
        pauli_rotation_in_place(&mut self.amps, s, theta);
        Ok(())
    }
}

fn norm(amps: &[C64]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn real_or_err(z: C64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryExpectation { residue: z.im });
    }
    Ok(z.re)
}

/// In-place `cos(θ/2)ψ − i sin(θ/2) Pψ`.
pub fn pauli_rotation_in_place(amps: &mut [C64], s: &PauliString, theta: f64) {
    let m = s.masks();
    let (c, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mis = C64::new(0.0, -sn);
    if m.x == 0 {
        for (k, a) in amps.iter_mut().enumerate() {
            *a *= c + mis * m.phase(k);
        }
        return;
    }
    // pair k with k ^ x, visiting each pair once from its lower index
    let top = 1usize << (usize::BITS - 1 - m.x.leading_zeros());
    for k in 0..amps.len() {
        if k & top != 0 {
            continue;
        }
        let j = k ^ m.x;
        let (ak, aj) = (amps[k], amps[j]);
        // P|k⟩ = phase(k)|j⟩, P|j⟩ = phase(j)|k⟩
        amps[k] = c * ak + mis * m.phase(j) * aj;
        amps[j] = c * aj + mis * m.phase(k) * ak;
    }
}

/// `Σ coeff·⟨ψ|P|ψ⟩`, with the imaginary residue checked against
/// [`IMAG_TOL`].
pub fn expectation(p: &PauliSum, psi: &Statevector) -> Result<f64> {
    if p.n_qubits() != psi.n_qubits {
        return Err(Error::DimensionMismatch { expected: psi.n_qubits, found: p.n_qubits() });
    }
    let z: C64 = p.terms().iter().map(|t| t.string.expectation(&psi.amps) * t.coeff).sum();
    real_or_err(z)
}

/// A gate angle: either a fixed value or a slot in the circuit's parameter
/// vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Angle {
    Value(f64),
    Param(usize),
}

impl Angle {
    fn resolve(self, theta: &[f64]) -> f64 {
        match self {
            Angle::Value(v) => v,
            Angle::Param(k) => theta[k],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    Ry { target: usize, angle: Angle },
    Rz { target: usize, angle: Angle },
    Cz { a: usize, b: usize },
    Cx { control: usize, target: usize },
    H { target: usize },
    X { target: usize },
    S { target: usize },
    Sdg { target: usize },
    PauliRotation { string: PauliString, angle: Angle },
}

impl Gate {
    fn angle(&self) -> Option<Angle> {
        match self {
            Gate::Ry { angle, .. } | Gate::Rz { angle, .. } | Gate::PauliRotation { angle, .. } => Some(*angle),
            _ => None,
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let check = |q: usize| {
            if q < n_qubits {
                Ok(())
            } else {
                Err(Error::QubitIndex { index: q, n_qubits })
            }
        };
        match self {
            Gate::Ry { target, .. }
            | Gate::Rz { target, .. }
            | Gate::H { target }
            | Gate::X { target }
            | Gate::S { target }
            | Gate::Sdg { target } => check(*target),
            Gate::Cz { a, b } | Gate::Cx { control: a, target: b } => {
                check(*a)?;
                check(*b)?;
                if a == b {
                    return Err(Error::RepeatedQubit(*a));
                }
                Ok(())
            }
            Gate::PauliRotation { string, .. } => {
                if string.len() != n_qubits {
                    return Err(Error::DimensionMismatch { expected: n_qubits, found: string.len() });
                }
                Ok(())
            }
        }
    }

    /// The 2×2 matrix of a single-qubit gate, row-major.
    pub fn single_qubit_matrix(&self, theta: &[f64]) -> Option<[[C64; 2]; 2]> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Some(match self {
            Gate::Ry { angle, .. } => {
                let t = angle.resolve(theta) / 2.0;
                let (c, s) = (C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0));
                [[c, -s], [s, c]]
            }
            Gate::Rz { angle, .. } => {
                let t = angle.resolve(theta) / 2.0;
                [[C64::from_polar(1.0, -t), ZERO], [ZERO, C64::from_polar(1.0, t)]]
            }
            Gate::H { .. } => [[ONE * r, ONE * r], [ONE * r, -ONE * r]],
            Gate::X { .. } => [[ZERO, ONE], [ONE, ZERO]],
            Gate::S { .. } => [[ONE, ZERO], [ZERO, I]],
            Gate::Sdg { .. } => [[ONE, ZERO], [ZERO, -I]],
            _ => return None,
        })
    }

    fn apply(&self, amps: &mut [C64], n_qubits: usize, theta: &[f64]) {
        let bit = |q: usize| 1usize << (n_qubits - 1 - q);
        match self {
            Gate::Cz { a, b } => {
                let m = bit(*a) | bit(*b);
                for (k, z) in amps.iter_mut().enumerate() {
                    if k & m == m {
                        *z = -*z;
                    }
                }
            }
            Gate::Cx { control, target } => {
                let (c, t) = (bit(*control), bit(*target));
                for k in 0..amps.len() {
                    if k & c != 0 && k & t == 0 {
                        amps.swap(k, k | t);
                    }
                }
            }
            Gate::PauliRotation { string, angle } => pauli_rotation_in_place(amps, string, angle.resolve(theta)),
            Gate::Ry { target, .. }
            | Gate::Rz { target, .. }
            | Gate::H { target }
            | Gate::X { target }
            | Gate::S { target }
            | Gate::Sdg { target } => {
                let m = self.single_qubit_matrix(theta).expect("single-qubit gate");
                let t = bit(*target);
                for k in 0..amps.len() {
                    if k & t == 0 {
                        let (a0, a1) = (amps[k], amps[k | t]);
                        amps[k] = m[0][0] * a0 + m[0][1] * a1;
                        amps[k | t] = m[1][0] * a0 + m[1][1] * a1;
                    }
                }
            }
        }
    }
}

/// Ordered gate list on `n_qubits` qubits. Parameterized gates take slots
/// 0, 1, 2, … in the order they are pushed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitJson", into = "CircuitJson")]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl From<Circuit> for CircuitJson {
    fn from(c: Circuit) -> Self {
        Self { n_qubits: c.n_qubits, gates: c.gates }
    }
}

impl TryFrom<CircuitJson> for Circuit {
    type Error = Error;

    fn try_from(j: CircuitJson) -> Result<Self> {
        let mut c = Circuit::new(j.n_qubits);
        for g in j.gates {
            c.push(g)?;
        }
        Ok(c)
    }
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new(), n_params: 0 }
    }

    /// Appends a gate after checking qubit indices and parameter slot order.
    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.n_qubits)?;
        if let Some(Angle::Param(k)) = gate.angle() {
            if k != self.n_params {
                return Err(Error::InvalidParameter(format!(
                    "parameter slot {k} out of order; next free slot is {}",
                    self.n_params
                )));
            }
            self.n_params += 1;
        }
        self.gates.push(gate);
        Ok(self)
    }

    /// Appends a parameterized RY on the next free slot.
    pub fn ry_param(&mut self, target: usize) -> Result<&mut Self> {
        let angle = Angle::Param(self.n_params);
        self.push(Gate::Ry { target, angle })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Applies the gates in order to a copy of `input`.
    pub fn apply(&self, theta: &[f64], input: &Statevector) -> Result<Statevector> {
        if input.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: input.n_qubits });
        }
        let mut amps = input.amps.clone();
        self.apply_raw(theta, &mut amps)?;
        Ok(Statevector { n_qubits: self.n_qubits, amps })
    }

    /// Applies the gates to an arbitrary amplitude vector, normalized or not.
    pub fn apply_raw(&self, theta: &[f64], amps: &mut [C64]) -> Result<()> {
        if theta.len() != self.n_params {
            return Err(Error::ParameterCount { expected: self.n_params, found: theta.len() });
        }
        if amps.len() != 1 << self.n_qubits {
            return Err(Error::DimensionMismatch { expected: 1 << self.n_qubits, found: amps.len() });
        }
        for g in &self.gates {
            g.apply(amps, self.n_qubits, theta);
        }
        Ok(())
    }
}

/// Gate-level realization of `exp(−i(θ/2)P)`: basis change, CX ladder onto
/// the last active qubit, RZ(θ), and the mirror image.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesizedRotation {
    pub gates: Vec<Gate>,
    /// Phase multiplying the state in addition to the gates; non-trivial only
    /// for the identity string.
    pub global_phase: C64,
}

pub fn synthesize_pauli_rotation(s: &PauliString, theta: f64) -> SynthesizedRotation {
    use crate::pauli::Pauli;
    let active: Vec<usize> = (0..s.len()).filter(|&q| s.letters()[q] != Pauli::I).collect();
    let Some(&last) = active.last() else {
        return SynthesizedRotation { gates: Vec::new(), global_phase: C64::from_polar(1.0, -theta / 2.0) };
    };
    let mut into = Vec::new();
    for &q in &active {
        match s.letters()[q] {
            Pauli::X => into.push(Gate::H { target: q }),
            Pauli::Y => {
                into.push(Gate::Sdg { target: q });
                into.push(Gate::H { target: q });
            }
            _ => {}
        }
    }
    let ladder: Vec<Gate> = active.windows(2).map(|w| Gate::Cx { control: w[0], target: w[1] }).collect();
    let mut gates = into.clone();
    gates.extend(ladder.iter().cloned());
    gates.push(Gate::Rz { target: last, angle: Angle::Value(theta) });
    gates.extend(ladder.into_iter().rev());
    for g in into.into_iter().rev() {
        gates.push(match g {
            Gate::Sdg { target } => Gate::S { target },
            other => other,
        });
    }
    SynthesizedRotation { gates, global_phase: ONE }
}
