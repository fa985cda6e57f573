//! Time-sliced evolution under a time-dependent Hamiltonian, with a dense
//! per-slice oracle and closed-form quadratic propagators.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::circuit::Statevector;
use crate::error::{Error, Result};
use crate::operator::{expm, Operator, C64, HERMITIAN_TOL};
use crate::pauli::{PauliSum, PauliTerm};

/// Uniform grid sampled at slice midpoints `t_i + (k + ½)dt`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t_initial: f64,
    t_final: f64,
    n_slices: usize,
}

impl TimeGrid {
    pub fn new(t_initial: f64, t_final: f64, n_slices: usize) -> Result<Self> {
        if !t_initial.is_finite() || !t_final.is_finite() {
            return Err(Error::InvalidGrid(format!("endpoints must be finite, got [{t_initial}, {t_final}]")));
        }
        if n_slices == 0 {
            return Err(Error::InvalidGrid("n_slices must be positive".into()));
        }
        if t_final <= t_initial {
            return Err(Error::InvalidGrid(format!("t_final {t_final} must exceed t_initial {t_initial}")));
        }
        Ok(Self { t_initial, t_final, n_slices })
    }

    /// A grid for drivers singular at t = 0.
    pub fn positive(t_initial: f64, t_final: f64, n_slices: usize) -> Result<Self> {
        if t_initial <= 0.0 {
            return Err(Error::InvalidGrid(format!("t_initial must be positive, got {t_initial}")));
        }
        Self::new(t_initial, t_final, n_slices)
    }

    /// `[0.1, 4]` with 100 slices.
    pub fn cosmology_default() -> Self {
        Self { t_initial: 0.1, t_final: 4.0, n_slices: 100 }
    }

    pub fn t_initial(&self) -> f64 {
        self.t_initial
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn n_slices(&self) -> usize {
        self.n_slices
    }

    pub fn dt(&self) -> f64 {
        (self.t_final - self.t_initial) / self.n_slices as f64
    }

    pub fn midpoint(&self, k: usize) -> f64 {
        self.t_initial + (k as f64 + 0.5) * self.dt()
    }

    /// End of slice `k`.
    pub fn slice_end(&self, k: usize) -> f64 {
        self.t_initial + (k + 1) as f64 * self.dt()
    }

    pub fn with_slices(&self, n_slices: usize) -> Result<Self> {
        Self::new(self.t_initial, self.t_final, n_slices)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrotterOrder {
    #[default]
    First,
    /// Symmetric (Strang) splitting.
    Second,
}

/// States after each slice, starting with the initial state at `t_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Statevector>,
}

impl Trajectory {
    fn start(t: f64, psi: &Statevector) -> Self {
        Self { times: vec![t], states: vec![psi.clone()] }
    }

    pub fn final_state(&self) -> &Statevector {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// Rows `t,index,re,im,prob`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "index", "re", "im", "prob"])?;
        for (t, s) in self.times.iter().zip(&self.states) {
            for (k, z) in s.amplitudes().iter().enumerate() {
                wr.write_record([
                    format!("{t:.16e}"),
                    k.to_string(),
                    format!("{:.16e}", z.re),
                    format!("{:.16e}", z.im),
                    format!("{:.16e}", z.norm_sqr()),
                ])?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

/// Descending |coefficient|, ties by string.
fn ordered_terms(p: &PauliSum) -> Vec<&PauliTerm> {
    let mut terms: Vec<&PauliTerm> = p.terms().iter().collect();
    terms.sort_by(|a, b| {
        b.coeff.abs().total_cmp(&a.coeff.abs()).then_with(|| a.string.to_string().cmp(&b.string.to_string()))
    });
    terms
}

/// Product-formula evolution: each slice applies `exp(−i c_j P_j dt)` for the
/// terms of `h(t_k)` at the slice midpoint.
pub fn trotter_trajectory(
    h: impl Fn(f64) -> Result<PauliSum>,
    grid: &TimeGrid,
    psi0: &Statevector,
    order: TrotterOrder,
) -> Result<Trajectory> {
    let mut traj = Trajectory::start(grid.t_initial, psi0);
    let mut psi = psi0.clone();
    let dt = grid.dt();
    for k in 0..grid.n_slices {
        let p = h(grid.midpoint(k))?;
        if p.n_qubits() != psi.n_qubits() {
            return Err(Error::DimensionMismatch { expected: psi.n_qubits(), found: p.n_qubits() });
        }
        let terms = ordered_terms(&p);
        match order {
            TrotterOrder::First => {
                for t in &terms {
                    psi.apply_pauli_rotation(&t.string, 2.0 * t.coeff * dt)?;
                }
            }
            TrotterOrder::Second => {
                for t in terms.iter().chain(terms.iter().rev()) {
                    psi.apply_pauli_rotation(&t.string, t.coeff * dt)?;
                }
            }
        }
        traj.times.push(grid.slice_end(k));
        traj.states.push(psi.clone());
    }
    Ok(traj)
}

/// First-order product-formula evolution; returns the final state.
pub fn trotter_evolve(h: impl Fn(f64) -> Result<PauliSum>, grid: &TimeGrid, psi0: &Statevector) -> Result<Statevector> {
    let traj = trotter_trajectory(h, grid, psi0, TrotterOrder::First)?;
    Ok(traj.final_state().clone())
}

/// Slice-exact evolution `Π_k exp(−i h(t_k) dt)`.
pub fn exact_trajectory(h: impl Fn(f64) -> Result<Operator>, grid: &TimeGrid, psi0: &Statevector) -> Result<Trajectory> {
    let mut traj = Trajectory::start(grid.t_initial, psi0);
    let mut amps = psi0.amplitudes().to_vec();
    let dt = grid.dt();
    for k in 0..grid.n_slices {
        let hk = h(grid.midpoint(k))?;
        if hk.dim() != amps.len() {
            return Err(Error::DimensionMismatch { expected: amps.len(), found: hk.dim() });
        }
        hk.ensure_hermitian(HERMITIAN_TOL)?;
        amps = expm(&hk, C64::new(0.0, -dt)).apply(&amps);
        traj.times.push(grid.slice_end(k));
        traj.states.push(Statevector::normalized(amps.clone())?);
    }
    Ok(traj)
}

pub fn exact_evolve(h: impl Fn(f64) -> Result<Operator>, grid: &TimeGrid, psi0: &Statevector) -> Result<Statevector> {
    let traj = exact_trajectory(h, grid, psi0)?;
    Ok(traj.final_state().clone())
}

/// Largest per-amplitude modulus of the difference.
pub fn max_amplitude_error(a: &Statevector, b: &Statevector) -> f64 {
    a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Free-particle kernel `√(1/2πiT)·exp(i(q_f − q_i)²/2T)`.
pub fn free_propagator(t: f64, q_i: f64, q_f: f64) -> Result<C64> {
    if t <= 0.0 {
        return Err(Error::Domain(format!("elapsed time must be positive, got {t}")));
    }
    let pref = (C64::new(0.0, 2.0 * PI * t)).inv().sqrt();
    Ok(pref * C64::new(0.0, (q_f - q_i).powi(2) / (2.0 * t)).exp())
}

/// Harmonic-oscillator kernel over elapsed time `t`.
pub fn sho_propagator(omega: f64, t: f64, q_i: f64, q_f: f64) -> Result<C64> {
    let s = (omega * t).sin();
    if s.abs() < 1e-12 {
        return Err(Error::Singularity(format!("caustic: sin(ωT) = {s:e}")));
    }
    let c = (omega * t).cos();
    let pref = (C64::new(omega, 0.0) / C64::new(0.0, 2.0 * PI * s)).sqrt();
    let phase = omega / (2.0 * s) * (c * (q_f * q_f + q_i * q_i) - 2.0 * q_i * q_f);
    Ok(pref * C64::new(0.0, phase).exp())
}

/// Two classical solutions tabulated at the endpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorInputs {
    pub u_i: C64,
    pub du_i: C64,
    pub v_i: C64,
    pub dv_i: C64,
    pub u_f: C64,
    pub du_f: C64,
    pub v_f: C64,
    pub dv_f: C64,
}

impl PropagatorInputs {
    pub fn wronskian_initial(&self) -> C64 {
        self.u_i * self.dv_i - self.v_i * self.du_i
    }

    pub fn wronskian_final(&self) -> C64 {
        self.u_f * self.dv_f - self.v_f * self.du_f
    }

    /// `u_i v_f − u_f v_i`, which the kernel formula takes to be 1.
    pub fn normalization(&self) -> C64 {
        self.u_i * self.v_f - self.u_f * self.v_i
    }

    /// `√(W/2πi)·exp[(i/2)(A q_f² + B q_i² − 2W q_i q_f)]`.
    pub fn kernel(&self, q_i: f64, q_f: f64) -> C64 {
        let w = self.wronskian_initial();
        let a = self.u_i * self.dv_f - self.v_i * self.du_f;
        let b = self.u_f * self.dv_i - self.v_f * self.du_i;
        let expo = (a * q_f * q_f + b * q_i * q_i - w * 2.0 * q_i * q_f) * C64::new(0.0, 0.5);
        (w / C64::new(0.0, 2.0 * PI)).sqrt() * expo.exp()
    }
}

/// Solutions `u = c·t^a`, `v = c·t^{1−a}` with
/// `a = ½(1 + √(4k² + 1))` and `c² = 1/(t_i^a t_f^{1−a} − t_f^a t_i^{1−a})`.
///
/// These satisfy `ü = (k²/t²)u`. For `t_i < t_f` the normalization constant
/// `c` is imaginary; the kernel depends on `c²` only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub k_squared: f64,
    pub t_i: f64,
    pub t_f: f64,
    pub a: f64,
    pub c_squared: f64,
}

impl PowerLaw {
    pub fn new(k_squared: f64, t_i: f64, t_f: f64) -> Result<Self> {
        let disc = 4.0 * k_squared + 1.0;
        if disc.is_nan() || disc < 0.0 {
            return Err(Error::Domain(format!("4k² + 1 must be non-negative, got {disc}")));
        }
        if !(t_i > 0.0 && t_f > 0.0) {
            return Err(Error::Domain(format!("times must be positive, got t_i={t_i}, t_f={t_f}")));
        }
        if t_i == t_f {
            return Err(Error::Domain("t_i and t_f must differ".into()));
        }
        let a = 0.5 * (1.0 + disc.sqrt());
        let d = t_i.powf(a) * t_f.powf(1.0 - a) - t_f.powf(a) * t_i.powf(1.0 - a);
        if d == 0.0 {
            return Err(Error::Singularity("degenerate solution pair".into()));
        }
        Ok(Self { k_squared, t_i, t_f, a, c_squared: 1.0 / d })
    }

    /// Principal square root of `c²`.
    pub fn c(&self) -> C64 {
        C64::new(self.c_squared, 0.0).sqrt()
    }

    pub fn u(&self, t: f64) -> (C64, C64) {
        let c = self.c();
        (c * t.powf(self.a), c * self.a * t.powf(self.a - 1.0))
    }

    pub fn v(&self, t: f64) -> (C64, C64) {
        let c = self.c();
        let b = 1.0 - self.a;
        (c * t.powf(b), c * b * t.powf(b - 1.0))
    }

    /// `c²(1 − 2a)`.
    pub fn wronskian(&self) -> f64 {
        self.c_squared * (1.0 - 2.0 * self.a)
    }

    pub fn inputs(&self) -> PropagatorInputs {
        let (u_i, du_i) = self.u(self.t_i);
        let (v_i, dv_i) = self.v(self.t_i);
        let (u_f, du_f) = self.u(self.t_f);
        let (v_f, dv_f) = self.v(self.t_f);
        PropagatorInputs { u_i, du_i, v_i, dv_i, u_f, du_f, v_f, dv_f }
    }
}

pub fn power_law_propagator(k_squared: f64, t_i: f64, t_f: f64, q_i: f64, q_f: f64) -> Result<C64> {
    Ok(PowerLaw::new(k_squared, t_i, t_f)?.inputs().kernel(q_i, q_f))
}
