//! Variational ground-state search with a hardware-efficient RY/CZ ansatz.

use std::cell::RefCell;
use std::io::Write;

use argmin::core::{CostFunction, Executor, Gradient, State, TerminationReason};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::neldermead::NelderMead;
use argmin::solver::quasinewton::BFGS;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{expectation, Circuit, Gate, Statevector};
use crate::error::{Error, Result};
use crate::operator::{C64, ZERO};
use crate::pauli::{PauliSum, IMAG_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    /// Number of CZ-chain + RY blocks after the first RY layer.
    pub depth: usize,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, depth: usize) -> Self {
        Self { n_qubits, depth }
    }

    pub fn n_params(&self) -> usize {
        self.n_qubits * (self.depth + 1)
    }
}

/// RY on every qubit, then `depth` × [CZ chain (0,1),(1,2),…; RY on every
/// qubit].
pub fn build_ansatz(spec: &AnsatzSpec) -> Circuit {
    let mut c = Circuit::new(spec.n_qubits);
    let ry_layer = |c: &mut Circuit| {
        for q in 0..spec.n_qubits {
            c.ry_param(q).expect("qubit in range");
        }
    };
    ry_layer(&mut c);
    for _ in 0..spec.depth {
        for q in 1..spec.n_qubits {
            c.push(Gate::Cz { a: q - 1, b: q }).expect("distinct qubits in range");
        }
        ry_layer(&mut c);
    }
    c
}

/// `⟨ψ(θ)|H|ψ(θ)⟩` with `ψ(θ) = ansatz(θ)|0…0⟩`.
pub fn energy(p: &PauliSum, spec: &AnsatzSpec, theta: &[f64]) -> Result<f64> {
    if p.n_qubits() != spec.n_qubits {
        return Err(Error::DimensionMismatch { expected: spec.n_qubits, found: p.n_qubits() });
    }
    let psi = build_ansatz(spec).apply(theta, &Statevector::zero(spec.n_qubits))?;
    expectation(p, &psi)
}

/// Pauli terms grouped by X mask; each group is a diagonal weight vector,
/// so an expectation costs one pass over the amplitudes per distinct mask.
struct GroupedSum {
    groups: Vec<(usize, Vec<C64>)>,
}

impl GroupedSum {
    fn new(p: &PauliSum) -> Self {
        let dim = 1usize << p.n_qubits();
        let mut groups: Vec<(usize, Vec<C64>)> = Vec::new();
        for t in p.terms() {
            let m = t.string.masks();
            let slot = match groups.iter().position(|(x, _)| *x == m.x) {
                Some(i) => i,
                None => {
                    groups.push((m.x, vec![ZERO; dim]));
                    groups.len() - 1
                }
            };
            for (k, d) in groups[slot].1.iter_mut().enumerate() {
                *d += m.phase(k) * t.coeff;
            }
        }
        Self { groups }
    }

    fn expectation(&self, amps: &[C64]) -> Result<f64> {
        let z: C64 = self
            .groups
            .iter()
            .map(|(x, d)| amps.iter().enumerate().map(|(k, a)| amps[k ^ x].conj() * d[k] * a).sum::<C64>())
            .sum();
        if z.im.abs() > IMAG_TOL {
            return Err(Error::ImaginaryExpectation { residue: z.im });
        }
        Ok(z.re)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeOptions {
    /// Total starts: the first is all zeros, the rest uniform in ±`init_spread`.
    pub restarts: usize,
    pub seed: u64,
    pub max_evals: usize,
    /// Stop when the energy changes by less than this over an iteration.
    pub tol: f64,
    pub fd_step: f64,
    pub init_spread: f64,
}

impl Default for VqeOptions {
    fn default() -> Self {
        Self { restarts: 5, seed: 0, max_evals: 5000, tol: 1e-8, fd_step: 1e-6, init_spread: 0.1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub eval_index: usize,
    pub energy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Bfgs,
    NelderMead,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub start: Vec<f64>,
    pub energy: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub best_energy: f64,
    pub best_params: Vec<f64>,
    /// Every energy evaluation of every restart, in restart order.
    pub trace: Vec<TracePoint>,
    pub evaluations: usize,
    /// Whether the restart that produced the best energy met the tolerance.
    pub converged: bool,
    pub restarts: Vec<RestartSummary>,
}

impl VqeResult {
    /// Running minimum of the trace.
    pub fn incumbent(&self) -> Vec<f64> {
        self.trace
            .iter()
            .scan(f64::INFINITY, |best, p| {
                *best = best.min(p.energy);
                Some(*best)
            })
            .collect()
    }

    /// `eval_index,energy` rows.
    pub fn write_trace_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["eval_index", "energy"])?;
        for p in &self.trace {
            wr.write_record([p.eval_index.to_string(), format!("{:.16e}", p.energy)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

struct Log {
    energies: Vec<f64>,
    best: (f64, Vec<f64>),
    fault: Option<Error>,
}

/// One restart's objective; evaluations past the budget fail so the
/// optimizer stops with the best point seen so far.
struct Problem<'a> {
    circuit: &'a Circuit,
    sum: &'a GroupedSum,
    n_qubits: usize,
    budget: usize,
    fd_step: f64,
    log: RefCell<Log>,
}

const BUDGET_MSG: &str = "evaluation budget exhausted";

impl Problem<'_> {
    fn eval(&self, theta: &[f64]) -> std::result::Result<f64, argmin::core::Error> {
        let mut log = self.log.borrow_mut();
        if log.energies.len() >= self.budget {
            return Err(argmin::core::Error::msg(BUDGET_MSG));
        }
        let mut amps = vec![ZERO; 1 << self.n_qubits];
        amps[0] = C64::new(1.0, 0.0);
        let e = self.circuit.apply_raw(theta, &mut amps).and_then(|_| self.sum.expectation(&amps));
        let e = match e {
            Ok(e) => e,
            Err(err) => {
                let msg = err.to_string();
                log.fault = Some(err);
                return Err(argmin::core::Error::msg(msg));
            }
        };
        log.energies.push(e);
        if e < log.best.0 {
            log.best = (e, theta.to_vec());
        }
        Ok(e)
    }

    fn exhausted(&self) -> bool {
        self.log.borrow().energies.len() >= self.budget
    }
}

impl CostFunction for &Problem<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        self.eval(p)
    }
}

impl Gradient for &Problem<'_> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, p: &Self::Param) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        let h = self.fd_step;
        let mut x = p.clone();
        let mut g = vec![0.0; p.len()];
        for i in 0..p.len() {
            x[i] = p[i] + h;
            let up = self.eval(&x)?;
            x[i] = p[i] - h;
            let down = self.eval(&x)?;
            x[i] = p[i];
            g[i] = (up - down) / (2.0 * h);
        }
        Ok(g)
    }
}

fn converged(reason: Option<&TerminationReason>) -> bool {
    matches!(reason, Some(TerminationReason::SolverConverged) | Some(TerminationReason::TargetCostReached))
}

fn run_bfgs(problem: &Problem<'_>, start: &[f64], tol: f64) -> std::result::Result<bool, argmin::core::Error> {
    let n = start.len();
    let eye: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let solver = BFGS::new(MoreThuenteLineSearch::new()).with_tolerance_cost(tol)?.with_tolerance_grad(1e-7)?;
    let res = Executor::new(problem, solver)
        .configure(|s| s.param(start.to_vec()).inv_hessian(eye).max_iters(u64::MAX))
        .run()?;
    Ok(converged(res.state().get_termination_reason()))
}

fn run_nelder_mead(problem: &Problem<'_>, start: &[f64], tol: f64) -> std::result::Result<bool, argmin::core::Error> {
    let mut simplex = vec![start.to_vec()];
    for i in 0..start.len() {
        let mut v = start.to_vec();
        v[i] += 0.1;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex).with_sd_tolerance(tol)?;
    let res = Executor::new(problem, solver).configure(|s| s.max_iters(u64::MAX)).run()?;
    Ok(converged(res.state().get_termination_reason()))
}

fn restart(
    circuit: &Circuit,
    sum: &GroupedSum,
    spec: &AnsatzSpec,
    opts: &VqeOptions,
    start: Vec<f64>,
) -> Result<(RestartSummary, Vec<f64>, Vec<f64>)> {
    let problem = Problem {
        circuit,
        sum,
        n_qubits: spec.n_qubits,
        budget: opts.max_evals,
        fd_step: opts.fd_step,
        log: RefCell::new(Log { energies: Vec::new(), best: (f64::INFINITY, start.clone()), fault: None }),
    };
    let mut method = Method::Bfgs;
    let mut ok = run_bfgs(&problem, &start, opts.tol);
    if ok.is_err() && !problem.exhausted() && problem.log.borrow().fault.is_none() {
        // line-search breakdown: continue derivative-free from the incumbent
        method = Method::NelderMead;
        let from = problem.log.borrow().best.1.clone();
        ok = run_nelder_mead(&problem, &from, opts.tol);
    }
    let log = problem.log.into_inner();
    if let Some(fault) = log.fault {
        return Err(fault);
    }
    if log.energies.is_empty() {
        return Err(Error::Optimizer("no energy evaluations were made".into()));
    }
    let summary = RestartSummary {
        start,
        energy: log.best.0,
        evaluations: log.energies.len(),
        converged: ok.unwrap_or(false),
        method,
    };
    Ok((summary, log.best.1, log.energies))
}

/// Best-of-restarts local minimization of [`energy`]. Restarts run in
/// parallel; the result depends only on `(p, spec, opts)`.
pub fn minimize(p: &PauliSum, spec: &AnsatzSpec, opts: &VqeOptions) -> Result<VqeResult> {
    if p.n_qubits() != spec.n_qubits {
        return Err(Error::DimensionMismatch { expected: spec.n_qubits, found: p.n_qubits() });
    }
    if opts.restarts == 0 || opts.max_evals == 0 {
        return Err(Error::InvalidParameter("restarts and max_evals must be positive".into()));
    }
    let circuit = build_ansatz(spec);
    let sum = GroupedSum::new(p);
    let n = spec.n_params();
    let starts: Vec<Vec<f64>> = (0..opts.restarts)
        .map(|r| {
            if r == 0 {
                return vec![0.0; n];
            }
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(r as u64);
            (0..n).map(|_| rng.random_range(-opts.init_spread..=opts.init_spread)).collect()
        })
        .collect();
    let runs: Vec<_> = starts
        .into_par_iter()
        .map(|s| restart(&circuit, &sum, spec, opts, s))
        .collect::<Result<Vec<_>>>()?;

    let mut trace = Vec::new();
    let mut summaries = Vec::new();
    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    for (summary, params, energies) in runs {
        let offset = trace.len();
        trace.extend(energies.into_iter().enumerate().map(|(i, energy)| TracePoint { eval_index: offset + i, energy }));
        if best.as_ref().is_none_or(|b| summary.energy < b.0) {
            best = Some((summary.energy, params, summary.converged));
        }
        summaries.push(summary);
    }
    let (best_energy, best_params, converged) = best.expect("at least one restart");
    Ok(VqeResult { best_energy, best_params, evaluations: trace.len(), trace, converged, restarts: summaries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::eigh;
    use crate::pauli::reconstruct;
    use std::f64::consts::PI;

    fn random_sum(rng: &mut ChaCha8Rng, n: usize, terms: usize) -> PauliSum {
        let letters = ['I', 'X', 'Y', 'Z'];
        let labels: Vec<(f64, String)> = (0..terms)
            .map(|_| (rng.random_range(-1.0..1.0), (0..n).map(|_| letters[rng.random_range(0..4)]).collect()))
            .collect();
        let refs: Vec<(f64, &str)> = labels.iter().map(|(c, s)| (*c, s.as_str())).collect();
        PauliSum::from_labels(&refs).unwrap()
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(build_ansatz(&AnsatzSpec::new(9, 3)).n_params(), 36);
        assert_eq!(build_ansatz(&AnsatzSpec::new(8, 3)).n_params(), 32);
        assert_eq!(AnsatzSpec::new(8, 3).n_params(), 32);
        let c = build_ansatz(&AnsatzSpec::new(4, 2));
        let cz = c.gates().iter().filter(|g| matches!(g, Gate::Cz { .. })).count();
        assert_eq!(cz, 6);
    }

    #[test]
    fn zero_angles_leave_vacuum() {
        let spec = AnsatzSpec::new(3, 0);
        let out = build_ansatz(&spec).apply(&[0.0; 3], &Statevector::zero(3)).unwrap();
        assert_eq!(out, Statevector::zero(3));
    }

    #[test]
    fn energy_examples() {
        let zzz = PauliSum::from_labels(&[(1.0, "ZZZ")]).unwrap();
        assert!((energy(&zzz, &AnsatzSpec::new(3, 2), &[0.0; 9]).unwrap() - 1.0).abs() < 1e-15);
        let z = PauliSum::from_labels(&[(1.0, "Z")]).unwrap();
        assert!((energy(&z, &AnsatzSpec::new(1, 0), &[PI]).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(
            energy(&z, &AnsatzSpec::new(1, 0), &[PI, 0.0]),
            Err(Error::ParameterCount { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn grouped_expectation_matches_term_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = random_sum(&mut rng, 4, 25);
        let g = GroupedSum::new(&p);
        let spec = AnsatzSpec::new(4, 2);
        let c = build_ansatz(&spec);
        for _ in 0..5 {
            let theta: Vec<f64> = (0..spec.n_params()).map(|_| rng.random_range(-PI..PI)).collect();
            let psi = c.apply(&theta, &Statevector::zero(4)).unwrap();
            let a = g.expectation(psi.amplitudes()).unwrap();
            let b = expectation(&p, &psi).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn variational_bound_on_random_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = random_sum(&mut rng, 3, 12);
        let e0 = eigh(&reconstruct(&p)).unwrap().min();
        let spec = AnsatzSpec::new(3, 3);
        for _ in 0..200 {
            let theta: Vec<f64> = (0..spec.n_params()).map(|_| rng.random_range(-PI..PI)).collect();
            assert!(energy(&p, &spec, &theta).unwrap() >= e0 - 1e-9);
        }
    }

    #[test]
    fn single_qubit_z_reaches_minus_one() {
        let z = PauliSum::from_labels(&[(1.0, "Z")]).unwrap();
        let opts = VqeOptions { restarts: 3, ..Default::default() };
        let r = minimize(&z, &AnsatzSpec::new(1, 0), &opts).unwrap();
        assert!((r.best_energy + 1.0).abs() < 1e-6, "{}", r.best_energy);
    }

    #[test]
    fn trace_invariants_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = random_sum(&mut rng, 3, 10);
        let e0 = eigh(&reconstruct(&p)).unwrap().min();
        let spec = AnsatzSpec::new(3, 2);
        let opts = VqeOptions { seed: 99, ..Default::default() };
        let a = minimize(&p, &spec, &opts).unwrap();
        let b = minimize(&p, &spec, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.trace.iter().all(|t| t.energy >= e0 - 1e-9));
        let inc = a.incumbent();
        assert!(inc.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*inc.last().unwrap(), a.best_energy);
        assert_eq!(a.evaluations, a.trace.len());
        assert_eq!(a.restarts.len(), 5);
        assert!(a.restarts[0].start.iter().all(|&x| x == 0.0));
        assert!(a.restarts[1..].iter().all(|r| r.start.iter().all(|x| x.abs() <= 0.1)));
        assert!((energy(&p, &spec, &a.best_params).unwrap() - a.best_energy).abs() < 1e-12);
        let c = minimize(&p, &spec, &VqeOptions { seed: 100, ..Default::default() }).unwrap();
        assert_ne!(a.restarts[1].start, c.restarts[1].start);
    }

    #[test]
    fn budget_exhaustion_reports_best_so_far() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_sum(&mut rng, 3, 10);
        let opts = VqeOptions { restarts: 2, max_evals: 20, ..Default::default() };
        let r = minimize(&p, &AnsatzSpec::new(3, 2), &opts).unwrap();
        assert!(!r.converged);
        assert!(r.restarts.iter().all(|s| s.evaluations == 20 && !s.converged));
        assert_eq!(r.evaluations, 40);
    }

    #[test]
    fn trace_csv_shape() {
        let z = PauliSum::from_labels(&[(1.0, "Z")]).unwrap();
        let opts = VqeOptions { restarts: 1, max_evals: 4, ..Default::default() };
        let r = minimize(&z, &AnsatzSpec::new(1, 0), &opts).unwrap();
        let mut buf = Vec::new();
        r.write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "eval_index,energy");
        assert_eq!(lines.len(), 1 + r.evaluations);
        assert!(lines[1].starts_with("0,1.0000000000000000e0"));
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let z = PauliSum::from_labels(&[(1.0, "ZZ")]).unwrap();
        assert!(minimize(&z, &AnsatzSpec::new(3, 1), &VqeOptions::default()).is_err());
        let opts = VqeOptions { restarts: 0, ..Default::default() };
        assert!(minimize(&z, &AnsatzSpec::new(2, 1), &opts).is_err());
    }
}
