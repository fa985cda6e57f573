use std::io::Write;
use std::path::Path;

use ncmatrix::brst::{build_brst, physical_zero_modes, BrstConfig};
use ncmatrix::circuit::Statevector;
use ncmatrix::eoh::{exact_trajectory, max_amplitude_error, trotter_trajectory, TimeGrid, TrotterOrder};
use ncmatrix::model::{
    build_h_cosmo, build_h_sho, build_model, gauge_invariant_basis, gauss_bosonic, physical_states, BasisKind,
    BuildParams, DeformationParams, ModelId,
};
use ncmatrix::pauli::qubits_for_dim;
use ncmatrix::vqe::{minimize, AnsatzSpec, RestartSummary, VqeOptions};
use ncmatrix::{decompose, eigh, pad_to_qubits, reconstruct, Operator, PauliSum, C64};
use serde::Serialize;
use serde_json::Value;

use crate::args::{
    BrstArgs, BuildArgs, DecomposeArgs, Driving, EohArgs, Format, Order, PhysicalStatesArgs, SourceArgs, VqeArgs,
};
use crate::error::CliError;
use crate::output::{create, emit, emit_json, ComplexVec, SCHEMA};

const HERMITIAN_TOL: f64 = 1e-10;
const GAUSS_TOL: f64 = 1e-10;
const LAPLACIAN_TOL: f64 = 1e-12;
const ZERO_MODE_TOL: f64 = 1e-8;

fn require_levels(n: usize) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::Usage(format!("--n must be at least 2, got {n}")));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum SourceInfo {
    Model { model: ModelId, params: BuildParams },
    File { file: String },
}

enum Loaded {
    Operator(Operator),
    Pauli(PauliSum),
}

fn load_file(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut v: Value = serde_json::from_str(&text)?;
    if let Some(schema) = v.get("schema") {
        if schema.as_u64() != Some(u64::from(SCHEMA)) {
            return Err(CliError::Usage(format!("unsupported schema {schema} in {}", path.display())));
        }
    }
    match v.get("kind").and_then(Value::as_str) {
        Some("operator") => Ok(Loaded::Operator(serde_json::from_value(v["operator"].take())?)),
        Some("pauli-sum") => Ok(Loaded::Pauli(serde_json::from_value(v["pauli_sum"].take())?)),
        Some(other) => Err(CliError::Usage(format!("{} holds a {other:?} document, not an operator", path.display()))),
        None if v.get("terms").is_some() => Ok(Loaded::Pauli(serde_json::from_value(v)?)),
        None => Ok(Loaded::Operator(serde_json::from_value(v)?)),
    }
}

fn load_source(src: &SourceArgs) -> Result<(SourceInfo, Loaded), CliError> {
    match (&src.model, &src.input) {
        (Some(model), _) => {
            let params = src.model_args.params()?;
            let op = build_model(*model, &params)?;
            Ok((SourceInfo::Model { model: *model, params }, Loaded::Operator(op)))
        }
        (None, Some(path)) => Ok((SourceInfo::File { file: path.display().to_string() }, load_file(path)?)),
        (None, None) => Err(CliError::Usage("give a model id or --input".into())),
    }
}

/// Hermiticity check, zero padding to a power of two, then decomposition.
fn operator_to_pauli(op: &Operator, threshold: f64) -> Result<(Operator, PauliSum), CliError> {
    op.ensure_hermitian(HERMITIAN_TOL)?;
    let padded = if op.dim().is_power_of_two() { op.clone() } else { pad_to_qubits(op, qubits_for_dim(op.dim()))? };
    let p = decompose(&padded, threshold)?;
    Ok((padded, p))
}

pub fn build(args: &BuildArgs) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: u32,
        kind: &'static str,
        model: ModelId,
        params: &'a BuildParams,
        dim: usize,
        hermitian: bool,
        max_asymmetry: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        min_eigenvalue: Option<f64>,
        operator: &'a Operator,
    }
    let params = args.model_args.params()?;
    let op = build_model(args.model, &params)?;
    let max_asymmetry = op.max_asymmetry();
    let hermitian = op.is_hermitian(HERMITIAN_TOL);
    let min_eigenvalue = if args.min_eig { Some(eigh(&op)?.min()) } else { None };
    eprintln!(
        "{}: dim {}, {} (max asymmetry {max_asymmetry:e}){}",
        args.model,
        op.dim(),
        if hermitian { "Hermitian" } else { "not Hermitian" },
        min_eigenvalue.map(|e| format!(", min eigenvalue {e:.17e}")).unwrap_or_default()
    );
    emit_json(
        args.output.as_deref(),
        &Doc {
            schema: SCHEMA,
            kind: "operator",
            model: args.model,
            params: &params,
            dim: op.dim(),
            hermitian,
            max_asymmetry,
            min_eigenvalue,
            operator: &op,
        },
    )
}

pub fn decompose_cmd(args: &DecomposeArgs) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: u32,
        kind: &'static str,
        source: &'a SourceInfo,
        source_dim: usize,
        n_qubits: usize,
        threshold: f64,
        n_terms: usize,
        pauli_sum: &'a PauliSum,
    }
    if args.threshold.is_nan() || args.threshold < 0.0 {
        return Err(CliError::Usage(format!("--threshold must be non-negative, got {}", args.threshold)));
    }
    let (source, loaded) = load_source(&args.source)?;
    let op = match loaded {
        Loaded::Operator(op) => op,
        Loaded::Pauli(_) => return Err(CliError::Usage("input is already a Pauli sum".into())),
    };
    let (_, p) = operator_to_pauli(&op, args.threshold)?;
    eprintln!("{} terms on {} qubits", p.len(), p.n_qubits());
    match args.format {
        Format::Json => emit_json(
            args.output.as_deref(),
            &Doc {
                schema: SCHEMA,
                kind: "pauli-sum",
                source: &source,
                source_dim: op.dim(),
                n_qubits: p.n_qubits(),
                threshold: args.threshold,
                n_terms: p.len(),
                pauli_sum: &p,
            },
        ),
        Format::Csv => {
            let mut buf = Vec::new();
            p.write_csv(&mut buf)?;
            emit(args.output.as_deref(), &buf)
        }
    }
}

pub fn vqe(args: &VqeArgs) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: u32,
        kind: &'static str,
        source: &'a SourceInfo,
        n_qubits: usize,
        n_terms: usize,
        depth: usize,
        n_params: usize,
        options: &'a VqeOptions,
        best_energy: f64,
        exact_energy: f64,
        gap: f64,
        converged: bool,
        evaluations: usize,
        best_params: &'a [f64],
        restarts: &'a [RestartSummary],
    }
    let opts = args.options()?;
    let (source, loaded) = load_source(&args.source)?;
    let (dense, p) = match loaded {
        Loaded::Operator(op) => operator_to_pauli(&op, args.threshold)?,
        Loaded::Pauli(p) => (reconstruct(&p), p),
    };
    let spec = AnsatzSpec::new(p.n_qubits(), args.depth);
    let exact_energy = eigh(&dense)?.min();
    let result = minimize(&p, &spec, &opts)?;
    if let Some(path) = &args.trace {
        let mut w = create(path)?;
        result.write_trace_csv(&mut w)?;
        w.flush()?;
    }
    let gap = result.best_energy - exact_energy;
    eprintln!(
        "VQE {:.17e} (exact {exact_energy:.17e}, gap {gap:.3e}) after {} evaluations",
        result.best_energy, result.evaluations
    );
    emit_json(
        args.output.as_deref(),
        &Doc {
            schema: SCHEMA,
            kind: "vqe-result",
            source: &source,
            n_qubits: p.n_qubits(),
            n_terms: p.len(),
            depth: args.depth,
            n_params: spec.n_params(),
            options: &opts,
            best_energy: result.best_energy,
            exact_energy,
            gap,
            converged: result.converged,
            evaluations: result.evaluations,
            best_params: &result.best_params,
            restarts: &result.restarts,
        },
    )
}

fn initial_state(spec: &str, h_initial: &Operator) -> Result<Statevector, CliError> {
    let dim = h_initial.dim();
    if !dim.is_power_of_two() {
        return Err(CliError::Usage(format!("state dimension {dim} is not a power of two")));
    }
    let n_qubits = dim.trailing_zeros() as usize;
    if let Some(k) = spec.strip_prefix("basis:") {
        let k: usize = k.parse().map_err(|_| CliError::Usage(format!("bad basis index in {spec:?}")))?;
        if k >= dim {
            return Err(CliError::Usage(format!("basis index {k} out of range for dimension {dim}")));
        }
        return Ok(Statevector::basis(n_qubits, k));
    }
    match spec {
        "uniform" => Ok(Statevector::normalized(vec![C64::new(1.0, 0.0); dim])?),
        "ground" => Ok(Statevector::from_amplitudes(eigh(h_initial)?.vector(0))?),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("--initial {path:?} is not a state spec or readable file: {e}")))?;
            let psi: Statevector = serde_json::from_str(&text)?;
            if psi.dim() != dim {
                return Err(CliError::Usage(format!("initial state has dimension {}, expected {dim}", psi.dim())));
            }
            Ok(psi)
        }
    }
}

#[derive(Serialize)]
struct StateDoc {
    #[serde(flatten)]
    amplitudes: ComplexVec,
    prob: Vec<f64>,
}

impl From<&Statevector> for StateDoc {
    fn from(s: &Statevector) -> Self {
        Self { amplitudes: s.amplitudes().into(), prob: s.probabilities() }
    }
}

pub fn eoh(args: &EohArgs) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Grid {
        t_initial: f64,
        t_final: f64,
        n_slices: usize,
        dt: f64,
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: u32,
        kind: &'static str,
        hamiltonian: &'static str,
        levels: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        deformation: Option<&'a DeformationParams>,
        #[serde(skip_serializing_if = "Option::is_none")]
        omega: Option<f64>,
        order: &'static str,
        grid: Grid,
        initial: &'a str,
        initial_state: StateDoc,
        trotter: StateDoc,
        exact: StateDoc,
        deviation: Vec<f64>,
        max_deviation: f64,
    }
    require_levels(args.n)?;
    let n = args.n;
    let deformation = args.deformation.params()?;
    let grid = match args.hamiltonian {
        Driving::Cosmo => TimeGrid::positive(args.t_i, args.t_f, args.slices)?,
        Driving::Sho | Driving::Zero => TimeGrid::new(args.t_i, args.t_f, args.slices)?,
    };
    let sho = build_h_sho(args.omega, n);
    let zero = Operator::zeros(n);
    let h = |t: f64| -> ncmatrix::Result<Operator> {
        match args.hamiltonian {
            Driving::Cosmo => build_h_cosmo(t, &deformation, n),
            Driving::Sho => Ok(sho.clone()),
            Driving::Zero => Ok(zero.clone()),
        }
    };
    let psi0 = initial_state(&args.initial, &h(grid.t_initial())?)?;
    let order = match args.order {
        Order::First => TrotterOrder::First,
        Order::Second => TrotterOrder::Second,
    };
    let trotter = trotter_trajectory(|t| decompose(&h(t)?, ncmatrix::pauli::DEFAULT_THRESHOLD), &grid, &psi0, order)?;
    let exact = exact_trajectory(h, &grid, &psi0)?;
    for (path, traj) in [(&args.snapshots, &trotter), (&args.exact_snapshots, &exact)] {
        if let Some(path) = path {
            let mut w = create(path)?;
            traj.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    let (a, b) = (trotter.final_state(), exact.final_state());
    let deviation: Vec<f64> = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).collect();
    let max_deviation = max_amplitude_error(a, b);
    eprintln!("max |trotter - exact| = {max_deviation:.3e} over {} slices", grid.n_slices());
    emit_json(
        args.output.as_deref(),
        &Doc {
            schema: SCHEMA,
            kind: "eoh-result",
            hamiltonian: match args.hamiltonian {
                Driving::Cosmo => "cosmo",
                Driving::Sho => "sho",
                Driving::Zero => "zero",
            },
            levels: n,
            deformation: (args.hamiltonian == Driving::Cosmo).then_some(&deformation),
            omega: (args.hamiltonian == Driving::Sho).then_some(args.omega),
            order: match args.order {
                Order::First => "first",
                Order::Second => "second",
            },
            grid: Grid { t_initial: grid.t_initial(), t_final: grid.t_final(), n_slices: grid.n_slices(), dt: grid.dt() },
            initial: &args.initial,
            initial_state: (&psi0).into(),
            trotter: a.into(),
            exact: b.into(),
            deviation,
            max_deviation,
        },
    )?;
    match args.tolerance {
        Some(tol) if max_deviation.is_nan() || max_deviation > tol => Err(CliError::Numerical(format!(
            "max |trotter - exact| = {max_deviation:e} exceeds tolerance {tol:e}"
        ))),
        _ => Ok(()),
    }
}

pub fn brst(args: &BrstArgs) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Mode {
        residual: f64,
        #[serde(flatten)]
        amplitudes: ComplexVec,
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        schema: u32,
        kind: &'static str,
        config: &'a BrstConfig,
        dim: usize,
        padded_qubits: usize,
        nilpotency_global_max: f64,
        nilpotency_safe_max: f64,
        laplacian_min_eigenvalue: f64,
        n_zero_modes: usize,
        max_zero_mode_residual: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        zero_modes: Option<Vec<Mode>>,
    }
    require_levels(args.n)?;
    if !args.g.is_finite() {
        return Err(CliError::Usage(format!("--g must be finite, got {}", args.g)));
    }
    let cfg = BrstConfig::new(args.n, args.g).with_ghosts(args.ghosts.into());
    let ops = build_brst(&cfg)?;
    let lmin = eigh(&ops.q_l)?.min();
    let modes = physical_zero_modes(&ops.omega)?;
    let worst = modes.residuals.iter().copied().fold(0.0, f64::max);
    eprintln!(
        "dim {}, |Ω²| max {:.3e} (safe subspace {:.3e}), λ_min(Q_L) {lmin:.3e}, {} zero modes",
        cfg.dim(),
        ops.nilpotency.global_max,
        ops.nilpotency.safe_max,
        modes.len()
    );
    emit_json(
        args.output.as_deref(),
        &Doc {
            schema: SCHEMA,
            kind: "brst-report",
            config: &cfg,
            dim: cfg.dim(),
            padded_qubits: cfg.padded_qubits(),
            nilpotency_global_max: ops.nilpotency.global_max,
            nilpotency_safe_max: ops.nilpotency.safe_max,
            laplacian_min_eigenvalue: lmin,
            n_zero_modes: modes.len(),
            max_zero_mode_residual: worst,
            zero_modes: args.zero_modes.then(|| {
                modes
                    .vectors
                    .iter()
                    .zip(&modes.residuals)
                    .map(|(v, &residual)| Mode { residual, amplitudes: v.as_slice().into() })
                    .collect()
            }),
        },
    )?;
    if lmin.abs() > LAPLACIAN_TOL {
        return Err(CliError::Numerical(format!("λ_min(Q_L) = {lmin:e} is outside ±{LAPLACIAN_TOL:e}")));
    }
    if worst > ZERO_MODE_TOL {
        return Err(CliError::Numerical(format!("zero-mode residual {worst:e} exceeds {ZERO_MODE_TOL:e}")));
    }
    Ok(())
}

pub fn physical_states_cmd(args: &PhysicalStatesArgs) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct State {
        index: usize,
        gauss_residuals: [f64; 3],
        gauge_invariant: bool,
        #[serde(flatten)]
        amplitudes: ComplexVec,
    }
    #[derive(Serialize)]
    struct Doc {
        schema: u32,
        kind: &'static str,
        levels: usize,
        dim: usize,
        gauge_invariant_dim: usize,
        states: Vec<State>,
    }
    require_levels(args.n)?;
    let gauss = gauss_bosonic(BasisKind::oscillator(args.n))?;
    let kernel = gauge_invariant_basis(&gauss, GAUSS_TOL)?;
    let states: Vec<State> = physical_states(args.n)?
        .iter()
        .enumerate()
        .map(|(index, psi)| {
            let gauss_residuals = gauss.each_ref().map(|g| norm(&g.apply(psi.amplitudes())));
            State {
                index,
                gauss_residuals,
                gauge_invariant: gauss_residuals.iter().all(|&r| r <= GAUSS_TOL),
                amplitudes: psi.amplitudes().into(),
            }
        })
        .collect();
    eprintln!(
        "{} physical states, {} exactly gauge invariant; kernel dimension {}",
        states.len(),
        states.iter().filter(|s| s.gauge_invariant).count(),
        kernel.len()
    );
    emit_json(
        args.output.as_deref(),
        &Doc {
            schema: SCHEMA,
            kind: "physical-states",
            levels: args.n,
            dim: args.n.pow(3),
            gauge_invariant_dim: kernel.len(),
            states,
        },
    )
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
