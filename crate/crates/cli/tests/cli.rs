use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncmatrix")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_osc_echoes_dimension_and_hermiticity() {
    let out = run(&["build", "osc", "--g", "0.1"]);
    let doc = json(&out);
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["kind"], "operator");
    assert_eq!(doc["dim"], 512);
    assert_eq!(doc["hermitian"], true);
    assert_eq!(doc["operator"]["re"].as_array().unwrap().len(), 512 * 512);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("dim 512") && stderr.contains("Hermitian"), "{stderr}");
}

#[test]
fn free_osc_ground_energy_is_zero() {
    let doc = json(&run(&["build", "osc", "--g", "0", "--min-eig"]));
    assert!(f(&doc["min_eigenvalue"]).abs() < 1e-12);
}

#[test]
fn cosmo_build_then_decompose() {
    let dir = TempDir::new().unwrap();
    let op = dir.path().join("h.json");
    let out = run(&["build", "cosmo", "--t", "2", "--ksq", "0.25", "--n", "4", "-o", path_str(&op)]);
    assert!(out.status.success());
    assert_eq!(read_json(&op)["dim"], 4);
    let doc = json(&run(&["decompose", "--input", path_str(&op)]));
    assert_eq!(doc["kind"], "pauli-sum");
    assert_eq!(doc["n_qubits"], 2);
    let terms = doc["pauli_sum"]["terms"].as_array().unwrap();
    let coeff = |s: &str| terms.iter().find(|t| t["string"] == s).map(|t| f(&t["coeff"])).unwrap_or(0.0);
    assert!((coeff("IX") + 1.0).abs() < 1e-12);
    assert!((coeff("ZZ") - 0.015625).abs() < 1e-12);
}

#[test]
fn decompose_csv_has_header_and_term_rows() {
    let out = run(&["decompose", "fd", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("string,coeff"));
    assert_eq!(lines.count(), 28);
}

#[test]
fn floats_are_printed_with_17_significant_digits() {
    let out = run(&["build", "cosmo", "--t", "2", "--n", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let doc: Value = serde_json::from_str(&text).unwrap();
    let g = f(&doc["params"]["g"]);
    assert_eq!(g, 0.1);
    assert!(text.contains("\"g\":1.0000000000000001e-1"), "{text}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["build", "nope"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["build", "cosmo", "--t", "0"]).status.code(), Some(2));
    assert_eq!(run(&["build", "osc", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["eoh", "--t-i", "0"]).status.code(), Some(2));
    assert_eq!(run(&["eoh", "--t-i", "2", "--t-f", "1"]).status.code(), Some(2));
    assert_eq!(run(&["eoh", "--initial", "basis:9"]).status.code(), Some(2));
    assert_eq!(run(&["brst", "--n", "1"]).status.code(), Some(2));
    assert_eq!(run(&["vqe", "--input", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn help_exits_0() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

fn write_pauli(dir: &TempDir, body: &str) -> String {
    let p = dir.path().join("p.json");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn vqe_single_qubit_z() {
    let dir = TempDir::new().unwrap();
    let input = write_pauli(&dir, r#"{"n_qubits":1,"terms":[{"coeff":1.0,"string":"Z"}]}"#);
    let trace = dir.path().join("trace.csv");
    let doc = json(&run(&["vqe", "--input", &input, "--depth", "1", "--trace", path_str(&trace)]));
    assert_eq!(doc["kind"], "vqe-result");
    assert!((f(&doc["best_energy"]) + 1.0).abs() < 1e-6);
    assert!((f(&doc["exact_energy"]) + 1.0).abs() < 1e-12);
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("eval_index,energy"));
    let rows: Vec<(usize, f64)> = lines
        .map(|l| {
            let (i, e) = l.split_once(',').unwrap();
            (i.parse().unwrap(), e.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len() as u64, doc["evaluations"].as_u64().unwrap());
    assert!(rows.iter().enumerate().all(|(k, &(i, _))| i == k));
    assert!(rows.iter().all(|&(_, e)| e >= -1.0 - 1e-9));
}

#[test]
fn vqe_rejects_non_hermitian_input() {
    let dir = TempDir::new().unwrap();
    let input = write_pauli(&dir, r#"{"dim":2,"re":[0.0,1.0,0.0,0.0],"im":[0.0,0.0,0.0,0.0]}"#);
    let out = run(&["vqe", "--input", &input]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn vqe_is_deterministic_for_fixed_seed() {
    let args = ["vqe", "cosmo", "--n", "4", "--t", "1", "--seed", "7", "--restarts", "3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn vqe_osc_reaches_exact_discrete_energy() {
    let doc = json(&run(&["vqe", "osc", "--g", "0.1", "--depth", "3"]));
    assert_eq!(doc["n_qubits"], 9);
    assert!((f(&doc["exact_energy"]) + 0.005).abs() < 5e-4);
    assert!((f(&doc["best_energy"]) - f(&doc["exact_energy"])).abs() <= 0.05);
    assert!(f(&doc["best_energy"]) >= f(&doc["exact_energy"]) - 1e-9);
}

#[test]
fn vqe_pads_brst_laplacian() {
    let doc = json(&run(&["vqe", "brst-unitary", "--n", "3"]));
    assert_eq!(doc["n_qubits"], 8);
    assert!(f(&doc["best_energy"]) <= 1e-3);
}

#[test]
fn eoh_zero_hamiltonian_keeps_initial_state() {
    let doc = json(&run(&["eoh", "--hamiltonian", "zero", "--initial", "uniform"]));
    assert_eq!(doc["trotter"]["re"], doc["initial_state"]["re"]);
    assert_eq!(doc["exact"]["re"], doc["initial_state"]["re"]);
    assert_eq!(f(&doc["max_deviation"]), 0.0);
}

#[test]
fn eoh_sho_writes_both_snapshot_tables() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("trotter.csv");
    let b = dir.path().join("exact.csv");
    let doc = json(&run(&[
        "eoh",
        "--hamiltonian",
        "sho",
        "--omega",
        "1",
        "--t-i",
        "0",
        "--t-f",
        "2",
        "--slices",
        "50",
        "--snapshots",
        path_str(&a),
        "--exact-snapshots",
        path_str(&b),
    ]));
    for p in [&a, &b] {
        let text = std::fs::read_to_string(p).unwrap();
        assert!(text.starts_with("t,index,re,im,prob\n"));
        assert_eq!(text.lines().count(), 1 + 51 * 4);
    }
    let dev: Vec<f64> = doc["deviation"].as_array().unwrap().iter().map(f).collect();
    assert_eq!(dev.iter().cloned().fold(0.0, f64::max), f(&doc["max_deviation"]));
    let prob: f64 = doc["exact"]["prob"].as_array().unwrap().iter().map(f).sum();
    assert!((prob - 1.0).abs() < 1e-12);
}

#[test]
fn eoh_tolerance_violation_exits_3() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("final.json");
    let out = run(&["eoh", "--tolerance", "1e-9", "-o", path_str(&out_path)]);
    assert_eq!(out.status.code(), Some(3));
    let doc = read_json(&out_path);
    assert!(f(&doc["max_deviation"]) > 1e-9);
    assert_eq!(doc["grid"]["n_slices"], 100);
}

#[test]
fn eoh_second_order_is_closer_to_oracle() {
    let first = json(&run(&["eoh"]));
    let second = json(&run(&["eoh", "--order", "second"]));
    assert!(f(&second["max_deviation"]) < f(&first["max_deviation"]));
}

#[test]
fn brst_report() {
    let doc = json(&run(&["brst", "--n", "3", "--g", "0.1"]));
    assert_eq!(doc["kind"], "brst-report");
    assert_eq!(doc["dim"], 216);
    assert!(f(&doc["nilpotency_safe_max"]) <= 1e-10);
    assert!(f(&doc["laplacian_min_eigenvalue"]).abs() <= 1e-12);
    assert!(doc["n_zero_modes"].as_u64().unwrap() > 0);
    assert!(f(&doc["max_zero_mode_residual"]) <= 1e-8);
}

#[test]
fn brst_literal_ghosts_violate_nilpotency() {
    assert_eq!(run(&["brst", "--ghosts", "literal"]).status.code(), Some(3));
}

#[test]
fn physical_states_lowest_are_gauge_invariant() {
    let doc = json(&run(&["physical-states", "--n", "4"]));
    let states = doc["states"].as_array().unwrap();
    assert!(states.len() >= 2);
    for s in &states[..2] {
        assert_eq!(s["gauge_invariant"], true);
        let norm: f64 = s["re"].as_array().unwrap().iter().chain(s["im"].as_array().unwrap()).map(|x| f(x).powi(2)).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}
