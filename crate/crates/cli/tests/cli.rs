use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gatearray"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn matrix(rows: usize, entries: &[[f64; 2]]) -> Value {
    json!({ "rows": rows, "cols": rows, "entries": entries })
}

fn pure(amps: &[[f64; 2]]) -> Value {
    json!({ "kind": "pure", "value": { "dim": amps.len(), "amplitudes": amps } })
}

fn real_entries(v: &Value) -> Vec<f64> {
    v["entries"].as_array().unwrap().iter().map(|e| e[0].as_f64().unwrap()).collect()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn cnot_files(dir: &TempDir) -> (PathBuf, PathBuf, PathBuf) {
    let params = json!({ "unitaries": [
        matrix(2, &[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]),
        matrix(2, &[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 0.0]]),
    ]});
    let params = write(dir, "u.json", &params);
    let proc = dir.path().join("cnot.json");
    assert!(run(&["build", "u", p(&params), "--out", p(&proc)]).status.success());
    let prog = write(dir, "prog.json", &pure(&[[H, 0.0], [H, 0.0]]));
    let rho = write(dir, "rho.json", &matrix(2, &[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]));
    (proc, prog, rho)
}

#[test]
fn build_qid_matches_library() {
    let out = stdout_json(&run(&["build", "qid"]));
    let want = serde_json::to_value(gatearray::zoo::make_qid_processor()).unwrap();
    assert_eq!(out["data_dim"], 2);
    assert_eq!(out["prog_dim"], 4);
    assert_eq!(real_entries(&out["G"]), real_entries(&want["G"]));
}

#[test]
fn build_swap_at_zero_is_identity() {
    let dir = TempDir::new().unwrap();
    let params = write(&dir, "swap.json", &json!({ "dim": 2, "phi": 0.0 }));
    let out = stdout_json(&run(&["build", "swap", p(&params)]));
    let entries = real_entries(&out["G"]);
    for (k, x) in entries.iter().enumerate() {
        assert_eq!(*x, if k % 5 == 0 { 1.0 } else { 0.0 });
    }
}

#[test]
fn build_rejects_bad_inputs() {
    let dir = TempDir::new().unwrap();
    let not_unitary = write(&dir, "nu.json", &json!({ "unitaries": [matrix(2, &[[1.0, 0.0], [1.0, 0.0], [0.0, 0.0], [1.0, 0.0]])] }));
    assert_eq!(run(&["build", "u", p(&not_unitary)]).status.code(), Some(3));
    let schema = write(&dir, "schema.json", &json!({ "matrices": [] }));
    assert_eq!(run(&["build", "u", p(&schema)]).status.code(), Some(2));
    assert_eq!(run(&["build", "swap"]).status.code(), Some(2));
    assert_eq!(run(&["build", "teleport"]).status.code(), Some(2));
}

#[test]
fn run_qid_beta_one_gives_maximally_mixed() {
    let dir = TempDir::new().unwrap();
    let proc = dir.path().join("qid.json");
    assert!(run(&["build", "qid", "--out", p(&proc)]).status.success());
    let prog = write(&dir, "prog.json", &pure(&[[H, 0.0], [H, 0.0], [0.0, 0.0], [0.0, 0.0]]));
    let rho = write(&dir, "rho.json", &matrix(2, &[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]));
    let out = stdout_json(&run(&["run", p(&proc), p(&prog), p(&rho)]));
    let got = real_entries(&out["output"]);
    for (g, w) in got.iter().zip([0.5, 0.0, 0.0, 0.5]) {
        assert!((g - w).abs() < 1e-10);
    }
}

#[test]
fn run_identity_echoes_input() {
    let dir = TempDir::new().unwrap();
    let proc = write(&dir, "id.json", &serde_json::to_value(gatearray::Processor::identity(2, 3)).unwrap());
    let prog = write(&dir, "prog.json", &pure(&[[0.0, 0.0], [0.0, 1.0], [0.0, 0.0]]));
    let state = json!({ "rows": 2, "cols": 2, "entries": [[0.25, 0.0], [0.1, -0.2], [0.1, 0.2], [0.75, 0.0]] });
    let rho = write(&dir, "rho.json", &state);
    let out = stdout_json(&run(&["run", p(&proc), p(&prog), p(&rho)]));
    let got: Vec<[f64; 2]> = serde_json::from_value(out["output"]["entries"].clone()).unwrap();
    let want: Vec<[f64; 2]> = serde_json::from_value(state["entries"].clone()).unwrap();
    for (g, w) in got.iter().zip(&want) {
        assert!((g[0] - w[0]).abs() < 1e-12 && (g[1] - w[1]).abs() < 1e-12);
    }
}

#[test]
fn run_with_post_selection() {
    let dir = TempDir::new().unwrap();
    let (proc, prog, rho) = cnot_files(&dir);
    let out = stdout_json(&run(&["run", p(&proc), p(&prog), p(&rho), "--measure", "x", "--accept", "0"]));
    assert!((out["accepted"]["probability"].as_f64().unwrap() - 0.5).abs() < 1e-10);
    for x in real_entries(&out["accepted"]["post_state"]) {
        assert!((x - 0.5).abs() < 1e-10);
    }
    let basis = write(&dir, "basis.json", &json!({ "vectors": [
        { "dim": 2, "amplitudes": [[H, 0.0], [H, 0.0]] },
        { "dim": 2, "amplitudes": [[H, 0.0], [-H, 0.0]] },
    ]}));
    let from_file = stdout_json(&run(&["run", p(&proc), p(&prog), p(&rho), "--measure", p(&basis), "--accept", "0"]));
    let a = real_entries(&from_file["accepted"]["post_state"]);
    let b = real_entries(&out["accepted"]["post_state"]);
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
}

#[test]
fn run_dimension_mismatch_exits_4() {
    let dir = TempDir::new().unwrap();
    let (proc, _, rho) = cnot_files(&dir);
    let wide = write(&dir, "wide.json", &pure(&[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]));
    assert_eq!(run(&["run", p(&proc), p(&wide), p(&rho)]).status.code(), Some(4));
    let big = write(&dir, "big.json", &serde_json::to_value(gatearray::Operator::identity(3)).unwrap());
    let prog = write(&dir, "p.json", &pure(&[[1.0, 0.0], [0.0, 0.0]]));
    assert_eq!(run(&["run", p(&proc), p(&prog), p(&big)]).status.code(), Some(4));
    let unnormalized = write(&dir, "un.json", &pure(&[[1.0, 0.0], [1.0, 0.0]]));
    assert_eq!(run(&["run", p(&proc), p(&unnormalized), p(&rho)]).status.code(), Some(3));
}

#[test]
fn verify_zoo_and_corrupted() {
    let dir = TempDir::new().unwrap();
    let (proc, _, _) = cnot_files(&dir);
    let out = stdout_json(&run(&["verify", p(&proc)]));
    assert_eq!(out["passed"], true);
    let mut g: Value = serde_json::from_str(&fs::read_to_string(&proc).unwrap()).unwrap();
    let x = g["G"]["entries"][0][0].as_f64().unwrap();
    g["G"]["entries"][0][0] = json!(x + 0.01);
    let bad = write(&dir, "bad.json", &g);
    let res = run(&["verify", p(&bad)]);
    assert_eq!(res.status.code(), Some(5));
    let report: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(report["passed"], false);
    assert!(report["residuals"]["unitarity"].as_f64().unwrap() > 1e-3);
}

#[test]
fn nogo_reports_and_preconditions() {
    let out = stdout_json(&run(&["nogo", "3", "2"]));
    let checks = out["bound_checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    assert!(checks.iter().all(|c| c["g"].as_f64().unwrap() < 1.0 / 3.0));
    assert_eq!(run(&["nogo", "2", "2"]).status.code(), Some(2));
}

#[test]
fn search_prints_residual() {
    let dir = TempDir::new().unwrap();
    let log = dir.path().join("log.json");
    let out = run(&["search", "phase", "1", "3", "--starts", "2", "--grid", "1.0", "--out", p(&log)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("best_residual "));
    let report: Value = serde_json::from_str(&fs::read_to_string(&log).unwrap()).unwrap();
    assert!(report["best_residual"].as_f64().unwrap() < 1e-10);
    assert!(report["log"].as_array().unwrap().len() >= 2);
}

#[test]
fn outputs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (proc, prog, rho) = cnot_files(&dir);
    let random = write(&dir, "random.json", &json!({ "data_dim": 2, "prog_dim": 3 }));
    let cases: Vec<Vec<&str>> = vec![
        vec!["build", "random", p(&random), "--seed", "17"],
        vec!["verify", p(&proc), "--seed", "3"],
        vec!["run", p(&proc), p(&prog), p(&rho), "--measure", "x"],
        vec!["nogo", "5", "4", "--format", "pretty"],
    ];
    for args in &cases {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let other = run(&["build", "random", p(&random), "--seed", "18"]);
    assert_ne!(other.stdout, run(&cases[0]).stdout);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["nogo", "3", "2", "--tolerance", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "/nonexistent.json"]).status.code(), Some(2));
}
