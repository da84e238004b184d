use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qcontrol_cli::{load_problem, CliError};
use serde_json::Value;

const IDENTITY: &str = r#"{"partition":{"m0":1,"m1":1,"m2":1},
"channel":{"dim":3,"kraus":[[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]]}}"#;

// Exchanges levels 0 and 2, so every H0 state lands in H2.
const SWAP: &str = r#"{"partition":{"m0":1,"m1":1,"m2":1},
"channel":{"dim":3,"kraus":[[[[0,0],[0,0],[1,0]],[[0,0],[1,0],[0,0]],[[1,0],[0,0],[0,0]]]]}}"#;

// Two-level system with a two-level bath; `bath_probs` is filled in per test.
fn dilation_file(probs: &str) -> String {
    format!(
        r#"{{"partition":{{"m0":1,"m1":0,"m2":1}},
"dilation":{{
  "h_s":[[[0,0],[0.5,0]],[[0.5,0],[1,0]]],
  "h_b":[[[0,0],[0,0]],[[0,0],[1,0]]],
  "h_sb":[[[0.2,0],[0,0],[0,0],[0,0]],[[0,0],[0.2,0],[0,0],[0,0]],[[0,0],[0,0],[-0.2,0],[0,0]],[[0,0],[0,0],[0,0],[-0.2,0]]],
  "bath_probs":{probs},
  "time":1.0}}}}"#
    )
}

// H0 of dimension 2 coupled to H2 by a shared mode: |0> - |1> never leaves H0.
const DARK_DILATION: &str = r#"{"partition":{"m0":2,"m1":0,"m2":1},
"dilation":{
  "h_s":[[[0,0],[0,0],[0.3,0]],[[0,0],[0,0],[0.3,0]],[[0.3,0],[0.3,0],[0,0]]],
  "h_b":[[[1,0]]],
  "h_sb":[[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]]],
  "bath_probs":[1.0],
  "time":2.0}}"#;

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, contents).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn qcontrol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcontrol"))
        .args(args)
        .env_remove("QCONTROL_TOL")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "diagnostic must be one line: {text}");
    serde_json::from_str(text.trim()).unwrap()
}

#[test]
fn load_identity_file() {
    let ws = Workspace::new();
    let p = load_problem(&ws.file("p.json", IDENTITY)).unwrap();
    assert_eq!(p.partition.m(), 3);
    assert_eq!(p.channel().unwrap().d(), 1);
}

#[test]
fn load_rejects_bad_probabilities() {
    let ws = Workspace::new();
    let err = load_problem(&ws.file("p.json", &dilation_file("[0.5, 0.6]"))).unwrap_err();
    assert!(matches!(err, CliError::Validation(_)), "{err:?}");
    assert!(load_problem(&ws.file("q.json", &dilation_file("[0.5, 0.5]"))).is_ok());
}

#[test]
fn load_rejects_two_sources() {
    let ws = Workspace::new();
    let both = dilation_file("[1.0, 0.0]").replacen(
        "\"dilation\"",
        "\"channel\":{\"dim\":2,\"kraus\":[[[[1,0],[0,0]],[[0,0],[1,0]]]]},\"dilation\"",
        1,
    );
    let err = load_problem(&ws.file("p.json", &both)).unwrap_err();
    assert!(matches!(err, CliError::Schema(_)), "{err:?}");
}

#[test]
fn load_rejects_non_hermitian_hamiltonian() {
    let ws = Workspace::new();
    let text = dilation_file("[1.0, 0.0]").replacen("[[[0,0],[0.5,0]]", "[[[0,0],[0.7,0]]", 1);
    let err = load_problem(&ws.file("p.json", &text)).unwrap_err();
    assert!(matches!(err, CliError::Validation(_)), "{err:?}");
}

#[test]
fn analyze_identity_finds_one_dark_state() {
    let ws = Workspace::new();
    let problem = ws.file("p.json", IDENTITY);
    let report = ws.path("report.json");
    let out = qcontrol(&["analyze", s(&problem), "--out", s(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["nullity"], 1);
    assert_eq!(v["d_minimal"], 1);
    assert_eq!(v["dark_states"].as_array().unwrap().len(), 1);
}

#[test]
fn dark_state_on_swap_exits_one_with_empty_basis() {
    let ws = Workspace::new();
    let problem = ws.file("p.json", SWAP);
    let state = ws.path("state.json");
    let out = qcontrol(&["dark-state", s(&problem), "--out", s(&state)]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&fs::read_to_string(&state).unwrap()).unwrap();
    assert_eq!(v["dark_states"], Value::Array(vec![]));
}

#[test]
fn errors_are_one_line_and_write_nothing() {
    let ws = Workspace::new();
    let report = ws.path("report.json");
    let cases = [
        ("bad.json", "{not json".to_string(), "ParseError"),
        ("schema.json", r#"{"partition":{"m0":1,"m1":1,"m2":1}}"#.to_string(), "SchemaError"),
        ("invalid.json", dilation_file("[0.5, 0.6]"), "ValidationError"),
    ];
    for (name, text, kind) in cases {
        let problem = ws.file(name, &text);
        let out = qcontrol(&["analyze", s(&problem), "--out", s(&report)]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert_eq!(stderr_json(&out)["error"], kind);
        assert!(!report.exists());
    }
    let missing = qcontrol(&["validate", s(&ws.path("absent.json"))]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(stderr_json(&missing)["error"], "IoError");
    let usage = qcontrol(&["frobnicate"]);
    assert_eq!(usage.status.code(), Some(2));
    assert_eq!(stderr_json(&usage)["error"], "UsageError");
}

#[test]
fn tolerance_sources_are_checked() {
    let ws = Workspace::new();
    let problem = ws.file("p.json", IDENTITY);
    let out = Command::new(env!("CARGO_BIN_EXE_qcontrol"))
        .args(["analyze", s(&problem)])
        .env("QCONTROL_TOL", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // The flag wins over the environment.
    let out = Command::new(env!("CARGO_BIN_EXE_qcontrol"))
        .args(["analyze", s(&problem), "--tol", "1e-10"])
        .env("QCONTROL_TOL", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = qcontrol(&["analyze", s(&problem), "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_reports_channel_shape() {
    let ws = Workspace::new();
    let out = qcontrol(&["validate", s(&ws.file("p.json", &dilation_file("[0.25, 0.75]")))]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["source"], "dilation");
    assert_eq!(v["dim"], 2);
    assert_eq!(v["d"], 4);
    assert_eq!(v["kind"], "trace_preserving");
}

#[test]
fn extract_kraus_minimal_reduces_count() {
    let ws = Workspace::new();
    // A pure bath gives a unitary channel padded with zero operators.
    let problem = ws.file("p.json", &dilation_file("[1.0, 0.0]"));
    let full = qcontrol(&["extract-kraus", s(&problem)]);
    assert_eq!(full.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&full.stdout).unwrap();
    assert_eq!(v["dim"], 2);
    let out_path = ws.path("min.json");
    let min = qcontrol(&["extract-kraus", s(&problem), "--minimal", "--out", s(&out_path)]);
    assert_eq!(min.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["kraus"].as_array().unwrap().len(), 1);
    // The written channel is itself a valid problem source.
    let reloaded = format!(
        r#"{{"partition":{{"m0":1,"m1":0,"m2":1}},"channel":{}}}"#,
        fs::read_to_string(&out_path).unwrap()
    );
    assert!(load_problem(&ws.file("again.json", &reloaded)).is_ok());
}

fn parse_csv(text: &str) -> Vec<[f64; 4]> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,pop0,pop1,pop2"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

#[test]
fn simulate_initial_states() {
    let ws = Workspace::new();
    let problem = ws.file("p.json", DARK_DILATION);

    let out = qcontrol(&["simulate", s(&problem), "--t-max", "2", "--steps", "8", "--initial", "uniform"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = parse_csv(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| (r[1] + r[2] + r[3] - 1.0).abs() < 1e-10));
    assert!(rows.iter().any(|r| r[3] > 1e-3));

    // The antisymmetric H0 state is dark at every time for this model.
    let csv = ws.path("series.csv");
    let out = qcontrol(&[
        "simulate", s(&problem), "--t-max", "2", "--steps", "8", "--initial", "dark", "--out", s(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = parse_csv(&fs::read_to_string(&csv).unwrap());
    assert!(rows.iter().all(|r| r[3] < 1e-12));

    let state = ws.file("psi.json", "[[0.7071067811865476,0],[-0.7071067811865476,0]]");
    let arg = format!("file:{}", s(&state));
    let out = qcontrol(&["simulate", s(&problem), "--t-max", "1", "--steps", "2", "--initial", &arg]);
    assert_eq!(out.status.code(), Some(0));
    assert!(parse_csv(std::str::from_utf8(&out.stdout).unwrap()).iter().all(|r| r[3] < 1e-12));

    let bad = ws.file("bad.json", "[[1,0],[1,0]]");
    let arg = format!("file:{}", s(&bad));
    let out = qcontrol(&["simulate", s(&problem), "--t-max", "1", "--steps", "2", "--initial", &arg]);
    assert_eq!(out.status.code(), Some(2));
    let out = qcontrol(&["simulate", s(&problem), "--t-max", "1", "--steps", "0", "--initial", "dark"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qcontrol(&["simulate", s(&problem), "--t-max", "1", "--steps", "2", "--initial", "bright"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_needs_dilation() {
    let ws = Workspace::new();
    let problem = ws.file("p.json", IDENTITY);
    let out = qcontrol(&["simulate", s(&problem), "--t-max", "1", "--steps", "2", "--initial", "uniform"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "ValidationError");
}

#[test]
fn d_as_given_changes_dimension_test() {
    let ws = Workspace::new();
    // Identity on three levels written with three proportional operators.
    let third = 1.0f64 / 3f64.sqrt();
    let op = format!(
        "[[[{third},0],[0,0],[0,0]],[[0,0],[{third},0],[0,0]],[[0,0],[0,0],[{third},0]]]"
    );
    let text = format!(
        r#"{{"partition":{{"m0":2,"m1":0,"m2":1}},"channel":{{"dim":3,"kraus":[{op},{op},{op}]}}}}"#
    );
    let problem = ws.file("p.json", &text);
    let minimal = qcontrol(&["analyze", s(&problem)]);
    let given = qcontrol(&["analyze", s(&problem), "--d-as-given"]);
    let a: Value = serde_json::from_slice(&minimal.stdout).unwrap();
    let b: Value = serde_json::from_slice(&given.stdout).unwrap();
    assert_eq!(a["d_minimal"], 1);
    assert_eq!(a["dimension_sufficient"], true);
    assert_eq!(b["d_given"], 3);
    assert_eq!(b["dimension_sufficient"], false);
    // Both still find the two-dimensional dark subspace.
    assert_eq!(a["nullity"], 2);
    assert_eq!(b["nullity"], 2);
}

#[test]
fn demo_is_deterministic() {
    let ws = Workspace::new();
    let (a, b) = (ws.path("a"), ws.path("b"));
    fs::create_dir(&a).unwrap();
    fs::create_dir(&b).unwrap();
    for dir in [&a, &b] {
        let out = qcontrol(&["demo", "donor-acceptor", "--seed", "42", "--out-dir", s(dir)]);
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["report.json", "series.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
    }
    let report: Value = serde_json::from_slice(&fs::read(a.join("report.json")).unwrap()).unwrap();
    assert!(report["comparison"]["dark_pop2"].as_f64().unwrap() <= 1e-8);
    assert_eq!(report["params"]["seed"], 42);

    let missing = qcontrol(&["demo", "donor-acceptor", "--out-dir", s(&ws.path("nowhere"))]);
    assert_eq!(missing.status.code(), Some(2));
}
