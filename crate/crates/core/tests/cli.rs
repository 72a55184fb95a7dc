use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nilflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn check_accepts_heisenberg() {
    let out = nilflow(&["check", "--input", "heisenberg3+H(1)"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["is_lie"], true);
    assert_eq!(report["nilpotency_step"], 2);
    assert_eq!(report["is_closed"], true);
}

#[test]
fn check_reports_nonclosed_input() {
    let out = nilflow(&["check", "--dorfman", "nonclosed4"]);
    assert_eq!(out.status.code(), Some(2));
    let report = stdout_json(&out);
    assert_eq!(report["is_lie"], true);
    assert_eq!(report["is_closed"], false);
    assert!(report["dorfman_jacobi_residual"].as_f64().unwrap() > 1.0);
}

#[test]
fn check_rejects_non_lie_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.json",
        r#"{"dim": 3, "mu": [[1, 2, 3, 1.0], [2, 3, 1, 1.0], [1, 3, 1, 1.0]]}"#,
    );
    let out = nilflow(&["check", "--input", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["is_lie"], false);
}

#[test]
fn malformed_json_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "broken.json", "{\"dim\": 3,\n  \"mu\": [");
    let out = nilflow(&["ricci", "--input", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("broken.json"), "{err}");
}

#[test]
fn missing_file_is_an_io_error() {
    let out = nilflow(&["ricci", "--input", "/nonexistent/problem.json"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn ricci_of_heisenberg() {
    let out = nilflow(&["ricci", "--input", "heisenberg3"]);
    assert_eq!(out.status.code(), Some(0));
    let rc = &stdout_json(&out)["rc"];
    assert_eq!(rc[0][0].as_f64().unwrap(), -0.5);
    assert_eq!(rc[2][2].as_f64().unwrap(), 0.5);
}

#[test]
fn soliton_fit_of_heisenberg() {
    let out = nilflow(&["soliton-fit", "--input", "heisenberg3+H(1)"]);
    assert_eq!(out.status.code(), Some(0));
    let fit = stdout_json(&out);
    assert_eq!(fit["is_soliton"], true);
    assert!(fit["residual_norm"].as_f64().unwrap() < 1e-10);
}

#[test]
fn grf_csv_to_stdout() {
    let out = nilflow(&["grf", "--input", "heisenberg3+H(1)", "--t-end", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,g_1,g_1_2,g_1_3,g_2,g_2_3,g_3,H_123"
    );
    let last: Vec<f64> = lines
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(last[0], 0.5);
    assert!((last[1] - 3f64.sqrt()).abs() < 1e-8);
}

#[test]
fn bracket_flow_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("gbf.csv");
    let svg = dir.path().join("gbf.svg");
    let out = nilflow(&[
        "bracket-flow",
        "--input",
        "heisenberg3+H(2)",
        "--t-end",
        "2",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = stdout_json(&out);
    assert_eq!(summary["t_end"], 2.0);
    assert!(std::fs::read_to_string(&csv)
        .unwrap()
        .starts_with("t,mu_12_1,mu_12_2,mu_12_3,"));
    let first = std::fs::read_to_string(&svg).unwrap();
    assert!(first.contains("<polyline"));

    // identical input gives a byte-identical picture
    let out = nilflow(&[
        "bracket-flow",
        "--input",
        "heisenberg3+H(2)",
        "--t-end",
        "2",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&svg).unwrap(), first);
}

#[test]
fn flow_rejects_empty_window() {
    let out = nilflow(&[
        "grf",
        "--input",
        "heisenberg3",
        "--t-start",
        "1",
        "--t-end",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flow_rejects_nonclosed_input() {
    let out = nilflow(&["grf", "--input", "nonclosed4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tmin_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = nilflow(&[
        "tmin-sweep",
        "--a-values",
        "0,1",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "a,t_min,g1_end,g3_limit,error");
    assert_eq!(rows.len(), 3);
    let t1: f64 = rows[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!((t1 + 0.25).abs() < 1e-4);
}
