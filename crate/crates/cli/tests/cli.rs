use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qnabla(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnabla"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn coeffs_for_order_two() {
    let out = qnabla(&["coeffs", "--gamma", "2", "--q", "0.5", "--k", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let values: Vec<f64> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(values, vec![1.0, -1.5, 0.5, 0.0, 0.0, 0.0]);
}

#[test]
fn inverse_coeffs_for_order_one_are_ones() {
    let out = qnabla(&[
        "coeffs", "--gamma", "1", "--q", "0.3", "--k", "4", "--kind", "inverse", "--format", "csv",
    ]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1\n1\n1\n1\n1\n");
}

#[test]
fn verify_inverse_residual_is_small() {
    let out = qnabla(&[
        "verify-inverse",
        "--gamma",
        "0.5",
        "--q",
        "0.5",
        "--window",
        "30",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_json(&out)["residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn empty_input_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.txt", "");
    let out = qnabla(&[
        "transform",
        "--gamma",
        "0.5",
        "--q",
        "0.5",
        "--input",
        s(&empty),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("window must be ≥ 1"));
}

#[test]
fn missing_input_is_an_io_error() {
    let out = qnabla(&[
        "transform",
        "--gamma",
        "0.5",
        "--q",
        "0.5",
        "--input",
        "/nonexistent/seq.txt",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parameter_errors_name_the_parameter() {
    let out = qnabla(&["coeffs", "--gamma", "1", "--q", "1.5", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`q`"));

    let out = qnabla(&["coeffs", "--gamma", "1", "--q", "0.5"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let seq = write(dir.path(), "a.txt", "1\n2\n");
    let out = qnabla(&[
        "norm",
        "--gamma",
        "1",
        "--q",
        "0.5",
        "--p",
        "-1",
        "--input",
        s(&seq),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p"));

    let bad = write(dir.path(), "bad.txt", "1\nx\n");
    let out = qnabla(&[
        "transform",
        "--gamma",
        "1",
        "--q",
        "0.5",
        "--input",
        s(&bad),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn subset_cap_and_tail_refusal_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let seq = write(
        dir.path(),
        "a.json",
        &serde_json::to_string(&vec![1.0; 24]).unwrap(),
    );
    let out = qnabla(&[
        "alpha-dual",
        "--gamma",
        "1",
        "--q",
        "0.5",
        "--p",
        "2",
        "--input",
        s(&seq),
        "--row-limit",
        "21",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row_limit"));

    let full = write(
        dir.path(),
        "full.json",
        "[[1,1,1,1],[1,1,1,1],[1,1,1,1],[1,1,1,1]]",
    );
    let out = qnabla(&[
        "class-check",
        "--gamma",
        "0.5",
        "--q",
        "0.5",
        "--source",
        "l1-domain",
        "--target",
        "linf",
        "--input",
        s(&full),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn csv_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "g.txt", "0.25\n-1.5\n3\n0\n2.75\n");
    let h = dir.path().join("h.csv");
    let back = dir.path().join("back.csv");
    let common = ["--gamma", "0.7", "--q", "0.3", "--format", "csv"];
    let mut args = vec!["transform", "--input", s(&input), "--output", s(&h)];
    args.extend(common);
    assert!(qnabla(&args).status.success());
    let mut args = vec!["invert", "--input", s(&h), "--output", s(&back)];
    args.extend(common);
    assert!(qnabla(&args).status.success());
    let values: Vec<f64> = std::fs::read_to_string(&back)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    for (a, b) in values.iter().zip([0.25, -1.5, 3.0, 0.0, 2.75]) {
        assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn norm_and_basis() {
    let out = qnabla(&[
        "basis", "--gamma", "1", "--q", "0.5", "--index", "2", "--window", "5",
    ]);
    let values: Vec<f64> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(values, vec![0.0, 0.0, 1.0, 1.0, 1.0]);

    let dir = tempfile::tempdir().unwrap();
    let seq = write(dir.path(), "z.json", "[0, 0, 1, 1, 1]");
    let out = qnabla(&[
        "norm",
        "--gamma",
        "1",
        "--q",
        "0.5",
        "--p",
        "inf",
        "--input",
        s(&seq),
    ]);
    let report = stdout_json(&out);
    assert_eq!(report["value"].as_f64(), Some(1.0));
    assert_eq!(report["p"].as_str(), Some("inf"));
}

#[test]
fn dual_reports() {
    let dir = tempfile::tempdir().unwrap();
    let seq = write(dir.path(), "imp.json", "[1, 0, 0, 0, 0, 0, 0, 0]");
    let out = qnabla(&[
        "beta-dual",
        "--gamma",
        "1",
        "--q",
        "0.5",
        "--p",
        "2",
        "--input",
        s(&seq),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["dual"], "beta");
    let ids: Vec<&str> = report["components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["condition"].as_str().unwrap())
        .collect();
    assert_eq!(ids, vec!["T1", "T2"]);

    let out = qnabla(&[
        "gamma-dual",
        "--gamma",
        "1",
        "--q",
        "0.5",
        "--p",
        "0.5",
        "--input",
        s(&seq),
    ]);
    assert_eq!(stdout_json(&out)["components"][0]["condition"], "T3");

    let out = qnabla(&[
        "alpha-dual",
        "--gamma",
        "1",
        "--q",
        "0.5",
        "--p",
        "inf",
        "--input",
        s(&seq),
        "--row-limit",
        "8",
    ]);
    assert_eq!(stdout_json(&out)["condition"], "Sp");
}

#[test]
fn class_check_reports_table_cells() {
    let dir = tempfile::tempdir().unwrap();
    let phi = write(
        dir.path(),
        "phi.csv",
        "1,0,0,0\n0.5,1,0,0\n0.25,0.5,1,0\n0.125,0.25,0.5,1\n",
    );
    let out = qnabla(&[
        "class-check",
        "--gamma",
        "0.5",
        "--q",
        "0.5",
        "--source",
        "lp-domain",
        "--target",
        "l1",
        "--p",
        "3",
        "--input",
        s(&phi),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout_json(&out);
    assert_eq!(report["items"], serde_json::json!([2, 12]));

    let out = qnabla(&[
        "class-check",
        "--gamma",
        "0.5",
        "--q",
        "0.5",
        "--source",
        "c0",
        "--target",
        "lp-domain",
        "--input",
        s(&phi),
        "--format",
        "csv",
    ]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("group,condition,window,value,verdict\n"));
    assert!(csv.lines().skip(1).all(|l| l.contains(",B_PRIME,")));

    let out = qnabla(&[
        "class-check",
        "--gamma",
        "0.5",
        "--q",
        "0.5",
        "--source",
        "lp-domain",
        "--target",
        "l1",
        "--p",
        "1",
        "--input",
        s(&phi),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compose_forward_with_inverse_is_identity() {
    let out = qnabla(&[
        "compose",
        "--gamma",
        "1.3",
        "--q",
        "0.6",
        "--second",
        "1.3",
        "--second-kind",
        "inverse",
        "--k",
        "10",
    ]);
    let values: Vec<f64> = serde_json::from_slice(&out.stdout).unwrap();
    assert!((values[0] - 1.0).abs() < 1e-14);
    assert!(values[1..].iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn output_is_byte_stable() {
    let args = [
        "semigroup-defect",
        "--gamma",
        "0.5",
        "--nu",
        "0.5",
        "--q",
        "0.25",
        "--window",
        "8",
    ];
    let a = qnabla(&args);
    let b = qnabla(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout_json(&a)["defect"].as_f64().unwrap() >= 0.333);
}
