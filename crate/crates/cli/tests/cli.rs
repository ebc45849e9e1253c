//! Command-line behavior: exit codes, output formats and reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tensor_gauge_cli::experiments::REGISTRY;
use tensor_gauge_cli::report::ExperimentReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tensor-gauge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("tensor-gauge-{}-{name}", std::process::id()))
}

fn body(out: &Output) -> String {
    let mut v: Value = serde_json::from_slice(&out.stdout).expect("json report");
    v.as_object_mut().unwrap().remove("metadata");
    serde_json::to_string(&v).unwrap()
}

#[test]
fn unknown_experiment_exits_2() {
    let out = run(&["run", "unknown-exp"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_config_exits_2() {
    let path = temp_path("bad.json");
    std::fs::write(&path, r#"{"bogus": 1}"#).unwrap();
    let out = run(&["run", "rho-l2-identity", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&path, "not json").unwrap();
    assert_eq!(run(&["run", "rho-l2-identity", "--config", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["run", "rho-l1-lp", "--p", "0.5"]).status.code(), Some(2));
    std::fs::remove_file(path).ok();
}

#[test]
fn list_names_every_experiment() {
    let out = run(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), REGISTRY.len());
    for e in REGISTRY {
        assert!(text.contains(e.id));
    }
}

#[test]
fn rho_l2_identity_at_five() {
    let out = run(&["run", "rho-l2-identity", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = ExperimentReport::from_json(&serde_json::from_slice(&out.stdout).unwrap()).unwrap();
    let q = r.quantities.iter().find(|q| q.name == "rho(l2^5,l2^5)").unwrap();
    assert_eq!((q.lower, q.upper), (5.0, 5.0));
    assert_eq!(r.config.get("n").map(String::as_str), Some("5"));
    assert_eq!(r.config.get("seed").map(String::as_str), Some("1"));
    // Every check is printed with its tolerance.
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().filter(|l| l.contains("(tol ")).count(), r.checks.len());
}

#[test]
fn tampered_run_exits_1() {
    let out = run(&["run", "rho-l2-identity", "--n", "3", "--tamper-nuclear", "1.01"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn same_config_gives_identical_json() {
    let args = ["run", "kg-linf-l2", "--seed", "3", "--restarts", "2"];
    let a = run(&args);
    let b = bin().args(args).env("TENSOR_GAUGE_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(body(&a), body(&b));
    let c = run(&["run", "chevet", "--n", "4", "--samples", "20", "--seed", "5"]);
    let d = run(&["run", "chevet", "--n", "4", "--samples", "20", "--seed", "5"]);
    assert_eq!(body(&c), body(&d));
}

#[test]
fn flags_override_config_file() {
    let path = temp_path("cfg.json");
    std::fs::write(&path, r#"{"n": 3, "seed": 9}"#).unwrap();
    let out = run(&["run", "rho-l2-identity", "--config", path.to_str().unwrap(), "--seed", "4"]);
    std::fs::remove_file(&path).ok();
    let r = ExperimentReport::from_json(&serde_json::from_slice(&out.stdout).unwrap()).unwrap();
    assert_eq!(r.config.get("seed").map(String::as_str), Some("4"));
    assert_eq!(r.config.get("n").map(String::as_str), Some("3"));
}

#[test]
fn csv_and_out_file() {
    let path = temp_path("report.csv");
    let out = run(&["run", "rho-l2-identity", "--n", "2", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("experiment,quantity,lower,upper,stderr,verdict"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.iter().filter(|l| l.ends_with(",reported")).count(), 2);
    assert_eq!(rows.iter().filter(|l| l.ends_with(",pass")).count(), 3);
    let bad = run(&["run", "rho-l2-identity", "--n", "2", "--out", "/nonexistent-dir/x.json"]);
    assert_eq!(bad.status.code(), Some(2));
}
