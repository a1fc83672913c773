use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn hring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hring")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = hring(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    stdout(&out)
}

fn code(args: &[&str]) -> i32 {
    hring(args).status.code().expect("exited normally")
}

fn steps() -> String {
    data("steps.json").display().to_string()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn eval_prints_interval_at_the_jump() {
    assert_eq!(ok(&["eval", &steps(), "f", "0"]), "0 0 1\n");
    assert_eq!(ok(&["eval", &steps(), "f", "-1/2", "3"]), "-0.5 0 0\n3 1 1\n");
}

#[test]
fn eval_constant() {
    assert_eq!(ok(&["eval", &steps(), "five", "-7/3"]), "-7/3 5 5\n");
}

#[test]
fn eval_error_codes() {
    assert_eq!(code(&["eval", &steps(), "nope", "0"]), 3);
    assert_eq!(code(&["eval", &data("constants.json").display().to_string(), "a", "2"]), 4);
    assert_eq!(code(&["eval", &steps(), "f", "1/"]), 2);
    assert_eq!(code(&["eval", &data("missing.json").display().to_string(), "f", "0"]), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"functions\": {\"f\": {\"domain\": [1, 0], \"pieces\": []}}}").unwrap();
    assert_eq!(code(&["eval", bad.to_str().unwrap(), "f", "0"]), 2);
}

#[test]
fn steps_sum_to_zero_by_every_definition() {
    let zero = json(&ok(&["op", &steps(), "f + g", "--def", "1"]));
    assert_eq!(zero["points"], Value::Array(vec![]));
    assert_eq!(zero["pieces"][0]["lower"], "0");
    for d in ["2", "3"] {
        assert_eq!(json(&ok(&["op", &steps(), "f + g", "--def", d])), zero);
    }
    ok(&["op", &steps(), "f + g", "--check-all"]);
}

#[test]
fn multiplicative_identity_and_distributivity() {
    assert_eq!(ok(&["op", &steps(), "f * one"]), ok(&["op", &steps(), "f"]));
    assert_eq!(ok(&["op", &steps(), "(f + g) * h"]), ok(&["op", &steps(), "f*h + g*h"]));
    ok(&["op", &steps(), "(f + g) * h", "--check-all"]);
    ok(&["op", &steps(), "f * h + g", "--check-all", "--def", "3"]);
}

#[test]
fn op_error_codes() {
    assert_eq!(code(&["op", &steps(), "f + wide"]), 5);
    assert_eq!(code(&["op", &steps(), "f + "]), 2);
    assert_eq!(code(&["op", &steps(), "f + zz"]), 3);
    let osc = data("oscillation.json").display().to_string();
    assert_eq!(code(&["--mode", "float", "op", &osc, "f + g", "--def", "3"]), 6);
}

#[test]
fn oscillation_sum_after_op() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sum.json");
    let osc = data("oscillation.json").display().to_string();
    ok(&["--mode", "float", "op", &osc, "f + g", "-o", out.to_str().unwrap()]);
    let line = ok(&["--mode", "float", "eval", out.to_str().unwrap(), "f", "0"]);
    let parts: Vec<f64> = line.split_whitespace().map(|s| s.parse().unwrap()).collect();
    let r2 = std::f64::consts::SQRT_2;
    assert_eq!(parts[0], 0.0);
    assert!((parts[1] + r2).abs() < 1e-9 && (parts[2] - r2).abs() < 1e-9, "{line}");
}

#[test]
fn verify_ring_default_suite_passes() {
    let report = json(&ok(&["verify-ring"]));
    assert_eq!(report["cases"], 200);
    assert_eq!(report["passed"], true);
    assert!(report["axioms"].as_object().unwrap().values().all(|a| a["passed"] == true));
}

#[test]
fn verify_ring_mutant_fails_distributivity() {
    let out = hring(&["verify-ring", "--cases", "40", "--mutant"]);
    assert_ne!(out.status.code(), Some(0));
    let report = json(&stdout(&out));
    assert_eq!(report["axioms"]["distributive"]["passed"], false);
    assert!(report["axioms"]["distributive"]["counterexample"].as_str().unwrap().contains("x ="));
}

#[test]
fn verify_ring_on_constants_passes() {
    let consts = data("constants.json").display().to_string();
    let report = json(&ok(&["verify-ring", "--file", &consts, "--defs"]));
    assert_eq!(report["cases"], 3);
    assert_eq!(report["axioms"]["def1_eq_def2_times"]["passed"], true);
}

#[test]
fn verify_ring_is_deterministic() {
    let args = ["--seed", "11", "verify-ring", "--cases", "25", "--defs"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn sample_rows() {
    let csv = ok(&["sample", &steps(), "f", "--x0", "-1", "--h", "0.5", "--n", "5"]);
    assert_eq!(csv, "x,lo,hi\n-1,0,0\n-0.5,0,0\n0,0,1\n0.5,1,1\n1,1,1\n");
    let single = ok(&["sample", &steps(), "f", "--x0", "2", "--h", "1", "--n", "1"]);
    assert_eq!(single, "x,lo,hi\n2,1,1\n");
}

#[test]
fn sample_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    ok(&["sample", &steps(), "h", "--x0", "0", "--h", "1/4", "--n", "3", "-o", out.to_str().unwrap()]);
    assert_eq!(std::fs::read_to_string(out).unwrap(), "x,lo,hi\n0,-1,-1\n0.25,-0.75,-0.75\n0.5,-0.5,1\n");
}

#[test]
fn grid_converge_tables() {
    let rows = |v: &Value| v["rows"].as_array().unwrap().clone();
    let steps_sum = json(&ok(&["grid-converge", &steps(), "f+g", "--h", "0.1,0.05,0.025", "--window=-1,1"]));
    let errors: Vec<f64> = rows(&steps_sum).iter().map(|r| r["max_error"].as_f64().unwrap()).collect();
    assert_eq!(errors.len(), 3);
    assert!(errors.windows(2).all(|w| w[1] <= w[0]));

    let continuous = json(&ok(&["grid-converge", &steps(), "one + five", "--h", "0.1,0.05"]));
    assert!(rows(&continuous).iter().all(|r| r["max_error"].as_f64().unwrap() <= 1e-9));

    let sloped = json(&ok(&["grid-converge", &steps(), "h * f", "--h", "1/16,1/32,1/64", "--window=-1,1"]));
    for r in sloped["ratios"].as_array().unwrap() {
        assert!((r.as_f64().unwrap() - 0.5).abs() < 1e-9, "{sloped}");
    }

    let single = json(&ok(&["grid-converge", &steps(), "h", "--h", "0.1"]));
    assert_eq!(rows(&single).len(), 1);
}

#[test]
fn compare_defs_reports_deviation_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.csv");
    let v = json(&ok(&["--samples", "50", "compare-defs", &steps(), "f", "h", "--depth", "256", "--table", table.to_str().unwrap()]));
    assert_eq!(v["passed"], true);
    assert!(v["max_abs_deviation"].as_f64().unwrap() <= 1e-3);
    assert_eq!(v["ops"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(table).unwrap();
    assert!(csv.starts_with("op,x,def1_lo,def1_hi,def3_lo,def3_hi,deviation\n"));
    assert!(csv.lines().count() > 100);
}

#[test]
fn validate_accepts_true_envelopes_and_rejects_false_ones() {
    let osc = data("oscillation.json").display().to_string();
    let v = json(&ok(&["--mode", "float", "validate", &osc]));
    assert_eq!(v["functions"]["f"]["h_continuous"], true);
    assert_eq!(v["declarations"]["f + g"]["passed"], true);

    let mut file = json(&std::fs::read_to_string(data("oscillation.json")).unwrap());
    file["envelopes"][0]["limsup"] = serde_json::json!(1);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, file.to_string()).unwrap();
    let out = hring(&["--mode", "float", "validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&stdout(&out))["declarations"]["f + g"]["passed"], false);
}

#[test]
fn validate_reports_continuity_classes() {
    let v = json(&ok(&["validate", &steps()]));
    assert_eq!(v["functions"]["f"]["h_continuous"], true);
    assert_eq!(v["functions"]["wide"]["h_continuous"], false);
    assert_eq!(v["functions"]["wide"]["s_continuous"], true);
}
