use std::process::{Command, Output};

fn ncsphere(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncsphere")).args(args).output().expect("binary runs")
}

#[test]
fn check_passes_at_catalog_point() {
    let out = ncsphere(&["check", "--params", "3/5,4/5,0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("conditions") && text.contains("overall PASS"));
    assert!(!text.contains("chern"));
}

#[test]
fn quiet_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = ncsphere(&["report", "--params", "1,0,0", "--json", path.to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["commutative"], true);
    assert_eq!(v["tasks"].as_object().unwrap().len(), 5);
}

#[test]
fn invalid_spec_exits_with_two() {
    let off = ncsphere(&["check", "--params", "1,1,0"]);
    assert_eq!(off.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&off.stderr).contains("unit sphere"));
    let decimal = ncsphere(&["check", "--params", "0.6,0.8,0"]);
    assert_eq!(decimal.status.code(), Some(2));
    let empty = ncsphere(&["sweep", "--params", ";"]);
    assert_eq!(empty.status.code(), Some(2));
    let task = ncsphere(&["sweep", "--tasks", "conditions,bogus"]);
    assert_eq!(task.status.code(), Some(2));
}

#[test]
fn failing_checks_exit_with_one() {
    // off the sphere by 1e-10, then checked at a tolerance of 1e-11
    let out = ncsphere(&["check", "--params", "0.6,0.8,0.00001", "--backend", "float", "--tol", "1e-11"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("overall FAIL"));
}

#[test]
fn float_backend_with_tolerance() {
    let out = ncsphere(&["sphere", "--params", "0.6,0.64,0.48", "--backend", "float", "--tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn sweep_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let json = dir.path().join("s.json");
    let out = ncsphere(&[
        "sweep",
        "--params",
        "1,0,0;3/5,0,4/5",
        "--tasks",
        "conditions,algebra",
        "--csv",
        csv.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<String> = std::fs::read_to_string(&csv).unwrap().lines().map(String::from).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("\"1,0,0\",true,pass,pass,-,-,-,true"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn degree_cap_below_minimum_is_rejected() {
    let out = ncsphere(&["chern", "--degree-cap", "3"]);
    assert_eq!(out.status.code(), Some(2));
}
