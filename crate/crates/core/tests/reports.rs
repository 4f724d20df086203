use std::collections::BTreeSet;

use ncsphere::report::{catalog, run, summary_csv, sweep, Backend, RunReport, RunSpec, Task, TaskStatus};

fn schema() -> jsonschema::Validator {
    let text = include_str!("../../../schema/report.schema.json");
    let value: serde_json::Value = serde_json::from_str(text).unwrap();
    jsonschema::validator_for(&value).unwrap()
}

fn assert_valid(json: &str) {
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    let validator = schema();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

#[test]
fn single_report_matches_schema_and_round_trips() {
    let rep = run(&RunSpec::default()).unwrap();
    let json = rep.to_json().unwrap();
    assert_valid(&json);
    let back: RunReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back.to_json().unwrap(), json);
}

#[test]
fn failing_and_skipped_reports_match_schema() {
    let spec = RunSpec {
        params: "0.6,0.8,0".into(),
        backend: Backend::Float,
        tol: Some(1e-300),
        tasks: BTreeSet::from([Task::Chern]),
        ..RunSpec::default()
    };
    let rep = run(&spec).unwrap();
    assert_valid(&rep.to_json().unwrap());
    let out = sweep(&["2,0,0".to_string(), "1,0,0".to_string()], &RunSpec { tasks: BTreeSet::from([Task::Conditions]), ..RunSpec::default() })
        .unwrap();
    assert!(out.reports[0].error.is_some());
    assert_valid(&out.to_json().unwrap());
}

#[test]
fn classical_point_behaves_classically() {
    let rep = run(&RunSpec { params: "1,0,0".into(), ..RunSpec::default() }).unwrap();
    assert!(rep.all_pass, "{rep}");
    assert!(rep.commutative);
    let chains = rep.observations.chains.as_ref().unwrap();
    assert!(chains["ch_half"].is_zero);
    assert!(!chains["ch2"].is_zero);
    assert_eq!(rep.theta.as_ref().unwrap().theta, 0.0);
}

#[test]
fn prerequisite_failure_skips_downstream_tasks() {
    // Off the unit sphere by 1e-10: accepted at the default tolerance, rejected by a tighter one.
    let spec = RunSpec { params: "0.6,0.8,0.00001".into(), backend: Backend::Float, tol: Some(1e-11), ..RunSpec::default() };
    let rep = run(&spec).unwrap();
    println!("{rep}");
    let first_bad = Task::ALL.into_iter().find(|t| rep.status(*t) != Some(TaskStatus::Pass)).expect("something fails");
    for t in Task::ALL.into_iter().filter(|t| *t > first_bad) {
        assert_eq!(rep.status(t), Some(TaskStatus::Skipped), "{t} after {first_bad}");
    }
    assert!(!rep.all_pass);
}

#[test]
fn csv_summary_has_one_row_per_point_in_order() {
    let base = RunSpec { tasks: BTreeSet::from([Task::Conditions]), ..RunSpec::default() };
    let out = sweep(&catalog(), &base).unwrap();
    assert_eq!(summary_csv(&out.reports).unwrap(), out.csv);
    let mut reader = csv::Reader::from_reader(out.csv.as_bytes());
    let points: Vec<String> = reader.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert_eq!(points, catalog());
    let header = csv::Reader::from_reader(out.csv.as_bytes()).headers().unwrap().clone();
    assert_eq!(&header[2], "conditions");
    assert_eq!(&header[3], "algebra");
}

#[test]
fn shipped_reports_are_current_and_valid() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../reports");
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            assert_valid(&std::fs::read_to_string(&path).unwrap());
        }
    }
    let out = sweep(&catalog(), &RunSpec::default()).unwrap();
    assert_eq!(std::fs::read_to_string(dir.join("catalog.json")).unwrap(), out.to_json().unwrap());
    assert_eq!(std::fs::read_to_string(dir.join("catalog.csv")).unwrap(), out.csv);
}
