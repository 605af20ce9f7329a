use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use monotone::Report;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn monotone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monotone"))
        .args(args)
        .env_remove("MONOTONE_SEED")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn small_scenario_matches_golden_report() {
    let out = monotone(&["check", path(&data("small.json"))]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let golden = std::fs::read(data("small.golden.json")).unwrap();
    assert!(out.stdout == golden, "report differs from tests/data/small.golden.json");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (p, jobs) in [(&a, "1"), (&b, "2")] {
        let out = monotone(&["check", path(&data("small.json")), "--format", "csv", "--jobs", jobs, "--out", path(p)]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn csv_has_one_line_per_check() {
    let out = monotone(&["check", path(&data("small.json")), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "theorem_id,holds,worst_violation,eps,delta,lambda,seed,runtime_ms");
    assert!(lines[3].starts_with("enlargement_cross_monotone,true,"));
}

#[test]
fn saved_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("r.json");
    let second = dir.path().join("r2.json");
    assert_eq!(monotone(&["check", path(&data("small.json")), "--out", path(&first)]).status.code(), Some(0));
    let out = monotone(&["report", path(&first), "--out", path(&second)]);
    assert_eq!(out.status.code(), Some(0));
    let a = std::fs::read_to_string(&first).unwrap();
    assert_eq!(a, std::fs::read_to_string(&second).unwrap());
    let parsed = Report::from_json(&a).unwrap();
    assert_eq!(parsed.entries.len(), 3);
    assert!(parsed.all_hold());
}

#[test]
fn corrupted_graph_fails_fast_naming_the_pair() {
    let out = monotone(&["check", path(&data("corrupted.json"))]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("pair 1") && err.contains("pair 2"), "{err}");
    assert!(out.stdout.is_empty());
    assert_eq!(monotone(&["validate", path(&data("corrupted.json"))]).status.code(), Some(2));
}

#[test]
fn tolerance_below_sampling_error_reports_violation() {
    let out = monotone(&["check", path(&data("small.json")), "--tol", "1e-15", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("violation: check 0 `regularity_gap`"), "{err}");
}

#[test]
fn unknown_field_is_reported_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("typo.json");
    std::fs::write(
        &p,
        r#"{"name":"t","operators":[{"id":"a","spec":{"kind":"linear","matrix":[[1.0]]}}],
"checks":[{"theorem":"regularity_gap","operators":["a"],"params":{"querys":3}}]}"#,
    )
    .unwrap();
    let out = monotone(&["check", path(&p)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("checks[0].params") && err.contains("querys") && err.contains("line 2"), "{err}");
}

#[test]
fn unknown_operator_reference_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ref.json");
    std::fs::write(
        &p,
        r#"{"name":"t","operators":[{"id":"a","spec":{"kind":"linear","matrix":[[1.0]]}}],
"checks":[{"theorem":"ball_inclusion","operators":["b"]}]}"#,
    )
    .unwrap();
    let out = monotone(&["check", path(&p)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown operator id `b`"));
}

#[test]
fn unwritable_output_is_invalid() {
    let out = monotone(&["check", path(&data("small.json")), "--out", "/nonexistent/dir/report.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("noseed.json");
    std::fs::write(
        &p,
        r#"{"name":"t","operators":[{"id":"a","spec":{"kind":"linear","matrix":[[1.0]]}}],
"checks":[{"theorem":"enlargement_cross_monotone","operators":["a"],"params":{"trials":10}}]}"#,
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_monotone"))
        .args(["check", path(&p)])
        .env("MONOTONE_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.seed, 99);
    let flagged = monotone(&["check", path(&p), "--seed", "5"]);
    assert_eq!(Report::from_json(&String::from_utf8(flagged.stdout).unwrap()).unwrap().seed, 5);
}

#[test]
fn slope_command_reports_infinite_slope_off_the_domain() {
    let out = monotone(&["slope", "--operator", "box_normal_cone_1d", "--x", "2", "--xstar", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["slope"]["value"], "inf");
    assert_eq!(v["distance"], "inf");
}

#[test]
fn slope_command_on_identity() {
    let out = monotone(&["slope", "--operator", "identity", "--x", "0", "--xstar", "-2", "--tol", "1e-6"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let l = v["slope"]["value"].as_f64().unwrap();
    assert!((l - 2.0).abs() < 1e-5, "{l}");
}

#[test]
fn enlarge_probe_marks_outside_point_empty() {
    let out = monotone(&[
        "enlarge",
        "--operator",
        "box_normal_cone_1d",
        "--mode",
        "probe",
        "--kind",
        "constant",
        "--eps",
        "1",
        "--grid",
        "0,2,3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["nonempty"], serde_json::json!([true, true, false]));
}

#[test]
fn enlarge_membership_of_a_scenario_operator() {
    let out = monotone(&[
        "enlarge",
        "--scenario",
        path(&data("small.json")),
        "--operator",
        "rotation",
        "--eps",
        "0.5",
        "--x",
        "1,0",
        "--xstar",
        "0,1.4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["member"], true);
}

#[test]
fn wrong_vector_length_is_invalid() {
    let out = monotone(&["slope", "--operator", "rotation", "--x", "1", "--xstar", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
}
