use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const OPTIMUM: &str = "0,2.0943951023931953,1.0471975511965976";

fn ctxbell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctxbell")).args(args).output().expect("binary runs")
}

fn simulate_quantum(out: &Path, n: &str, workers: &str) -> Output {
    ctxbell(&[
        "simulate",
        "--model",
        "quantum",
        "--angles",
        OPTIMUM,
        "--n",
        n,
        "--seed",
        "42",
        "--workers",
        workers,
        "--out",
        out.to_str().unwrap(),
    ])
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

#[test]
fn simulate_then_test_detects_violation() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("q.csv");
    let report = dir.path().join("report.json");
    assert_eq!(simulate_quantum(&csv, "20000", "0").status.code(), Some(0));
    let out = ctxbell(&["test", csv.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&std::fs::read(&report).unwrap());
    assert_eq!(r["verdict"], "quantum-like-violation");
    assert_eq!(r["seed"], 42);
    assert_eq!(r["design"]["variant"], "three");
    assert_eq!(r["design"]["n_per_branch"], 20000);
    assert!((r["margin"].as_f64().unwrap() + 0.25).abs() < 0.03);
    assert!(r["symmetry_check"]["passed"].as_bool().unwrap());
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        ["nu", "margin", "standard_error", "z", "p_value", "alpha", "verdict", "symmetry_check", "seed", "design"]
    );
}

#[test]
fn output_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("1.csv");
    let many = dir.path().join("8.csv");
    simulate_quantum(&one, "3000", "1");
    simulate_quantum(&many, "3000", "8");
    assert_eq!(std::fs::read(&one).unwrap(), std::fs::read(&many).unwrap());
    let r1 = ctxbell(&["test", one.to_str().unwrap()]).stdout;
    let r8 = ctxbell(&["test", many.to_str().unwrap()]).stdout;
    assert_eq!(r1, r8);
}

#[test]
fn simulate_writes_csv_to_stdout() {
    let out = ctxbell(&["simulate", "--model", "quantum", "--angles", OPTIMUM, "--n", "5", "--design", "two"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("respondent_id,branch,first_question,first_answer,second_question,second_answer\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("r0")).count(), 15);
}

#[test]
fn symmetrized_point_mass_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let out = ctxbell(&[
        "simulate",
        "--model",
        "classical",
        "--atoms",
        "1,0,0,0,0,0,0,0",
        "--symmetrize",
        "--n",
        "1000",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = ctxbell(&["test", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out.stdout)["verdict"], "inconclusive-degenerate");
}

#[test]
fn classical_law_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    ctxbell(&[
        "simulate",
        "--model",
        "classical",
        "--atoms",
        "0.2,0.05,0.1,0.15,0.15,0.1,0.05,0.2",
        "--n",
        "5000",
        "--seed",
        "9",
        "--out",
        csv.to_str().unwrap(),
    ]);
    let out = ctxbell(&["test", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out.stdout)["verdict"], "classical-consistent");
}

#[test]
fn malformed_answers_are_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    std::fs::write(
        &csv,
        "respondent_id,branch,first_question,first_answer,second_question,second_answer\nr1,BA,b,+1,a,-1\nr2,BA,b,1,a,-1\n",
    )
    .unwrap();
    let out = ctxbell(&["test", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn empty_branch_is_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("partial.csv");
    std::fs::write(
        &csv,
        "respondent_id,branch,first_question,first_answer,second_question,second_answer\nr1,BA,b,+1,a,-1\n",
    )
    .unwrap();
    assert_eq!(ctxbell(&["test", csv.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn usage_errors_are_exit_two() {
    assert_eq!(ctxbell(&["simulate", "--model", "quantum", "--n", "10"]).status.code(), Some(2));
    assert_eq!(ctxbell(&["simulate", "--model", "classical", "--atoms", "1,2", "--n", "10"]).status.code(), Some(2));
    assert_eq!(ctxbell(&["search", "--grid", "4"]).status.code(), Some(2));
}

#[test]
fn search_reports_optimum_and_gap() {
    let out = ctxbell(&["search", "--floor-samples", "2000", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out.stdout);
    assert!((r["best_margin"].as_f64().unwrap() + 0.25).abs() < 1e-8);
    assert!(r["classical_floor"]["floor"].as_f64().unwrap() >= -1e-12);
    assert!((r["gap"].as_f64().unwrap() - 0.25).abs() < 1e-8);
}

#[test]
fn interference_regimes() {
    let out = ctxbell(&["interference", "--p", "0.75", "--p1", "0.25", "--p2", "0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out.stdout);
    assert!((r["coefficient"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(r["regime"], "trigonometric");

    let r = json(&ctxbell(&["interference", "--p", "0.9", "--p1", "0.1", "--p2", "0.1"]).stdout);
    assert_eq!(r["regime"], "hyperbolic");

    assert_eq!(ctxbell(&["interference", "--p", "0.5", "--p1", "0", "--p2", "0.3"]).status.code(), Some(3));
}
