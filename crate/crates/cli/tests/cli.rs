use std::path::{Path, PathBuf};
use std::process::Command;

use graded_darboux::grexpr::{equal, parse_expr, ChartSpec, EqualPolicy};
use graded_darboux_cli::report::Status;
use graded_darboux_cli::{run_manifest, run_path, CliError, RunOptions};

fn manifests() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../manifests")
}

fn run_bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_graded-darboux")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const PASSING: &str = r#"{
  "charts": { "qp": { "coords": [ { "name": "q", "weight": 1 }, { "name": "p", "weight": -1 } ] } },
  "forms": { "alpha": { "chart": "qp", "expr": "p*d(q)" } },
  "tasks": [ { "cmd": "degree", "args": { "of": "alpha", "expect": "(even, 0)" } } ]
}"#;

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(&dir, "ok.json", PASSING);
    assert_eq!(run_bin(&["run", &ok]).0, 0);

    let failing = PASSING.replace("(even, 0)", "(even, 1)");
    assert_eq!(run_bin(&["run", &write(&dir, "fail.json", &failing)]).0, 1);

    let broken = PASSING.replace("\"tasks\"", "\"taks\"");
    assert_eq!(run_bin(&["run", &write(&dir, "schema.json", &broken)]).0, 2);

    let unknown = PASSING.replace("\"degree\"", "\"degre\"");
    assert_eq!(run_bin(&["run", &write(&dir, "cmd.json", &unknown)]).0, 2);

    let bad_expr = PASSING.replace("p*d(q)", "p*d(r)");
    assert_eq!(run_bin(&["run", &write(&dir, "expr.json", &bad_expr)]).0, 2);

    assert_eq!(run_bin(&["run", "/nonexistent/manifest.json"]).0, 2);
}

#[test]
fn empty_task_list() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "empty.json", r#"{ "tasks": [] }"#);
    let (code, stdout) = run_bin(&["run", &p, "--json", "-", "--quiet"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 0);
    assert_eq!(v["seed"], 0);
}

#[test]
fn schema_errors_carry_position() {
    let err = run_manifest("{\n  \"charts\": 3\n}", Path::new("."), &RunOptions::default()).unwrap_err();
    match err {
        CliError::Schema { line, .. } => assert_eq!(line, 2),
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn json_report_is_written_and_seed_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "ok.json", PASSING);
    let out = dir.path().join("out.json");
    let (code, _) = run_bin(&["run", &p, "--json", out.to_str().unwrap(), "--seed", "17"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["results"][0]["seed"], 17);
    assert_eq!(v["results"][0]["status"], "pass");
    assert_eq!(v["results"][0]["degree"], "(even, 0)");
}

#[test]
fn expected_failures_pass() {
    let r = run_path(&manifests().join("counterexample.json"), &RunOptions::default()).unwrap();
    let last = r.results.last().unwrap();
    assert_eq!(last.status, Status::Pass);
    assert!(last.error.as_deref().unwrap().contains("characteristic"));
}

#[test]
fn reports_are_deterministic() {
    for name in ["cylinder", "theta", "liouville"] {
        let p = manifests().join(format!("{name}.json"));
        let opts = RunOptions { seed: 3, ..RunOptions::default() };
        assert_eq!(run_path(&p, &opts).unwrap().to_json(), run_path(&p, &opts).unwrap().to_json());
    }
}

#[test]
fn printed_outputs_round_trip() {
    let r = run_path(&manifests().join("liouville.json"), &RunOptions::default()).unwrap();
    let chart = ChartSpec::even(&[("q", 1), ("p", -1)]);
    let poincare = r.results.iter().find(|t| t.task == "poincare omega").unwrap();
    let prim = &poincare.output_exprs.as_ref().unwrap()["primitive"];
    let prim = parse_expr(prim, &chart).unwrap();
    let expected = parse_expr("(p*d(q) - q*d(p))/2", &chart).unwrap();
    assert!(equal(&prim, &expected, &EqualPolicy::default()).equal);

    let r = run_path(&manifests().join("theta.json"), &RunOptions::default()).unwrap();
    let src = ChartSpec::even(&[("x", 1), ("y", -1)]);
    let darboux = r.results.iter().find(|t| t.task == "darboux theta").unwrap();
    let out = darboux.output_exprs.as_ref().unwrap();
    let q = parse_expr(&out["image q"], &src).unwrap();
    assert!(equal(&q, &parse_expr("x*(1 + sinh(x*y))", &src).unwrap(), &EqualPolicy::default()).equal);
}

#[test]
fn straighten_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        &dir,
        "s.json",
        r#"{
          "charts": { "x": { "coords": [ { "name": "x" } ], "boxes": [ [ -3, 3 ] ] } },
          "fields": { "X": { "chart": "x", "coeffs": [ "2 + sin(x)" ] } },
          "tasks": [ { "cmd": "straighten", "args": { "field": "X", "base": [ 0 ], "box": 1, "csv": "grid.csv" } } ]
        }"#,
    );
    assert_eq!(run_bin(&["run", &p]).0, 0);
    let csv = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert!(csv.starts_with("# base = (0)"));
    assert_eq!(csv.lines().count(), 2 + 3);
}
