use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use locdyn::report::untagged_numbers;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_locdyn"))
}

fn docs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs")
}

fn locdyn(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn value<'a>(r: &'a Value, pointer: &str) -> &'a Value {
    r.pointer(pointer).unwrap_or_else(|| panic!("{pointer} missing in {r:#}"))
}

struct Files(tempfile::TempDir);

impl Files {
    fn new() -> Files {
        Files(tempfile::tempdir().unwrap())
    }

    fn put(&self, name: &str, text: &str) -> String {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }
}

const DIAG: &str = r#"{"task": "scale", "field": {"kind": "padic", "p": 3}, "matrix": [["p^-1", 0], [0, "p"]]}"#;

#[test]
fn scale_of_a_diagonal_matrix() {
    let f = Files::new();
    let path = f.put("diag.json", DIAG);
    let o = locdyn(&["run", "--input", &path]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert_eq!(value(&r, "/status"), "ok");
    assert_eq!(value(&r, "/results/scale/value"), 3);
    assert_eq!(value(&r, "/results/scale/method"), "polygon");
    assert_eq!(value(&r, "/results/exponent_by_method/determinant/value"), 1);
    for row in value(&r, "/results/bruteforce").as_array().unwrap() {
        assert_eq!(value(row, "/cosets/value"), 3);
        assert_eq!(value(row, "/cosets/method"), "enumeration");
    }
    assert_eq!(value(&r, "/results/agree"), true);
}

#[test]
fn identity_has_scale_one() {
    let f = Files::new();
    let path = f.put("id.json", r#"{"field": {"kind": "laurent", "p": 5}, "matrix": [[1, 0], [0, 1]]}"#);
    let o = locdyn(&["run", "scale", "--input", &path]);
    assert_eq!(code(&o), 0);
    assert_eq!(value(&report(&o), "/results/scale/value"), 1);
}

#[test]
fn shift_fixture_reports_the_mismatch() {
    let o = locdyn(&["run", "fixture", "--name", "shift", "--p", "2"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(value(&r, "/results/group_scale/value"), 1);
    assert_eq!(value(&r, "/results/lie_scale/value"), 2);
    assert_eq!(value(&r, "/results/mismatch"), true);
    assert!(value(&r, "/results/verdict").as_str().unwrap().contains("1 but Lie algebra scale 2"));
}

#[test]
fn reports_are_byte_identical() {
    let f = Files::new();
    let path = f.put("t.json", r#"{"task": "tidy", "field": {"kind": "padic", "p": 5}, "matrix": [["p^-1", 1], [0, "p"]], "params": {"samples": 24}}"#);
    for args in [vec!["run", "--input", &path, "--seed", "7"], vec!["run", "--input", &path, "--seed", "7", "--format", "text"]] {
        let a = locdyn(&args);
        let b = locdyn(&args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
    }
    let r = report(&locdyn(&["run", "--input", &path, "--seed", "7"]));
    assert_eq!(value(&r, "/input/seed"), 7);
    let r = report(&locdyn(&["run", "--input", &path]));
    assert_eq!(value(&r, "/input/seed"), 0);
}

#[test]
fn every_number_is_tagged() {
    let f = Files::new();
    let p = f.put("p.json", r#"{"field": {"kind": "padic", "p": 3}, "matrix": [["p^-1", 1, 0], [0, 1, "p"], [0, 0, "p^2"]]}"#);
    let l = f.put("l.json", r#"{"field": {"kind": "laurent", "p": 2, "precision": 24}}"#);
    let runs: Vec<Vec<&str>> = vec![
        vec!["scale", "--input", &p],
        vec!["decompose", "--input", &p],
        vec!["adapted-norm", "--input", &p, "--set", "radius=1"],
        vec!["tidy", "--input", &p],
        vec!["classify", "--input", &p, "--set", "vector=[1,1,1]"],
        vec!["orbit", "--input", &p, "--set", "vector=[1,0,1]", "--set", "norm=max"],
        vec!["fixture", "--name", "shift", "--p", "3"],
        vec!["fixture", "--name", "frobenius-twist", "--p", "2"],
        vec!["fixture", "--name", "nonanalytic", "--p", "3", "--precision", "16"],
        vec!["diffquot", "--input", &l, "--set", "map=nonanalytic", "--set", "jmax=4"],
    ];
    for args in runs {
        let mut full = vec!["run"];
        full.extend(args.iter().copied());
        let o = locdyn(&full);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let r = report(&o);
        let mut bad = Vec::new();
        untagged_numbers(value(&r, "/results"), "/results", &mut bad);
        assert!(bad.is_empty(), "{args:?}: untagged {bad:?}");
    }
}

#[test]
fn validate_points_at_the_row() {
    let f = Files::new();
    let path = f.put("rows.json", "{\n  \"task\": \"scale\",\n  \"field\": {\"kind\": \"padic\", \"p\": 3},\n  \"matrix\": [[1, 0],\n             [0]]\n}\n");
    let o = locdyn(&["validate", &path]);
    assert_eq!(code(&o), 1);
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().count(), 1, "{out}");
    assert!(out.contains("line 5") && out.contains("/matrix/1"), "{out}");
}

#[test]
fn validate_rejects_a_composite_prime() {
    let f = Files::new();
    let path = f.put("p6.json", "{\"task\": \"decompose\",\n \"field\": {\"kind\": \"padic\", \"p\": 6},\n \"matrix\": [[1]]}\n");
    let o = locdyn(&["validate", &path]);
    assert_eq!(code(&o), 1);
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().count(), 1, "{out}");
    assert!(out.contains("line 2") && out.contains("/field/p"), "{out}");
}

#[test]
fn invalid_input_in_run_is_a_usage_error() {
    let f = Files::new();
    let path = f.put("bad.json", r#"{"task": "scale", "field": {"kind": "padic", "p": 3}, "matrix": [[1, 0], [0]]}"#);
    let o = locdyn(&["run", "--input", &path]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    assert_eq!(value(&r, "/status"), "invalid-input");
    assert_eq!(value(&r, "/diagnostics/0/field"), "/matrix/1");
    assert_eq!(value(&r, "/diagnostics/0/line"), 1);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&locdyn(&[])), 1);
    assert_eq!(code(&locdyn(&["run", "--format", "yaml"])), 1);
    assert_eq!(code(&locdyn(&["run", "--input", "/nonexistent/problem.json"])), 1);
    assert_eq!(code(&locdyn(&["run", "fixture"])), 1);
    assert_eq!(code(&locdyn(&["run", "scale", "--task", "tidy"])), 1);
    assert_eq!(code(&locdyn(&["run", "fixture", "--name", "shift", "--p", "4"])), 1);
    assert_eq!(code(&locdyn(&["--help"])), 0);
}

#[test]
fn rejected_inputs_keep_a_report() {
    let f = Files::new();
    let path = f.put("sing.json", r#"{"task": "scale", "field": {"kind": "padic", "p": 3}, "matrix": [[1, 2], [2, 4]]}"#);
    let o = locdyn(&["run", "--input", &path]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    assert_eq!(value(&r, "/status"), "rejected");
    assert!(value(&r, "/error").as_str().unwrap().contains("singular"));
}

#[test]
fn lost_precision_exits_with_two() {
    let f = Files::new();
    let path = f.put("prec.json", r#"{"task": "scale", "field": {"kind": "padic", "p": 3, "precision": 6}, "matrix": [["p^-4", 0], [0, "p^4"]]}"#);
    let o = locdyn(&["run", "--input", &path]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(&o);
    assert_eq!(value(&r, "/status"), "precision-failure");
    assert_eq!(value(&r, "/precision/certified"), false);
    // more digits resolve it
    let o = locdyn(&["run", "--input", &path, "--precision", "32"]);
    assert_eq!(code(&o), 0);
    assert_eq!(value(&report(&o), "/results/scale/value"), 81);
}

#[test]
fn oracle_off_skips_enumeration() {
    let f = Files::new();
    let path = f.put("diag.json", DIAG);
    let r = report(&locdyn(&["run", "--input", &path, "--oracle", "off"]));
    assert_eq!(value(&r, "/input/oracle"), "off");
    for row in value(&r, "/results/bruteforce").as_array().unwrap() {
        assert!(value(row, "/cosets").is_null());
        assert_eq!(value(row, "/index_exponent/value"), 1);
    }
}

#[test]
fn text_format_names_the_methods() {
    let f = Files::new();
    let path = f.put("diag.json", DIAG);
    let o = locdyn(&["run", "--input", &path, "--format", "text"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.starts_with("task    scale\n"), "{out}");
    assert!(out.contains("[polygon]") && out.contains("[enumeration]"), "{out}");
}

#[test]
fn documented_examples_validate_and_run() {
    let dir = docs().join("examples");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let p = path.to_string_lossy().into_owned();
        let o = locdyn(&["validate", &p]);
        assert_eq!(code(&o), 0, "{p}: {}", String::from_utf8_lossy(&o.stdout));
        let o = locdyn(&["run", "--input", &p]);
        assert_eq!(code(&o), 0, "{p}: {}", String::from_utf8_lossy(&o.stdout));
        let r = report(&o);
        let expected = match path.file_name().unwrap().to_str().unwrap() {
            "padic-scale.json" => ("/results/scale/value", 3),
            "laurent-tidy.json" => ("/results/index_plus/value", 1),
            "bch-heisenberg.json" => ("/results/group_scale/value", 7),
            other => panic!("undocumented example {other}"),
        };
        assert_eq!(value(&r, expected.0), expected.1, "{p}");
        seen += 1;
    }
    assert_eq!(seen, 3);
}

#[test]
fn schema_lists_every_task() {
    use clap::ValueEnum;
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(docs().join("schema.json")).unwrap()).unwrap();
    let listed: Vec<&str> = value(&schema, "/properties/task/enum").as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let tasks: Vec<&str> = locdyn::problem::Task::value_variants().iter().map(|t| t.name()).collect();
    assert_eq!(listed, tasks);
    for t in tasks {
        assert!(schema.pointer(&format!("/$defs/params/{t}")).is_some(), "no params for {t}");
    }
    let report: Value = serde_json::from_str(&std::fs::read_to_string(docs().join("report.schema.json")).unwrap()).unwrap();
    assert!(report.pointer("/properties/status/enum").is_some());
}

#[test]
fn nonanalytic_orders_follow_the_precision() {
    let o = locdyn(&["run", "fixture", "--name", "nonanalytic", "--p", "3", "--precision", "16"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(value(&r, "/results/certificates").as_array().unwrap().len(), 3);
    assert!(value(&r, "/notes/0").as_str().unwrap().contains("order n = 4"));
    let o = locdyn(&["run", "fixture", "--name", "nonanalytic", "--p", "3", "--precision", "16", "--set", "n_max=4"]);
    assert_eq!(code(&o), 2);
    let o = locdyn(&["run", "fixture", "--name", "nonanalytic", "--p", "3", "--precision", "24", "--set", "n_max=4"]);
    assert_eq!(code(&o), 0);
    assert_eq!(value(&report(&o), "/results/passed"), true);
}
