use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn dagger(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dagger"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

const SMALL: &[&str] = &["--trials", "5", "--N", "1..2", "--cap", "4"];

fn verify(extra: &[&str]) -> Output {
    let mut args = vec!["verify"];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(extra);
    dagger(&args)
}

#[test]
fn small_run_passes_with_schema() {
    let out = verify(&["--suites", "group-axioms,coeff-bound,polydisc,mahler"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema"], 1);
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["verdict"] != "fail"));
}

#[test]
fn same_seed_same_bytes() {
    let a = verify(&["--suites", "norms,convolution", "--seed", "3"]);
    let b = verify(&["--suites", "norms,convolution", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let c = verify(&["--suites", "norms,convolution", "--seed", "4"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn empty_suite_list_is_clean() {
    let out = verify(&["--suites", ""]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["checks"].as_array().unwrap().len(), 0);
}

#[test]
fn dropped_commutator_term_fails_with_witness() {
    let out = verify(&["--group", &fixture("heisenberg3_mutated.json"), "--suites", "group-axioms"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let inverse = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "group-axioms/right-inverse")
        .unwrap();
    assert_eq!(inverse["verdict"], "fail");
    assert!(inverse["witness"].as_str().unwrap().contains("monomial (1,1,0)"));
}

#[test]
fn cubic_term_breaks_associativity() {
    let out = verify(&["--group", &fixture("heisenberg3_nonassociative.json"), "--suites", "group-axioms"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let assoc = &report["checks"][0];
    assert_eq!(assoc["id"], "group-axioms/associativity");
    assert_eq!(assoc["verdict"], "fail");
    assert!(assoc["witness"].as_str().unwrap().contains("(1,0,0,1,0,0,1,0,0)"));
}

#[test]
fn text_report_carries_statements() {
    let out = verify(&["--suites", "coeff-bound", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[pass] coeff-bound/law"));
    assert!(text.contains("v(d_{i,a}) >="));
    assert!(text.contains("summary: 2 pass"));
}

#[test]
fn report_written_to_file() {
    let dir = std::env::temp_dir().join(format!("dagger-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = verify(&["--suites", "coeff-bound", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["group"], "heisenberg(p=3)");
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(verify(&["--suites", "bogus"]).status.code(), Some(2));
    assert_eq!(verify(&["--group", "heisenberg:2"]).status.code(), Some(2));
    assert_eq!(verify(&["--sigma", "1/0"]).status.code(), Some(2));
}

#[test]
fn describe_group_round_trips() {
    let out = dagger(&["describe-group", "--group", "abelian:3:2"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["summary"]["omega"], "1/1, 1/1");
    assert_eq!(v["config"]["d"], 2);
}

#[test]
fn convert_x_squared() {
    let dir = std::env::temp_dir().join(format!("dagger-convert-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("x2.json");
    std::fs::write(&path, r#"[{"index":[2],"coeff":"1/1"}]"#).unwrap();
    let out = dagger(&["convert", "--to", "mahler", "--dim", "1", "--input", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let pairs: Vec<(u64, String)> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|t| (t["index"][0].as_u64().unwrap(), t["coeff"].as_str().unwrap().to_string()))
        .collect();
    assert_eq!(pairs, vec![(1, "1/1".to_string()), (2, "2/1".to_string())]);

    std::fs::write(&path, r#"[{"index":[1],"coeff":"1/1"},{"index":[2],"coeff":"2/1"}]"#).unwrap();
    let out = dagger(&["convert", "--to", "taylor", "--dim", "1", "--input", path.to_str().unwrap()]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["index"][0], 2);
}
