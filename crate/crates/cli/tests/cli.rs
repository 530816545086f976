//! End-to-end tests of the `qplab` binary: outputs, exit codes and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    root.join(format!("{name}.json")).to_string_lossy().into_owned()
}

fn qplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qplab")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_spec(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn homology_of_s5_at_two() {
    let out = qplab(&["homology", "--kind", "ap", "--p", "2", &corpus("s5")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["betti"], serde_json::json!({"0": 0, "1": 16}));
    assert_eq!(v["euler"], -16);
}

#[test]
fn hasse_diagram_export() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("out.dot");
    let out = qplab(&["poset", "build", "--kind", "xi", "--p", "2", "--H", "alt5", &corpus("s5"), "--dot", dot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("graph"));
    let nodes = text.lines().filter(|l| l.contains("[label=")).count();
    let edges = text.lines().filter(|l| l.contains("--")).count();
    assert_eq!((nodes, edges), (15, 30));
    let v = json_of(&out);
    assert_eq!(v["elements"].as_array().unwrap().len(), 15);
}

#[test]
fn equivalence_check_succeeds() {
    let out = qplab(&["verify", "equiv", "--left", "bp", "--right", "ap", "--p", "2", &corpus("a5")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["equal"], true);
    let out = qplab(&["verify", "equiv", "--left", "sp", "--right", "iap", "--p", "3", "--fixed", &corpus("s4")]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn tsv_output() {
    let out = qplab(&["homology", "--kind", "ap", "--p", "2", "--tsv", &corpus("s5")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "1\t16"), "{text}");
    let out = qplab(&["lefschetz", "--kind", "ap", "--p", "2", "--tsv", &corpus("a4")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 2 && text.contains('\t'));
}

#[test]
fn fixed_points_in_s6_and_s7() {
    let q = "(1 2 3);(4 5 6)";
    let s6 = json_of(&qplab(&["fixed", "--kind", "ap", "--p", "2", "--H-gens", q, &corpus("s6")]));
    assert_eq!(s6["size"], 0);
    let s7 = json_of(&qplab(&["fixed", "--kind", "ap", "--p", "2", "--H-gens", q, &corpus("s7")]));
    assert_eq!(s7["size"], 2);
    assert_eq!(s7["antichain"], true);
    assert_eq!(s7["euler"], 1);
}

#[test]
fn quillen_dimension_verdicts() {
    let out = qplab(&["propagate", "qd", "--p", "3", &corpus("a4")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["top_betti"], 3);
    // A5 at 2 has no top-degree homology: a verification failure, not an input error
    let out = qplab(&["propagate", "qd", "--p", "2", &corpus("a5")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["verdict"], "fail");
}

#[test]
fn output_is_deterministic() {
    let args = ["poset", "build", "--kind", "ap", "--p", "2", &corpus("s4")];
    let a = qplab(&args);
    let b = qplab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = ["lefschetz", "--kind", "sp", "--p", "3", &corpus("s5")];
    assert_eq!(qplab(&args).stdout, qplab(&args).stdout);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_of_range = write_spec(&dir, "range.json", r#"{"name":"x","degree":3,"generators":[[[1,2,4]]]}"#);
    let repeated = write_spec(&dir, "repeat.json", r#"{"name":"x","degree":4,"generators":[[[1,2],[2,3]]]}"#);
    let malformed = write_spec(&dir, "bad.json", "{not json");
    for file in [&out_of_range, &repeated, &malformed] {
        let out = qplab(&["group", file]);
        assert_eq!(out.status.code(), Some(2), "{file}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let missing = dir.path().join("absent.json");
    assert_eq!(qplab(&["group", missing.to_str().unwrap()]).status.code(), Some(2));
    // a selector naming a point beyond the degree
    let out = qplab(&["fixed", "--kind", "ap", "--p", "2", "--H-gens", "(1 9)", &corpus("s5")]);
    assert_eq!(out.status.code(), Some(2));
    // closure beyond the cap
    assert_eq!(qplab(&["group", "--cap", "100", &corpus("s5")]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qplab(&["bogus"]).status.code(), Some(2));
    assert_eq!(qplab(&["homology", &corpus("s5")]).status.code(), Some(2), "missing --p");
    assert_eq!(qplab(&["homology", "--kind", "nope", "--p", "2", &corpus("s5")]).status.code(), Some(2));
    assert_eq!(qplab(&["scenario", "99"]).status.code(), Some(2));
    assert_eq!(qplab(&["--help"]).status.code(), Some(0));
}

#[test]
fn group_summary() {
    let v = json_of(&qplab(&["group", &corpus("a5xa5")]));
    assert_eq!(v["order"], 3600);
    assert_eq!(v["components"].as_array().unwrap().len(), 2);
}

#[test]
fn scenario_listing() {
    let out = qplab(&["scenario", "list"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 10);
}
