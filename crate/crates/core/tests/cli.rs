use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_riccati-kyp"))
}

fn system(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("systems").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn scalar(v: &Value) -> f64 {
    v[0][0][0].as_f64().unwrap()
}

#[test]
fn extremes_of_scalar_interval() {
    let path = system("scalar_interval.json");
    let out = run(&["extremes", "--system", path.to_str().unwrap(), "--no-timings"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let r = &v["results"];
    assert!((scalar(&r["minimalSolution"]["H"]) - 3.0 / 64.0).abs() < 1e-9);
    assert!((scalar(&r["maximalSolution"]["H"]) - 0.75).abs() < 1e-9);
    assert_eq!(r["duality"]["allPassed"], Value::Bool(true));
    assert_eq!(v["system"]["n"], 1);
}

#[test]
fn identity_candidate_is_in_re() {
    let path = system("two_state.json");
    let out = run(&["check", "--system", path.to_str().unwrap(), "--candidate", "I", "--no-timings"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["results"]["check:I"];
    assert_eq!(r["inRE"], Value::Bool(true));
    assert_eq!(r["inRICirc"], Value::Bool(true));
}

#[test]
fn coinner_row_is_certified_unique() {
    let path = system("coinner_row.json");
    let out = run(&["analyze", "--system", path.to_str().unwrap(), "--no-timings"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["results"];
    assert_eq!(r["circleProfile"]["coInner"], Value::Bool(true));
    assert_eq!(r["uniqueness"]["verdict"], "UniqueSingleton");
    assert_eq!(r["uniqueness"]["reason"], "CoInnerFl0");
}

#[test]
fn failures_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"A\": [\n").unwrap();
    let out = run(&["analyze", "--system", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(23));
    assert_eq!(json(&out)["error"]["category"], "ParseError");

    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["analyze", "--system", missing.to_str().unwrap()]).status.code(), Some(24));

    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = system("scalar_interval.json");
    let inputs = system("scalar_inputs.json");
    let mut files = Vec::new();
    for i in 0..2 {
        let out_path = dir.path().join(format!("report{i}.json"));
        let out = run(&[
            "report",
            "--system",
            path.to_str().unwrap(),
            "--inputs",
            inputs.to_str().unwrap(),
            "--no-timings",
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        files.push(std::fs::read(&out_path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let v: Value = serde_json::from_slice(&files[0]).unwrap();
    assert!(v["results"]["simulation"].is_object());
    assert!(v.get("timings").is_none());
}
