use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn superopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superopt")).args(args).output().expect("binary runs")
}

fn write_example(dir: &Path, name: &str) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    let out = superopt(&["example", name, "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    path
}

fn solve(dir: &Path, input: &Path, extra: &[&str]) -> (Output, PathBuf) {
    let report = dir.join("report.json");
    let mut args = vec!["solve", input.to_str().unwrap(), "--output", report.to_str().unwrap()];
    args.extend_from_slice(extra);
    (superopt(&args), report)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn examples_print_documents() {
    for name in ["py2x2", "diag", "scalar-zbar"] {
        let out = superopt(&["example", name]);
        assert!(out.status.success());
        let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(doc["m"].is_u64() && doc["entries"].is_array());
    }
    let zbar: Value = serde_json::from_slice(&superopt(&["example", "scalar-zbar"]).stdout).unwrap();
    assert_eq!(zbar["m"], 1);
    assert_eq!(zbar["n"], 1);
}

#[test]
fn unknown_example_is_a_validation_error() {
    assert_eq!(superopt(&["example", "nope"]).status.code(), Some(2));
}

#[test]
fn worked_example_report() {
    let dir = TempDir::new().unwrap();
    let input = write_example(dir.path(), "py2x2");
    let csv = dir.path().join("profile.csv");
    let (out, report) = solve(dir.path(), &input, &["--profile", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let r = read_json(&report);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["r"], 2);
    let t: Vec<f64> = r["superoptimal_values"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((t[0] - 6f64.sqrt()).abs() < 1e-6);
    assert!((t[1] - 2f64.sqrt() * (4.0 - 13f64.sqrt())).abs() < 1e-6);
    assert_eq!(r["levels"].as_array().unwrap().len(), 2);
    assert_eq!(r["levels"][1]["j"], 1);
    assert!(r["levels"][1]["residuals"]["q_interpolant"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["diagnostics"]["pass"], true);
    assert_eq!(r["config"]["grid_size"], 1024);
    let digest = hex::encode(Sha256::digest(fs::read(&input).unwrap()));
    assert_eq!(r["input_sha256"], digest.as_str());

    let csv = fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "theta,s_0,s_1");
    assert_eq!(lines.len(), 1025);
    let row: Vec<f64> = lines[10].split(',').map(|s| s.parse().unwrap()).collect();
    assert!((row[1] - 6f64.sqrt()).abs() < 1e-6);
    assert!(lines[10].split(',').nth(1).unwrap().starts_with("2.4494897e0"));
}

#[test]
fn output_directory_receives_report_json() {
    let dir = TempDir::new().unwrap();
    let input = write_example(dir.path(), "diag");
    let out = superopt(&["solve", input.to_str().unwrap(), "--output", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let r = read_json(&dir.path().join("report.json"));
    assert_eq!(r["superoptimal_values"][0].as_f64().unwrap(), 1.0);
    assert!(r["superoptimal_values"][1].as_f64().unwrap().abs() < 1e-8);
}

#[test]
fn reports_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = write_example(dir.path(), "py2x2");
    let (_, first) = solve(dir.path(), &input, &[]);
    let mut a = read_json(&first);
    let (_, second) = solve(dir.path(), &input, &[]);
    let mut b = read_json(&second);
    assert_eq!(a["report_sha256"], b["report_sha256"]);
    a.as_object_mut().unwrap().remove("timings");
    b.as_object_mut().unwrap().remove("timings");
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn analytic_input_is_its_own_approximant() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("analytic.json");
    fs::write(&input, r#"{"m":1,"n":2,"entries":[[{"laurent":[[0,1.0,0.0],[1,0.5,0.0]]},{"laurent":[[2,0.0,1.0]]}]]}"#).unwrap();
    let (out, report) = solve(dir.path(), &input, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = read_json(&report);
    assert_eq!(r["r"], 0);
    let entries = &r["approximant"]["entries"][0];
    let first: Vec<(i64, f64)> = entries[0]["laurent"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| (t[0].as_i64().unwrap(), t[1].as_f64().unwrap()))
        .collect();
    assert_eq!(first.len(), 2);
    assert!((first[0].1 - 1.0).abs() < 1e-12 && (first[1].1 - 0.5).abs() < 1e-12);
    let second = entries[1]["laurent"].as_array().unwrap();
    assert_eq!(second.len(), 1);
    assert_eq!(second[0][0], 2);
    assert!((second[0][2].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn malformed_inputs_exit_with_validation_code() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    let (out, _) = solve(dir.path(), &bad, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let pole = dir.path().join("pole.json");
    fs::write(&pole, r#"{"m":1,"n":1,"entries":[[{"ratio":{"num":[[0,1.0,0.0]],"den":[[0,-2.0,0.0],[1,2.0,0.0]]}}]]}"#).unwrap();
    assert_eq!(solve(dir.path(), &pole, &[]).0.status.code(), Some(2));

    let missing = dir.path().join("missing.json");
    assert_eq!(solve(dir.path(), &missing, &[]).0.status.code(), Some(2));

    let input = write_example(dir.path(), "py2x2");
    assert_eq!(solve(dir.path(), &input, &["--grid-size", "100"]).0.status.code(), Some(2));
}

#[test]
fn unresolved_truncation_exits_with_numerical_code() {
    let dir = TempDir::new().unwrap();
    let slow = dir.path().join("slow.json");
    fs::write(&slow, r#"{"m":1,"n":1,"entries":[[{"ratio":{"num":[[0,1.0,0.0]],"den":[[0,-0.95,0.0],[1,1.0,0.0]]}}]]}"#).unwrap();
    let (out, _) = solve(dir.path(), &slow, &["--trunc", "8", "--max-trunc", "8"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn check_accepts_the_approximant_and_rejects_zero() {
    let dir = TempDir::new().unwrap();
    let input = write_example(dir.path(), "py2x2");
    let (_, report) = solve(dir.path(), &input, &[]);
    let candidate = dir.path().join("candidate.json");
    fs::write(&candidate, read_json(&report)["approximant"].to_string()).unwrap();
    let out = superopt(&["check", input.to_str().unwrap(), candidate.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["pass"], true);

    let zero = dir.path().join("zero.json");
    fs::write(&zero, r#"{"m":2,"n":2,"entries":[[{"laurent":[]},{"laurent":[]}],[{"laurent":[]},{"laurent":[]}]]}"#).unwrap();
    let out = superopt(&["check", input.to_str().unwrap(), zero.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["profiles"][1]["pass"], false);
}

#[test]
fn check_zbar_with_zero_candidate() {
    let dir = TempDir::new().unwrap();
    let input = write_example(dir.path(), "scalar-zbar");
    let zero = dir.path().join("zero.json");
    fs::write(&zero, r#"{"m":1,"n":1,"entries":[[{"laurent":[]}]]}"#).unwrap();
    let out = superopt(&["check", input.to_str().unwrap(), zero.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn check_shape_mismatch_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let input = write_example(dir.path(), "py2x2");
    let zero = dir.path().join("zero.json");
    fs::write(&zero, r#"{"m":1,"n":1,"entries":[[{"laurent":[]}]]}"#).unwrap();
    let out = superopt(&["check", input.to_str().unwrap(), zero.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
