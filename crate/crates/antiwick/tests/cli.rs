use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use antiwick::format::{read_field, read_kernel};
use serde_json::Value;

const GAUSS_1D: &str = r#"{"dim": 1, "terms": [{"coeff": [1, 0], "factors": [{"width": 3.141592653589793}]}]}"#;
const GAUSS_2D: &str = r#"{"dim": 2, "terms": [{"coeff": [1, 0], "factors": [{"width": 3.141592653589793}, {"width": 3.141592653589793}]}]}"#;
const ONE_2D: &str = r#"{"antiwick": {"dim": 2, "terms": [{"coeff": [1, 0], "factors": [{"width": 0}, {"width": 0}]}]}}"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_antiwick"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn smooth_then_desmooth_recovers_a_stored_field() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(d, &["sample", "--function", GAUSS_1D, "--out", "g"]).status.success());
    let g = d.join("g.json");
    assert!(run(d, &["smooth", "--input", g.to_str().unwrap(), "--out", "s"]).status.success());
    let s = d.join("s.json");
    let out = run(
        d,
        &["desmooth", "--method", "fourier", "--input", s.to_str().unwrap(), "--compare", g.to_str().unwrap(), "--out", "r"],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = json(&d.join("r.report.json"));
    assert!(report["compare"]["sup_error"].as_f64().unwrap() < 1e-8);
    assert_eq!(read_field(&d.join("r.json")).unwrap().len(), 256);
    let manifest = json(&d.join("r.run.json"));
    assert_eq!(manifest["command"], "desmooth");
    assert_eq!(manifest["inputs"].as_object().unwrap().len(), 4);
}

#[test]
fn pairing_the_identity_with_a_normalized_gaussian_gives_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["pair", "--operator", ONE_2D, "--test-function", GAUSS_2D, "--n", "128", "--l", "5.656854249492381"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["value"][0].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(json(&dir.path().join("pair.json")), v);
}

#[test]
fn wide_inputs_exit_with_the_numerical_flag() {
    let dir = tempfile::tempdir().unwrap();
    let wide = r#"{"dim": 1, "terms": [{"coeff": [1, 0], "factors": [{"width": 7}]}]}"#;
    assert_eq!(run(dir.path(), &["desmooth", "--spec", wide, "--out", "c"]).status.code(), Some(1));
    assert_eq!(json(&dir.path().join("c.report.json"))["ill_posed"], true);
    let out = run(dir.path(), &["desmooth", "--method", "fourier", "--spec", wide, "--out", "f"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&dir.path().join("f.report.json"))["spectral_tail"].as_f64().unwrap() > 1e-3);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run(d, &["check", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(d, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(d, &["smooth", "--input", "missing.json", "--out", "x"]).status.code(), Some(2));
    assert_eq!(run(d, &["sample", "--function", "{not json", "--out", "x"]).status.code(), Some(2));
    assert_eq!(
        run(d, &["pair", "--operator", ONE_2D, "--test-function", GAUSS_1D]).status.code(),
        Some(2)
    );
}

#[test]
fn kernel_and_symbol_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let op = r#"{"antiwick": {"dim": 2, "terms": [{"coeff": [1, 0], "factors": [{"width": 1, "center": 0.5}, {"width": 2}]}]}}"#;
    assert!(run(d, &["antiwick-assemble", "--operator", op, "--out", "k"]).status.success());
    let k = d.join("k.json");
    assert!(run(d, &["weyl-from-kernel", "--input", k.to_str().unwrap(), "--out", "w", "--csv"]).status.success());
    assert!(fs::read_to_string(d.join("w.csv")).unwrap().starts_with("x0,x1,re,im\n"));
    let w = d.join("w.json");
    assert!(run(d, &["kernel-from-weyl", "--input", w.to_str().unwrap(), "--out", "k2"]).status.success());
    let a = read_kernel(&k).unwrap();
    let b = read_kernel(&d.join("k2.json")).unwrap();
    assert!(a.sup_distance(&b).unwrap() < 1e-10);
}

#[test]
fn operator_specs_resolve_paths_against_their_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(d, &["antiwick-assemble", "--operator", ONE_2D, "--n", "64", "--l", "4", "--out", "ops/id"]).status.success());
    fs::write(d.join("ops/op.json"), r#"{"kernel": "id.json"}"#).unwrap();
    let op = d.join("ops/op.json");
    let out = run(d, &["pair", "--operator", op.to_str().unwrap(), "--test-function", GAUSS_2D, "--n", "64", "--l", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["value"][0].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn check_writes_a_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["check", "hermite-bound", "--mmax", "60"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "PASS hermite-bound");
    let r = json(&dir.path().join("check-hermite-bound.json"));
    assert_eq!(r["pass"], true);
    assert!(r["values"]["margins"].as_array().unwrap().iter().all(|m| m.as_f64().unwrap() >= 1.0));
    assert_eq!(json(&dir.path().join("check-hermite-bound.run.json"))["parameters"]["mmax"], 60);
}
