use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use abscompat::io::{read_element, write_element};
use abscompat::relations::{compat_defect, CompatKind};
use abscompat::witnesses::{paper_pair, transpose_witnesses};
use abscompat::{AlgebraElement, ComplexMatrix, ToleranceConfig};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abscompat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, x: &AlgebraElement) -> PathBuf {
    let p = dir.join(name);
    write_element(&p, x).unwrap();
    p
}

fn write_text(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn paper_files(dir: &Path) -> (PathBuf, PathBuf) {
    let (a, b) = paper_pair();
    (
        write(dir, "a.json", &AlgebraElement::full(a)),
        write(dir, "b.json", &AlgebraElement::full(b)),
    )
}

#[test]
fn compat_true_and_false_exit_codes() {
    let dir = TempDir::new().unwrap();
    let (a, b) = paper_files(dir.path());
    assert_eq!(code(&run(&["check", "compat", s(&a), s(&b)])), 0);

    let (e, v) = transpose_witnesses();
    let et = write(dir.path(), "et.json", &AlgebraElement::full(e.transpose()));
    let vt = write(dir.path(), "vt.json", &AlgebraElement::full(v.transpose()));
    let out = run(&["check", "compat", s(&et), s(&vt), "--kind", "domain"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("verdict: false"));
}

#[test]
fn json_and_text_agree() {
    let dir = TempDir::new().unwrap();
    let (e, v) = transpose_witnesses();
    let et = write(dir.path(), "et.json", &AlgebraElement::full(e.transpose()));
    let vt = write(dir.path(), "vt.json", &AlgebraElement::full(v.transpose()));
    let text = stdout(&run(&["check", "compat", s(&et), s(&vt), "--kind", "domain"]));
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["check", "compat", s(&et), s(&vt), "--kind", "domain", "--json"])))
            .unwrap();
    let defect = json["defect"].as_f64().unwrap();
    assert_eq!(json["verdict"], false);
    assert!((defect - (2f64.sqrt() - 1.0)).abs() < 1e-8);
    assert!(text.contains(&format!("defect: {defect:.6e}")));
}

#[test]
fn single_element_relations() {
    let dir = TempDir::new().unwrap();
    let (a, _) = paper_files(dir.path());
    assert_eq!(code(&run(&["check", "positive", s(&a)])), 0);
    assert_eq!(code(&run(&["check", "contraction", s(&a)])), 0);
    assert_eq!(code(&run(&["check", "projection", s(&a)])), 1);
    assert_eq!(code(&run(&["check", "partial-isometry", s(&a)])), 1);
    assert_eq!(code(&run(&["check", "tripotent-char", s(&a)])), 0);
}

#[test]
fn characterizations_report_consistency() {
    let dir = TempDir::new().unwrap();
    let (a, b) = paper_files(dir.path());
    let out = run(&["check", "jordan-equiv", s(&a), s(&b), "--json"]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["consistent"], true);
    assert_eq!(code(&run(&["check", "orth-char", s(&a), s(&b)])), 0);
}

#[test]
fn errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let (a, _) = paper_files(dir.path());
    assert_eq!(code(&run(&["check", "compat", s(&a)])), 2);
    assert_eq!(code(&run(&["check", "compat", s(&a), "/nonexistent.json"])), 2);
    let bad = write_text(dir.path(), "bad.json", "{\"shape\": [2], \"entries\": 3}");
    assert_eq!(code(&run(&["check", "positive", s(&bad)])), 2);
    let m3 = write(dir.path(), "m3.json", &AlgebraElement::full(ComplexMatrix::identity(3)));
    let out = run(&["check", "compat", s(&a), s(&m3)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(code(&run(&["check", "compat", s(&a), s(&a), "--tol", "-1"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
}

#[test]
fn outside_unit_ball_is_an_error() {
    let dir = TempDir::new().unwrap();
    let big = write(dir.path(), "big.json", &AlgebraElement::full(ComplexMatrix::identity(2).scale_real(2.0)));
    assert_eq!(code(&run(&["check", "compat", s(&big), s(&big)])), 2);
}

#[test]
fn classify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let mixed = write_text(
        dir.path(),
        "mixed.json",
        r#"{"domain_shape":[2,2],"codomain_shape":[2,2],"builder":{"kind":"jordan_hom",
            "placements":[[{"block":0}],[{"block":1,"transpose":true}]]}}"#,
    );
    let out = run(&["classify", s(&mixed), "--json"]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["hom_block_indices"], serde_json::json!([0]));
    assert_eq!(json["antihom_block_indices"], serde_json::json!([1]));

    let half = write_text(
        dir.path(),
        "half.json",
        r#"{"domain_shape":[2],"codomain_shape":[2],"builder":{"kind":"scalar","factor":[0.5,0.0]}}"#,
    );
    let out = run(&["classify", s(&half)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("triple hom: false"));
}

#[test]
fn fuzz_writes_replayable_witness() {
    let dir = TempDir::new().unwrap();
    let map = write_text(
        dir.path(),
        "t.json",
        r#"{"domain_shape":[2],"codomain_shape":[2],"builder":{"kind":"transpose"}}"#,
    );
    let out = run(&["fuzz", s(&map), "--kind", "domain", "--budget", "50", "--out", s(dir.path())]);
    assert_eq!(code(&out), 3);
    let a = read_element(&dir.path().join("witness_a.json")).unwrap();
    let b = read_element(&dir.path().join("witness_b.json")).unwrap();
    let tol = ToleranceConfig::default();
    assert!(compat_defect(&a, &b, CompatKind::Domain, &tol).unwrap().verdict);
    let images = (a.transpose(), b.transpose());
    assert!(!compat_defect(&images.0, &images.1, CompatKind::Domain, &tol).unwrap().verdict);
    let check = run(&[
        "check",
        "compat",
        s(&dir.path().join("witness_a.json")),
        s(&dir.path().join("witness_b.json")),
        "--kind",
        "domain",
    ]);
    assert_eq!(code(&check), 0);
}

#[test]
fn fuzz_finds_nothing_for_a_star_hom() {
    let dir = TempDir::new().unwrap();
    let map = write_text(
        dir.path(),
        "id.json",
        r#"{"domain_shape":[2,1],"codomain_shape":[2,1],"builder":{"kind":"identity"}}"#,
    );
    let out = run(&["fuzz", s(&map), "--kind", "full", "--budget", "64", "--out", s(dir.path())]);
    assert_eq!(code(&out), 0);
    assert!(!dir.path().join("witness_a.json").exists());
    assert_eq!(code(&run(&["fuzz", s(&map), "--budget", "0"])), 2);
}

#[test]
fn verify_suite_small_run() {
    let out = run(&["verify-suite", "--dims", "1,2", "--trials", "8", "--seed", "3", "--json"]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(json["results"].as_array().map_or(false, |r| !r.is_empty()));
    assert_eq!(code(&run(&["verify-suite", "--dims", "0"])), 2);
    assert_eq!(code(&run(&["verify-suite", "--trials", "0"])), 2);
}
