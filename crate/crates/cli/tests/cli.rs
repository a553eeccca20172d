use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn afftool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afftool"))
        .args(args)
        .env_remove("AFFTOOL_MAX_DIM")
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let out = afftool(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    });
    (out.status.code().expect("exit code"), v)
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn classify_example_one() {
    let (code, v) = run_json(&["classify", path(&data("example1.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["classification"]["tag"], "NonErgodic");
    assert_eq!(v["centralizer"]["narrative"], "NonLie");
    assert_eq!(v["command"], "classify");
    assert_eq!(v["input_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn classify_cat_map() {
    let (code, v) = run_json(&["classify", path(&data("cat.json")), "--height", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["classification"]["tag"], "K");
    assert_eq!(v["centralizer"]["narrative"], "AffineRigid");
    assert_eq!(v["oracle"]["agrees"], true);
}

#[test]
fn malformed_matrix_is_a_schema_error() {
    let (code, v) = run_json(&["classify", path(&data("det2.json"))]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "schema");
}

#[test]
fn missing_file_is_a_schema_error() {
    let (code, _) = run_json(&["classify", path(&data("no_such_file.json"))]);
    assert_eq!(code, 2);
}

#[test]
fn dimension_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_afftool"))
        .args(["classify", path(&data("example1.json"))])
        .env("AFFTOOL_MAX_DIM", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    for cmd in ["classify", "structure", "centralizer", "perturb"] {
        let a = afftool(&[cmd, path(&data("example2.json"))]);
        let b = afftool(&[cmd, path(&data("example2.json"))]);
        assert!(a.status.success(), "{cmd}");
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn perturb_cases() {
    let (code, v) = run_json(&["perturb", path(&data("example1.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["case"], 1);
    assert_eq!(v["witnesses"][0]["residual"]["pass"], true);
    assert_eq!(v["witnesses"][0]["commutes_exactly"], true);
    let (code, v) = run_json(&["perturb", path(&data("example2.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["case"], 2);
    assert_eq!(v["witness_data"]["product_is_exact"], true);
    let (code, _) = run_json(&["perturb", path(&data("example2.json")), "--case", "1"]);
    assert_eq!(code, 3);
    let (code, v) = run_json(&["perturb", path(&data("cat.json"))]);
    assert_eq!(code, 3);
    assert!(v["error"]["message"].as_str().unwrap().contains("stably ergodic"));
}

#[test]
fn verify_emitted_and_tampered_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = afftool(&["perturb", path(&data("example1.json")), "--out", path(&report)]);
    assert!(out.status.success());
    let (code, v) = run_json(&["verify", path(&data("example1.json")), "--witness", path(&report)]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);

    let mut expr: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let mut expr = expr["witnesses"][0]["expression"].take();
    for p in expr["perturbation"].as_array_mut().unwrap() {
        for t in p.as_array_mut().unwrap() {
            for m in t["freq"].as_array_mut().unwrap() {
                *m = Value::from(m.as_i64().unwrap() / 2);
            }
        }
    }
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, expr.to_string()).unwrap();
    let (code, v) = run_json(&["verify", path(&data("example1.json")), "--witness", path(&tampered)]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], false);
    assert!(v["residual"]["max_residual"].as_f64().unwrap() > 1e-3);

    let (code, _) = run_json(&[
        "verify",
        path(&data("example1.json")),
        "--witness",
        path(&report),
        "--grid",
        "0",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn unresolved_symbols_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("id.json");
    std::fs::write(
        &w,
        r#"{"kind": "map", "linear": [[1]], "translation": [{"rational": "0"}], "perturbation": [[]]}"#,
    )
    .unwrap();
    let (code, v) = run_json(&["verify", path(&data("rotation_symbolic.json")), "--witness", path(&w)]);
    assert_eq!(code, 4);
    assert_eq!(v["error"]["symbol"], "alpha");
}

#[test]
fn nil_commands() {
    let (code, v) = run_json(&["nil", path(&data("heisenberg.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["k_test"]["is_k"], true);
    assert_eq!(v["step"], 2);
    let (code, v) = run_json(&["nil", path(&data("heisenberg_identity.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["k_test"]["is_k"], false);
    assert_eq!(v["k_test"]["closure"]["dim"], 0);
    let (code, v) = run_json(&["nil", path(&data("not_jacobi.json"))]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["triple"], serde_json::json!([0, 1, 2]));
    let (code, _) = run_json(&["nil", path(&data("cat.json"))]);
    assert_eq!(code, 2);
}

#[test]
fn nil_with_explicit_automorphism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    std::fs::write(&a, r#"[["2","1","0"],["1","1","0"],["0","0","1"]]"#).unwrap();
    let (code, v) = run_json(&[
        "nil",
        path(&data("heisenberg_identity.json")),
        "--automorphism",
        path(&a),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["k_test"]["is_k"], true);
    // scaling the center by 2 breaks the bracket
    std::fs::write(&a, r#"[["2","1","0"],["1","1","0"],["0","0","2"]]"#).unwrap();
    let (code, _) = run_json(&[
        "nil",
        path(&data("heisenberg_identity.json")),
        "--automorphism",
        path(&a),
    ]);
    assert_eq!(code, 3);
}

#[test]
fn text_output() {
    let out = afftool(&["classify", path(&data("example1.json")), "--text"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("tag: NonErgodic"));
    assert!(s.contains("narrative: NonLie"));
}
