use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jackvertex"))
        .args(args)
        .env_remove("JACKVERTEX_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn jack_symbolic_p2() {
    let out = run(&["jack", "--lambda", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["basis"], "monomial");
    assert_eq!(v["terms"][1]["partition"], serde_json::json!([1, 1]));
    assert_eq!(v["terms"][1]["coeff"], "(2*a)/(1 + a)");
}

#[test]
fn jack_q_at_rational_in_power_sums() {
    let out = run(&["jack", "--lambda", "1", "--kind", "Q", "--alpha", "at:1/2", "--basis", "powerSum"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["terms"][0]["coeff"], "1/2");
}

#[test]
fn vertex_product_all_methods_agree() {
    let out = run(&["vertex-product", "--lambda", "2,1", "--twice-charge", "-2", "--alpha", "1", "--method", "all"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema"], "1");
    assert_eq!(v["agreement"], true);
    let methods = v["methods"].as_object().unwrap();
    assert_eq!(methods.len(), 3);
    let first = &methods["iterated"]["vector"];
    assert!(methods.values().all(|m| &m["vector"] == first));
}

#[test]
fn vertex_product_single_method_shape() {
    let out = run(&["vertex-product", "--lambda", "2", "--twice-charge", "-1", "--alpha", "1", "--method", "explicit"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["method"], "explicit");
    assert_eq!(v["twiceChargeIn"], -1);
    let term = &v["vector"]["terms"][0];
    assert_eq!(term["twiceCharge"], 1);
    assert!(v["tImage"]["terms"].is_array());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["jack", "--lambda", ""]).status.code(), Some(2));
    assert_eq!(run(&["jack", "--lambda", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["jack", "--lambda", "2", "--alpha", "at:x"]).status.code(), Some(2));
    let out = run(&["vertex-product", "--lambda", "2", "--twice-charge", "0", "--alpha", "1/3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NonIntegralExponent"));
    let out = run(&["verify", "rectangular", "--size", "3", "--output", "/nonexistent-dir/report.json"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn verify_is_deterministic_and_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["verify", "products", "--size", "4", "--alpha", "1,2", "--no-timing", "--output", path.to_str().unwrap()];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
    let v = json(&a);
    assert_eq!(v["schema"], "1");
    assert_eq!(v["passed"], true);
    let case = &v["suites"][0]["cases"][0];
    assert!(case.get("elapsed_ms").is_none());
    assert!(case["case"].is_object());
    assert!(String::from_utf8_lossy(&a.stderr).contains("0 failed"));
}

fn cache(dir: &Path, args: &[&str]) -> String {
    let mut full = vec!["cache"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--cache-dir", dir.to_str().unwrap()]);
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn cache_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("cache");
    assert!(cache(&root, &["status"]).starts_with("0 entries"));
    cache(&root, &["warm", "--weight", "2", "--alpha", "at:2"]);
    assert!(cache(&root, &["status"]).starts_with("60 entries"));
    let file = root.join("alpha-2").join("w002-jackP-monomial.json");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    assert_eq!(v["formatVersion"], 1);
    assert!(cache(&root, &["clear"]).contains("60"));
    assert!(cache(&root, &["status"]).starts_with("0 entries"));
}
