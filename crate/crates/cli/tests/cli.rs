use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn drb(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drb"))
        .args(args)
        .env("DRB_CACHE_DIR", cache)
        .output()
        .expect("run drb")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout))
    })
}

fn parse_f(v: &Value) -> f64 {
    v.as_str().unwrap().parse().unwrap()
}

#[test]
fn translation_has_zero_cocycle() {
    let dir = tempfile::tempdir().unwrap();
    let o = drb(dir.path(), &["cocycle", "--matrix", "1,1,0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(parse_f(&v["value"]["re"]), 0.0);
    assert_eq!(parse_f(&v["value"]["im"]), 0.0);
    assert!(v["error_budget"].as_f64().unwrap() > 0.0);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(drb(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(drb(dir.path(), &["cocycle", "--bogus"]).status.code(), Some(2));
    // determinant 2
    assert_eq!(drb(dir.path(), &["cocycle", "--matrix", "2,0,0,1"]).status.code(), Some(2));
    assert_eq!(drb(dir.path(), &["verify", "no-such-suite"]).status.code(), Some(2));
    // tolerance finer than 128 bits can resolve
    let o = drb(dir.path(), &["verify", "homomorphism", "--tol", "1e-60", "--samples", "1"]);
    assert_eq!(o.status.code(), Some(2));
    // Gaussian integers are excluded
    assert_eq!(drb(dir.path(), &["--disc", "-4", "cocycle", "--matrix", "1,1,0,1"]).status.code(), Some(2));
}

#[test]
fn verify_report_and_failure_exit() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "verify", "cocycle-relation", "--disc", "-8", "--N", "sqrt-2", "--samples", "2", "--seed", "7", "--height", "20",
    ];
    let o = drb(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["suite"], "cocycle-relation");
    assert_eq!(v["pass"], true);
    assert!(v["max_residual"].as_f64().unwrap() < 1e-20);
    assert_eq!(v["environment"]["precision"], 128);
    // 2 pairs × 5 points, for Φ and Φ_N
    assert_eq!(v["cases"].as_array().unwrap().len(), 20);

    // deterministic modulo wall time
    let mut w = json(&drb(dir.path(), &args));
    let mut v = v;
    v["wall_time_s"] = Value::Null;
    w["wall_time_s"] = Value::Null;
    assert_eq!(v, w);

    // harmonicity's tolerance bounds |ratio − 4|, which 1e-12 cannot meet
    let o = drb(dir.path(), &["verify", "harmonicity", "--tol", "1e-12"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["pass"], false);
}

#[test]
fn hecke_suite_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let o = drb(
        dir.path(),
        &["verify", "hecke", "--N", "sqrt-2", "--p", "1+w", "--samples", "2", "--height", "10"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["cases"][0]["label"].as_str().unwrap().contains("eigenvalue 2"));
    // p | N is rejected
    let o = drb(dir.path(), &["verify", "hecke", "--N", "sqrt-2", "--p", "w", "--samples", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cache_cold_warm_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["series", "eval", "--kind", "e1", "--point", "0.3,0.2"];
    let cold = json(&drb(dir.path(), &args));
    assert_eq!(cold["cache"]["hit"], false);
    let warm = json(&drb(dir.path(), &args));
    assert_eq!(warm["cache"]["hit"], true);
    assert_eq!(cold["result"], warm["result"]);

    // separate files per precision
    drb(dir.path(), &["--prec", "96", "cache", "warm"]);
    let st = json(&drb(dir.path(), &["cache", "status"]));
    let entries = st["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert!(entries.iter().all(|e| e["valid"] == true));

    // corrupt one digit of E₂(0)
    let path = cold["cache"]["path"].as_str().unwrap().to_string();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut file: Value = serde_json::from_str(&text).unwrap();
    let re = file["snapshot"]["e2zero"]["re"].as_str().unwrap().to_string();
    let flipped = if re.contains('1') { re.replacen('1', "2", 1) } else { re.replacen('3', "4", 1) };
    file["snapshot"]["e2zero"]["re"] = Value::String(flipped);
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();

    let st = json(&drb(dir.path(), &["cache", "status"]));
    assert!(st["entries"].as_array().unwrap().iter().any(|e| e["valid"] == false));
    let o = drb(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("checksum mismatch"));
    let again = json(&o);
    assert_eq!(again["cache"]["hit"], false);
    assert_eq!(again["result"], cold["result"]);

    let cleared = json(&drb(dir.path(), &["cache", "clear"]));
    assert_eq!(cleared["removed"], 2);
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"prec": 96, "no_cache": true}"#).unwrap();
    let o = drb(
        dir.path(),
        &["--prec", "200", "--config", cfg.to_str().unwrap(), "series", "eval", "--kind", "e2zero"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["precision"], 96);
    assert_eq!(v["cache"]["path"], Value::Null);

    std::fs::write(&cfg, r#"{"unknown_key": 1}"#).unwrap();
    let o = drb(dir.path(), &["--config", cfg.to_str().unwrap(), "cache", "status"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dedekind_and_lvalue_commands() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&drb(dir.path(), &["dedekind", "--a", "3+w", "--c", "1"]));
    assert_eq!(parse_f(&v["value"]["re"]), 0.0);

    let a = json(&drb(dir.path(), &["dedekind", "--a", "1", "--c", "1+w"]));
    let b = json(&drb(dir.path(), &["dedekind", "--a", "-1", "--c", "1+w"]));
    let (x, y) = (parse_f(&a["value"]["im"]), parse_f(&b["value"]["im"]));
    assert!((x + y).abs() < 1e-30);

    let o = drb(dir.path(), &["lvalue", "closed", "--matrix", "1,1,w,1+w", "--N", "sqrt-2"]);
    // c = w is in Γ₀(√−2), since √−2 = w for disc −8
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    assert!(v["cross_check"].as_f64().unwrap() < 1e-15);
    assert!(v["geodesic"]["alpha"]["re"].is_string());
}
