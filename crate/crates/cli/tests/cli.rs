use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn taperlin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taperlin"))
        .args(args)
        .current_dir(cwd)
        .env_remove("TAPERLIN_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

const SIM: &str = r#"
seed = 11
formats = ["csv", "json"]
[simulate]
alpha = 1.5
gamma = 0.2
n = 300
replicates = 8
t_grid = [0.25, 0.5, 1.0]
[simulate.filter]
kind = "power_law"
beta = 0.75
"#;

#[test]
fn classify_hard_tapering_case() {
    let dir = tempfile::tempdir().unwrap();
    let out = taperlin(&["classify", "--alpha", "1.5", "--beta", "0.75", "--gamma", "0.2"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["theorem"], "T1i");
    assert!((v["H"].as_f64().unwrap() - 0.8).abs() < 1e-12);
}

#[test]
fn classify_gap_reports_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let out = taperlin(
        &["classify", "--alpha", "1.2", "--beta", "1.25", "--gamma", "1.0", "--zero-sum"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["theorem"], "UnknownGap");
    let c1 = v["bounds"][0].as_f64().unwrap();
    let c2 = v["bounds"][1].as_f64().unwrap();
    assert!((c1 - 0.5 / 1.2).abs() < 1e-12);
    assert!((c2 - (1.0 / 1.2 + 0.25 / 0.5)).abs() < 1e-12);
}

#[test]
fn usage_and_parameter_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(taperlin(&["classify", "--beta", "0.75", "--gamma", "0.2"], p).status.code(), Some(2));
    assert_eq!(
        taperlin(&["classify", "--alpha", "2.5", "--beta", "0.75", "--gamma", "0.2"], p).status.code(),
        Some(2)
    );
    assert_eq!(taperlin(&["verify", "no_such_suite"], p).status.code(), Some(2));
    assert_eq!(taperlin(&["frobnicate"], p).status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, SIM).unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = taperlin(&["simulate", cfg, "--out-dir", "a"], dir.path());
    let b = taperlin(&["simulate", cfg, "--out-dir", "b"], dir.path());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(b.status.code(), Some(0));
    let csv_a = fs::read(dir.path().join("a/ensemble.csv")).unwrap();
    assert_eq!(csv_a, fs::read(dir.path().join("b/ensemble.csv")).unwrap());
    let text = String::from_utf8(csv_a).unwrap();
    assert_eq!(text.lines().next().unwrap(), "replicate,t=0.25,t=0.5,t=1");
    assert_eq!(text.lines().count(), 9);
    assert!(dir.path().join("a/ensemble.json").exists());

    let m: Value = serde_json::from_slice(&fs::read(dir.path().join("a/ensemble.manifest.json")).unwrap()).unwrap();
    assert!((m["b"].as_f64().unwrap() - 300f64.powf(0.2)).abs() < 1e-12);
    assert_eq!(m["seed"], 11);
    assert_eq!(m["plan"]["replicates"], 8);
    assert!(m["version"].is_string());
    assert!(m["wall_time_secs"].as_f64().unwrap() >= 0.0);
}

#[test]
fn simulate_rejects_zero_replicates_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, SIM).unwrap();
    let out = taperlin(&["simulate", cfg.to_str().unwrap(), "--replicates", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("replicates"));

    fs::write(&cfg, format!("{SIM}\nreplicas = 3\n")).unwrap();
    let out = taperlin(&["simulate", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, SIM).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_taperlin"))
        .args(["simulate", cfg.to_str().unwrap(), "--format", "csv"])
        .current_dir(dir.path())
        .env("TAPERLIN_OUT_DIR", dir.path().join("envdir"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("envdir/ensemble.csv").exists());
    assert!(!dir.path().join("envdir/ensemble.json").exists());
}

#[test]
fn sample_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = taperlin(&["sample", "--alpha", "0.8", "--b", "10", "--count", "20", "--seed", "3"], dir.path());
    let b = taperlin(&["sample", "--alpha", "0.8", "--b", "10", "--count", "20", "--seed", "3"], dir.path());
    assert_eq!(a.stdout, b.stdout);
    let xs: Vec<f64> = String::from_utf8(a.stdout).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(xs.len(), 20);
    assert!(xs.iter().all(|&x| x >= 1.0));
}

#[test]
fn moments_reports_exact_and_quadrature() {
    let dir = tempfile::tempdir().unwrap();
    let out = taperlin(&["moments", "--alpha", "1.5", "--b", "100", "--r", "0,1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let m = v["moments"].as_array().unwrap();
    assert_eq!(m[0]["exact"].as_f64().unwrap(), 1.0);
    // 1.5 (0.1 - 1) / (-0.5) + 100^-1.5 * 101
    let expect = 2.7 + 0.101;
    assert!((m[1]["exact"].as_f64().unwrap() - expect).abs() < 1e-12);
    assert!((m[1]["quadrature"].as_f64().unwrap() - expect).abs() < 1e-10);
}

#[test]
fn verify_exit_code_follows_report_and_report_aggregates() {
    let dir = tempfile::tempdir().unwrap();
    let out = taperlin(&["verify", "regimes", "--fast", "--out-dir", "r"], dir.path());
    let v = json(&out);
    let all_pass = v["reports"].as_array().unwrap().iter().all(|r| r["pass"] == true);
    assert_eq!(v["suite"], "regimes");
    assert_eq!(v["fast"], true);
    assert_eq!(out.status.code(), Some(if all_pass { 0 } else { 1 }));
    assert!(dir.path().join("r/verify-regimes.json").exists());

    let rep = taperlin(&["report", "r"], dir.path());
    assert_eq!(rep.status.code(), out.status.code());
    let text = String::from_utf8(rep.stdout).unwrap();
    assert!(text.contains("regimes"));
}

#[test]
fn report_without_reports_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(taperlin(&["report", "."], dir.path()).status.code(), Some(2));
}
