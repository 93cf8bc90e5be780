use std::path::Path;
use std::process::{Command, Output};

use stripstab::output::{read_csv, read_hash};

fn stripstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stripstab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_owned()
}

#[test]
fn spectrum_writes_hashed_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = stripstab(&["spectrum", "--alpha", "1", "--nu", "1e-4", "--n", "64", "--out", &out, "--eigenfunction"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(dir.path().join("eigenvalues.csv")).unwrap();
    assert_eq!(header, ["re_lambda", "im_lambda", "re_c", "im_c", "residual", "gap"]);
    assert!(!rows.is_empty());
    assert!(rows.windows(2).all(|w| w[0][0] >= w[1][0]), "sorted by growth rate");
    let (_, ef) = read_csv(dir.path().join("eigenfunction.csv")).unwrap();
    assert_eq!(ef.len(), 65);
    let h = read_hash(dir.path().join("eigenvalues.csv")).unwrap().unwrap();
    assert_eq!(read_hash(dir.path().join("eigenfunction.csv")).unwrap().unwrap(), h);
}

#[test]
fn same_arguments_same_hash_and_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |d: &Path| {
        vec![
            "simulate".to_owned(),
            "--coefficients".into(),
            "0.6,-1,0.3,-2,0.5".into(),
            "--mu".into(),
            "-0.01".into(),
            "--a0-re".into(),
            "0.01".into(),
            "--t-final".into(),
            "50".into(),
            "--dt".into(),
            "0.01".into(),
            "--out".into(),
            out_arg(d),
        ]
    };
    for d in [a.path(), b.path()] {
        let v = args(d);
        let o = stripstab(&v.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let fa = std::fs::read(a.path().join("amplitude.csv")).unwrap();
    let fb = std::fs::read(b.path().join("amplitude.csv")).unwrap();
    // The output directory is part of the arguments, so compare everything after the hash line.
    let body = |f: &[u8]| f.splitn(2, |c| *c == b'\n').nth(1).unwrap().to_vec();
    assert_eq!(body(&fa), body(&fb));
}

#[test]
fn simulate_converges_to_cycle_radius() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = stripstab(&[
        "simulate",
        "--coefficients",
        "0.6,-1,0.3,-2,0.5",
        "--mu",
        "-0.01",
        "--a0-re",
        "0.01",
        "--t-final",
        "2000",
        "--dt",
        "0.01",
        "--out",
        &out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = read_csv(dir.path().join("amplitude.csv")).unwrap();
    let last = rows.last().unwrap();
    assert!((last[3] - 0.005f64.sqrt()).abs() < 1e-8, "{}", last[3]);
}

#[test]
fn oversized_step_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = stripstab(&[
        "simulate", "--coefficients", "0.6,-1,0.3,-2,0.5", "--mu", "-0.01", "--a0-re", "0.01", "--t-final", "10",
        "--dt", "5", "--out", &out,
    ]);
    assert!(!o.status.success());
}

#[test]
fn bad_inputs_fail_with_messages() {
    let o = stripstab(&["spectrum", "--alpha", "1", "--nu", "1e-4", "--profile", "/nonexistent/u.csv"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("configuration error"));

    let o = stripstab(&["spectrum", "--alpha", "1", "--nu", "1e-4", "--profile", "tanh:abc"]);
    assert!(!o.status.success());

    let o = Command::new(env!("CARGO_BIN_EXE_stripstab"))
        .args(["spectrum", "--alpha", "1", "--nu", "1e-4", "--n", "32"])
        .env("STRIPSTAB_THREADS", "0")
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("STRIPSTAB_THREADS"));
}

#[test]
fn pipeline_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "nu = 8e-5\nviscosity = 1\n").unwrap();
    let o = stripstab(&["pipeline", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("viscosity"));
}

#[test]
fn hopf_reports_subcritical_poiseuille() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let o = stripstab(&["hopf", "--n", "64", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("hopf.json")).unwrap()).unwrap();
    assert!(v["config_hash"].is_string());
    assert_eq!(v["classification"], "subcritical");
}
