//! Binary-level checks of the exit-code contract and the artifact layout.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hd"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("launch hd")
}

fn write_config(dir: &Path, name: &str, value: &serde_json::Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).expect("render config"))
        .expect("write config");
    path.to_string_lossy().into_owned()
}

fn full_circle_set() -> serde_json::Value {
    serde_json::json!({
        "kind": "arc_union",
        "arcs": [{"start": 0.0, "length": std::f64::consts::TAU}],
    })
}

#[test]
fn test_formats_needs_no_config() {
    let scratch = tempfile::tempdir().expect("scratch dir");
    let out = run(&["formats", "--out", "doc"], scratch.path());
    assert!(out.status.success(), "formats failed: {}", String::from_utf8_lossy(&out.stderr));
    let doc = std::fs::read_to_string(scratch.path().join("doc/DATA_FORMATS.md"))
        .expect("formats artifact");
    assert!(doc.contains("experiment_cells.csv"));
}

#[test]
fn test_missing_config_exits_2() {
    let scratch = tempfile::tempdir().expect("scratch dir");
    let out = run(&["certify", "--out", "o"], scratch.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn test_certify_full_circle_passes() {
    let scratch = tempfile::tempdir().expect("scratch dir");
    let cfg = write_config(
        scratch.path(),
        "c.json",
        &serde_json::json!({
            "schema": "hd-config/1",
            "set": full_circle_set(),
            "gauge": {"kind": "power", "beta": 1.0},
        }),
    );
    let out = run(&["certify", "--config", &cfg, "--out", "o"], scratch.path());
    assert!(out.status.success(), "certify failed: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(scratch.path().join("o/certificate.json")).expect("certificate"),
    )
    .expect("certificate JSON");
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    // the echo must itself be a loadable config
    let echo: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(scratch.path().join("o/effective_config.json")).expect("echo"),
    )
    .expect("echo JSON");
    assert_eq!(echo["schema"], "hd-config/1");
    assert_eq!(echo["command"], "certify");
}

#[test]
fn test_invalid_noise_exits_2_and_names_field() {
    let scratch = tempfile::tempdir().expect("scratch dir");
    let cfg = write_config(
        scratch.path(),
        "c.json",
        &serde_json::json!({
            "schema": "hd-config/1",
            "set": full_circle_set(),
            "plan": {"kind": "dyadic", "levels": 3, "density_factor": 1},
            "model": {"kind": "taylor_polynomial", "coefficients": [[0.5, 0.0]]},
            "noise": {"kind": "gaussian", "sigma": -1.0},
        }),
    );
    let out = run(&["simulate", "--config", &cfg, "--out", "o"], scratch.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("noise.sigma"));
}

#[test]
fn test_unknown_config_key_exits_2() {
    let scratch = tempfile::tempdir().expect("scratch dir");
    let cfg = write_config(
        scratch.path(),
        "c.json",
        &serde_json::json!({
            "schema": "hd-config/1",
            "set": full_circle_set(),
            "gauge": {"kind": "power", "beta": 1.0},
            "typo_block": 1,
        }),
    );
    let out = run(&["certify", "--config", &cfg, "--out", "o"], scratch.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn test_command_mismatch_exits_2() {
    let scratch = tempfile::tempdir().expect("scratch dir");
    let cfg = write_config(
        scratch.path(),
        "c.json",
        &serde_json::json!({
            "schema": "hd-config/1",
            "command": "fit",
            "set": full_circle_set(),
            "gauge": {"kind": "power", "beta": 1.0},
        }),
    );
    let out = run(&["certify", "--config", &cfg, "--out", "o"], scratch.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn test_rank_deficient_fit_exits_3() {
    let scratch = tempfile::tempdir().expect("scratch dir");
    // every observation sits at the same point, so the normal matrix drops rank
    let mut csv = String::from("n,re_z,im_z,re_x,im_x\n");
    for n in 0..12 {
        csv.push_str(&format!("{n},0.5,0.0,0.1,0.0\n"));
    }
    std::fs::write(scratch.path().join("obs.csv"), csv).expect("write observations");
    let cfg = write_config(
        scratch.path(),
        "c.json",
        &serde_json::json!({
            "schema": "hd-config/1",
            "observations": "obs.csv",
            "fit": {"degree": 8, "lambda": 0.0},
        }),
    );
    let out = run(&["fit", "--config", &cfg, "--out", "o"], scratch.path());
    assert_eq!(out.status.code(), Some(3));
}
