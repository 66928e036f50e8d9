//! End-to-end tests of the command-line interface: the lib-level
//! dispatcher for the subcommand flows and the packaged binary for
//! process-level behavior (stdout, exit codes, thread independence).

use clap::Parser;
use collapse_kit_cli::args::Cli;
use collapse_kit_cli::{commands, CliError};
use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> Result<(), CliError> {
    let cli = Cli::try_parse_from(std::iter::once("collapse-kit").chain(args.iter().copied()))
        .expect("argv parses");
    commands::run(cli)
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).expect("artifact exists")
}

/// Data rows of a commented-CSV artifact, split into cells.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|line| !line.starts_with('#') && !line.is_empty())
        .skip(1)
        .map(|line| line.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn generate_then_criterion_reports_no_fire_on_flat_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("mk.json");
    let out = dir.path().join("crit.csv");
    run(&["generate", "--family", "minkowski", "--n", "257", "--rmax", "2", "--out", data.to_str().unwrap()])
        .unwrap();
    run(&["criterion", data.to_str().unwrap(), "--mode", "future", "--out", out.to_str().unwrap()])
        .unwrap();
    let text = read(&out);
    assert!(text.contains("# [future] fires: false"), "flat data must not fire");
    assert!(text.contains("# [future] mo_fires: false"));
    assert!(text.contains("# config_digest: "));
    assert!(text.contains("# j_sign: "));
    assert!(text.contains("# mo_measure: "));
    let rows = rows(&text);
    assert_eq!(rows.len(), 256, "one row per positive node");
    assert!(rows.iter().all(|row| row[6] == "false"));
}

#[test]
fn pg_jang_flow_reaches_the_exact_outer_slope() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("pg.json");
    let out = dir.path().join("jang.csv");
    run(&[
        "generate", "--family", "pg", "--mass", "1", "--rmin", "3", "--rmax", "10",
        "--out", data.to_str().unwrap(),
    ])
    .unwrap();
    run(&["jang", data.to_str().unwrap(), "--bc", "r1=3,matched", "--out", out.to_str().unwrap()])
        .unwrap();
    let text = read(&out);
    assert!(text.contains("# termination: completed"));
    let rows = rows(&text);
    let last = rows.last().unwrap();
    let r: f64 = last[0].parse().unwrap();
    let v: f64 = last[1].parse().unwrap();
    assert_eq!(r, 10.0);
    assert!((v - -(0.2f64).sqrt()).abs() < 1e-6, "v(10) = {v}");
}

#[test]
fn verify_passes_on_flat_data_and_writes_order_tables() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("mk.json");
    let out = dir.path().join("verify.csv");
    run(&["generate", "--family", "minkowski", "--n", "129", "--rmax", "2", "--out", data.to_str().unwrap()])
        .unwrap();
    run(&[
        "verify", data.to_str().unwrap(), "--check", "geroch,de", "--refine", "3",
        "--out", out.to_str().unwrap(),
    ])
    .unwrap();
    let text = read(&out);
    assert!(text.contains("# overall: PASS"));
    // Three ladder levels per check, then one verdict row per check.
    assert!(text.contains("geroch,0,129,h,"));
    assert!(text.contains("geroch,2,513,h,"));
    assert!(text.contains("de,2,513,h,"));
}

#[test]
fn verify_flags_nonconvergent_identities_with_exit_code_two() {
    // Tabulated data with a mere C0 surface kink degrades the
    // finite-difference flux identity to first order; verify must
    // notice and fail, writing the artifact regardless.
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("star.json");
    let out = dir.path().join("verify.csv");
    run(&[
        "generate", "--family", "star", "--mu0", "0.003", "--rstar", "4", "--rmax", "8",
        "--out", data.to_str().unwrap(),
    ])
    .unwrap();
    let err = run(&[
        "verify", data.to_str().unwrap(), "--check", "de", "--refine", "3",
        "--out", out.to_str().unwrap(),
    ])
    .unwrap_err();
    assert_eq!(err.exit_code(), 2, "verification failure is exit 2, got {err}");
    let text = read(&out);
    assert!(text.contains("# overall: FAIL"));
    assert!(text.contains("de,order,"), "the verdict shows the measured order path");
}

#[test]
fn config_file_fills_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    let out = dir.path().join("sweep.csv");
    std::fs::write(&cfg, "[sweep]\nseed = 7\ntrials = 30\n").unwrap();
    run(&[
        "--config", cfg.to_str().unwrap(),
        "sweep", "--trials", "6", "--out", out.to_str().unwrap(),
    ])
    .unwrap();
    let text = read(&out);
    assert!(
        text.contains("# trials: 6 (family both, seed 7, n 65)"),
        "flag trials=6 overrides the file; file seed=7 survives"
    );
    assert_eq!(rows(&text).len(), 6);
}

#[test]
fn usage_errors_exit_one_and_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let pg = dir.path().join("pg.json");
    run(&[
        "generate", "--family", "pg", "--rmin", "3", "--rmax", "10",
        "--out", pg.to_str().unwrap(),
    ])
    .unwrap();

    // The collapse criteria need ball data.
    let err = run(&["criterion", pg.to_str().unwrap()]).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("ball"));

    // So does the mass chain.
    let err = run(&["verify", pg.to_str().unwrap(), "--check", "mass-chain"]).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("mass-chain"));

    // A bc radius must match the grid's inner boundary.
    let err = run(&["jang", pg.to_str().unwrap(), "--bc", "r1=5,matched"]).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("r1 = 5"), "got: {err}");

    // Family parameters are checked for applicability.
    let err = run(&["generate", "--family", "minkowski", "--mass", "1", "--rmax", "2"]).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("--mass"));
}

#[test]
fn physics_violations_are_rejected_naming_field_and_radius() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("mk.json");
    let bad = dir.path().join("bad.json");
    run(&["generate", "--family", "minkowski", "--n", "64", "--rmax", "2", "--out", good.to_str().unwrap()])
        .unwrap();
    let mut file: serde_json::Value = serde_json::from_str(&read(&good)).unwrap();
    file["fields"]["g11"][5] = serde_json::json!(-1.0);
    std::fs::write(&bad, serde_json::to_string(&file).unwrap()).unwrap();

    let err = run(&["analyze", bad.to_str().unwrap()]).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    let msg = err.to_string();
    assert!(msg.contains("g11"), "names the field: {msg}");
    assert!(msg.contains("at r = "), "names the radius: {msg}");
}

#[test]
fn sweep_artifacts_are_byte_identical_across_thread_counts() {
    let bin = env!("CARGO_BIN_EXE_collapse-kit");
    let dir = tempfile::tempdir().unwrap();
    let mut artifacts = Vec::new();
    for threads in ["1", "8"] {
        let sub = dir.path().join(format!("t{threads}"));
        std::fs::create_dir(&sub).unwrap();
        let status = Command::new(bin)
            .current_dir(&sub)
            .env("COLLAPSE_KIT_THREADS", threads)
            .args(["sweep", "--trials", "32", "--out", "s.csv"])
            .output()
            .expect("binary runs");
        assert!(status.status.success());
        artifacts.push(std::fs::read(sub.join("s.csv")).unwrap());
    }
    assert_eq!(artifacts[0], artifacts[1], "thread count must not leak into artifacts");
}

#[test]
fn generate_streams_json_to_stdout_without_out() {
    let bin = env!("CARGO_BIN_EXE_collapse-kit");
    let output = Command::new(bin)
        .args(["generate", "--family", "minkowski", "--n", "64", "--rmax", "1"])
        .output()
        .expect("binary runs");
    assert!(output.status.success());
    let json: serde_json::Value = serde_json::from_slice(&output.stdout).expect("stdout is the data file");
    assert_eq!(json["schema"], "collapse-kit/v1");
    assert_eq!(json["grid"].as_array().unwrap().len(), 64);
}

#[test]
fn bad_thread_env_is_a_usage_error_at_the_binary_boundary() {
    let bin = env!("CARGO_BIN_EXE_collapse-kit");
    let output = Command::new(bin)
        .env("COLLAPSE_KIT_THREADS", "zero")
        .args(["sweep", "--trials", "2"])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("COLLAPSE_KIT_THREADS"), "stderr: {stderr}");
}
