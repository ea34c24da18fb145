//! Config-layer tests: defaults, exhaustive error collection, nearest-key
//! suggestions, regime screening and the emit/parse round trip.

use std::path::Path;
use std::process::Command;

use bresse_cli::config::{parse_config, ConfigIssue, ExperimentKind, RunConfig};

fn parse(text: &str) -> Result<RunConfig, Vec<ConfigIssue>> {
    parse_config(text)
}

#[test]
fn minimal_config_applies_defaults() {
    let cfg = parse("[model]\nlength = 1.0\n\n[experiment]\nkind = \"simulate\"\n").unwrap();
    assert_eq!(cfg.model.length, 1.0);
    assert_eq!(cfg.model.rho1, 1.0);
    assert_eq!(cfg.grid.n, 128);
    assert_eq!(cfg.stepper.newton_tol, 1e-10);
    assert_eq!(cfg.experiment.seed, 42);
    assert_eq!(cfg.output.dir, "out");
    assert_eq!(cfg.experiment.kind, Some(ExperimentKind::Simulate));
}

#[test]
fn misspelled_key_suggests_nearest() {
    let err = parse("[model]\nrho_one = 1.0\n").unwrap_err();
    assert_eq!(err.len(), 1);
    assert!(err[0].path.contains("rho_one"));
    assert!(err[0].message.contains("rho1"), "message: {}", err[0].message);
}

#[test]
fn curvature_above_cap_is_a_regime_error_for_limit_experiments() {
    let err = parse(
        "[model]\nlength = 3.141592653589793\nell = 2.0\n\n[experiment]\nkind = \"singular-limit\"\n",
    )
    .unwrap_err();
    assert_eq!(err.len(), 1);
    assert!(err[0].path == "model.ell");
    assert!(err[0].message.contains("pi/(2 L) = 0.5"), "message: {}", err[0].message);
    // the same curvature is fine for a plain simulation
    let ok = parse("[model]\nlength = 3.141592653589793\nell = 2.0\n\n[experiment]\nkind = \"simulate\"\n");
    assert!(ok.is_ok());
}

#[test]
fn all_errors_are_collected() {
    let err = parse(
        "[model]\nlength = -1.0\nrho_one = 1.0\n\n[grid]\nn = 1\n\n[stepper]\ndt = -0.5\n",
    )
    .unwrap_err();
    let paths: Vec<&str> = err.iter().map(|i| i.path.as_str()).collect();
    assert!(paths.iter().any(|p| p.contains("rho_one")));
    assert!(paths.iter().any(|p| *p == "model"));
    assert!(paths.iter().any(|p| *p == "grid.n"));
    assert!(paths.iter().any(|p| *p == "stepper.dt"));
    assert!(err.len() >= 4, "collected {err:?}");
}

#[test]
fn type_mismatches_are_reported_per_key() {
    let err = parse("[grid]\nn = \"many\"\n\n[experiment]\nseed = -3\n").unwrap_err();
    assert!(err.iter().any(|i| i.path == "grid.n"));
    assert!(err.iter().any(|i| i.path == "experiment.seed"));
}

#[test]
fn unknown_experiment_kind_is_an_error() {
    let err = parse("[experiment]\nkind = \"simulat\"\n").unwrap_err();
    assert!(err[0].message.contains("simulate"), "message: {}", err[0].message);
}

#[test]
fn emit_parse_round_trip_is_identity() {
    let cfg = parse(
        "[model]\nlength = 2.5\nell = 0.25\nk = 1.5\n\n[model.damping]\nkind = \"clipped-cubic\"\ns0 = 0.8\n\n[grid]\nn = 64\n\n[stepper]\ndt = 0.002\n\n[experiment]\nkind = \"decay-fit\"\nhorizon = 3.0\nseed = 7\nell_list = [0.2, 0.1]\n\n[output]\ndir = \"results\"\nsnapshots = true\n",
    )
    .unwrap();
    let emitted = cfg.emit();
    let reparsed = parse(&emitted).unwrap_or_else(|e| panic!("emitted config failed to parse: {e:?}\n{emitted}"));
    assert_eq!(cfg, reparsed);
    // and emit is stable under a second pass
    assert_eq!(emitted, reparsed.emit());
}

#[test]
fn default_config_round_trips_too() {
    let cfg = RunConfig::default();
    let reparsed = parse(&cfg.emit()).unwrap();
    assert_eq!(cfg, reparsed);
}

// ---------------------------------------------------------------------------
// end-to-end binary checks

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bresse"))
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn zero_horizon_simulation_emits_single_data_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[grid]\nn = 8\n\n[experiment]\nkind = \"simulate\"\nhorizon = 0.0\n",
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = csv.trim().lines().collect();
    assert_eq!(lines.len(), 2, "header plus one row: {csv}");
    assert!(lines[0].starts_with("t,E,Etotal"));
    assert!(out.join("summary.json").exists());
    assert!(out.join("manifest.json").exists());
}

#[test]
fn config_errors_exit_2_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[model]\nrho_one = 1.0\n");
    let output = bin().args(["simulate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&output.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
    assert!(err["error"]["issues"].as_array().unwrap()[0]["message"]
        .as_str()
        .unwrap()
        .contains("rho1"));
}

#[test]
fn subcommand_config_kind_mismatch_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[experiment]\nkind = \"simulate\"\n");
    let output = bin().args(["verify", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn singular_limit_with_longitudinally_coupled_forcing_fails_citing_the_condition() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[model]\n\n[model.forcing]\nkind = \"isotropic-quartic\"\nc = 1.0\n\n[grid]\nn = 8\n\n[experiment]\nkind = \"singular-limit\"\nhorizon = 0.05\n",
    );
    let out = dir.path().join("out");
    let output = bin()
        .args(["singular-limit", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&output.stderr).unwrap();
    let message = err["error"]["message"].as_str().unwrap();
    assert!(
        message.contains("f1") && message.contains("longitudinal"),
        "message: {message}"
    );
}

#[test]
fn verify_on_defaults_passes_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[experiment]\nkind = \"verify\"\n\n[grid]\nn = 48\n");
    let out = dir.path().join("out");
    let status = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["all_passed"], true);
}

#[test]
fn identical_configs_produce_byte_identical_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[grid]\nn = 16\n\n[experiment]\nkind = \"decay-fit\"\nhorizon = 10.0\nseed = 9\nstride = 1\n\n[experiment.initial]\nkind = \"random\"\nenergy = 1.0\n",
    );
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = bin()
            .args(["decay-fit", "--config"])
            .arg(&cfg)
            .arg("--output")
            .arg(&out)
            .arg("--workers")
            .arg(if name == "a" { "1" } else { "3" })
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out.join("summary.json")).unwrap()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
}
