use std::process::Command as Process;

use serde_json::json;
use wadams::cli::{run, Command, Exit, RunConfig};

fn config(value: serde_json::Value, dir: &tempfile::TempDir) -> RunConfig {
    let mut c: RunConfig = serde_json::from_value(value).unwrap();
    c.out = Some(dir.path().to_path_buf());
    c
}

#[test]
fn malformed_json_is_config_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ \"seed\": ").unwrap();
    let status = Process::new(env!("CARGO_BIN_EXE_wadams"))
        .args(["check-weight", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unknown_fields_are_rejected() {
    assert!(RunConfig::from_json(r#"{"sede": 3}"#).is_err());
}

#[test]
fn command_mismatch_is_config_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(json!({"command": "solve"}), &dir);
    assert_eq!(run(Command::Norms, &c).exit, Exit::ConfigInvalid);
}

#[test]
fn small_exponent_is_config_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(json!({"params": {"growth": {"p": 3.0}}}), &dir);
    let out = run(Command::Solve, &c);
    assert_eq!(out.exit, Exit::ConfigInvalid, "{}", out.summary);
}

#[test]
fn iteration_cap_is_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(json!({"params": {"max_iterations": 1}}), &dir);
    let out = run(Command::Solve, &c);
    assert_eq!(out.exit, Exit::NonConvergence, "{}", out.summary);
    assert!(dir.path().join("trace.csv").exists());
    assert!(dir.path().join("solve.json").exists());
}

#[test]
fn default_solve_is_certified() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(Command::Solve, &config(json!({}), &dir));
    assert_eq!(out.exit, Exit::Pass, "{}", out.summary);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("solve.json")).unwrap()).unwrap();
    assert_eq!(report["certified"], json!(true));
    assert!(report["config"].get("out").is_none());
}

#[test]
fn weight_inside_solve_params_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(json!({"params": {"weight": {"beta": 0.5, "chi": {"kind": "power", "a": 3.5}}}}), &dir);
    assert_eq!(run(Command::Solve, &c).exit, Exit::ConfigInvalid);
}

#[test]
fn empty_alpha_list_is_config_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(json!({"params": {"alpha_factors": []}}), &dir);
    assert_eq!(run(Command::Dichotomy, &c).exit, Exit::ConfigInvalid);
}

#[test]
fn zero_function_passes_at_zero_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(
        json!({"params": {
            "corpus_size": 0,
            "functions": [{"terms": [{"kind": "gaussian", "amplitude": 0.0, "width": 1.0}]}],
            "tolerance": 0.0
        }}),
        &dir,
    );
    let out = run(Command::RadialLemma, &c);
    assert_eq!(out.exit, Exit::Pass, "{}", out.summary);
}

#[test]
fn overstated_decay_is_config_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(
        json!({"params": {
            "corpus_size": 0,
            "functions": [{"terms": [{"kind": "rational", "amplitude": 1.0, "width": 1.0, "power": 1.5}], "decay": 5.0}]
        }}),
        &dir,
    );
    assert_eq!(run(Command::RadialLemma, &c).exit, Exit::ConfigInvalid);
}

#[test]
fn default_weight_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(Command::CheckWeight, &config(json!({}), &dir));
    assert_eq!(out.exit, Exit::Pass, "{}", out.summary);
}

#[test]
fn steep_weight_fails_its_checks() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(json!({"weight": {"beta": 0.5, "chi": {"kind": "power", "a": 4.5}}}), &dir);
    assert_eq!(run(Command::CheckWeight, &c).exit, Exit::ConditionFail);
}

#[test]
fn reports_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for cmd in [Command::Norms, Command::RadialLemma] {
        let v = json!({"seed": 9});
        assert_eq!(run(cmd, &config(v.clone(), &a)).exit, Exit::Pass);
        assert_eq!(run(cmd, &config(v, &b)).exit, Exit::Pass);
    }
    for name in ["norms.json", "norms.csv", "radial_lemma.json", "radial_lemma.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
}
