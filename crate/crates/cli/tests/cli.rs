//! End-to-end tests of the `chaplygin` binary: output formats, exit codes,
//! determinism, overrides.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chaplygin"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.display().to_string()
}

#[test]
fn simulate_csv_contract() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sim.json",
        r#"{"system": "vertical-disk", "t_final": 0.5, "dt": 0.001}"#,
    );
    let out = run(&["simulate", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).expect("ascii output");
    assert!(text.is_ascii());
    assert!(!text.contains('\r'), "LF endings only");
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,q1,q2,q3,q4,v1,v2,v3,v4");
    // 501 samples for t in [0, 0.5] at dt = 1e-3.
    assert_eq!(text.lines().count(), 502);
    let first_data = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = first_data.split(',').collect();
    assert_eq!(fields.len(), 9);
    // 17 significant digits: mantissa with 16 decimals.
    assert!(fields[0].starts_with("0.0000000000000000e0"));
    for f in &fields {
        f.parse::<f64>().expect("parseable float");
    }
}

#[test]
fn simulate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sim.json",
        r#"{"system": "nonholonomic-particle", "t_final": 0.3, "seed": 5}"#,
    );
    let a = run(&["simulate", "--config", &cfg]);
    let b = run(&["simulate", "--config", &cfg]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_without_config_uses_defaults_and_passes() {
    // Shorten the window through a config to keep the test quick.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "verify.json",
        r#"{"system": "nonholonomic-particle", "t_final": 2.0, "seed": 7}"#,
    );
    let out = run(&["verify", "--config", &cfg]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["all_passed"], serde_json::Value::Bool(true));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report["seed"], serde_json::json!(7));
}

#[test]
fn verify_reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "verify.json",
        r#"{"system": "nonholonomic-particle", "t_final": 1.0, "seed": 11}"#,
    );
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    let a = run(&[
        "verify",
        "--config",
        &cfg,
        "--out",
        out_a.to_str().unwrap(),
    ]);
    let b = run(&[
        "verify",
        "--config",
        &cfg,
        "--out",
        out_b.to_str().unwrap(),
    ]);
    assert!(a.status.success() && b.status.success());
    let bytes_a = std::fs::read(&out_a).unwrap();
    let bytes_b = std::fs::read(&out_b).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown key.
    let bad_key = write_config(dir.path(), "bad1.json", r#"{"system": "veselova", "nope": 1}"#);
    let out = run(&["simulate", "--config", &bad_key]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");

    // Negative dt.
    let bad_dt = write_config(
        dir.path(),
        "bad2.json",
        r#"{"system": "vertical-disk", "dt": -0.5}"#,
    );
    let out = run(&["simulate", "--config", &bad_dt]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown system by flag.
    let out = run(&["simulate", "--system", "pendulum"]);
    assert_eq!(out.status.code(), Some(2));

    // Malformed --param.
    let out = run(&["simulate", "--system", "vertical-disk", "--param", "R0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    // Initial velocity far off the constraint distribution.
    let cfg = write_config(
        dir.path(),
        "bad_velocity.json",
        r#"{
            "system": "nonholonomic-particle",
            "initial_point": [0.0, 0.0, 0.0],
            "initial_velocity": [1.0, 1.0, 1.0],
            "t_final": 0.5
        }"#,
    );
    let out = run(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "constraint-violated");
}

#[test]
fn param_overrides_reach_the_metric() {
    // H_theta_x = -m R cos(phi); at phi = 0 with m = 2, R = 0.5 it is -1.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "metric.json",
        r#"{"system": "vertical-disk", "points": [[0.0, 0.0, 0.0, 0.0]]}"#,
    );
    let out = run(&[
        "build-metric",
        "--config",
        &cfg,
        "--param",
        "m=2.0",
        "--param",
        "R=0.5",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let h = &doc["results"][0]["metric"];
    let h_theta_x = h[0][2].as_f64().unwrap();
    assert!((h_theta_x - (-1.0)).abs() < 1e-10);
    let h_theta_theta = h[0][0].as_f64().unwrap();
    // I + 2 m R^2 = 1 + 2*2*0.25 = 2.
    assert!((h_theta_theta - 2.0).abs() < 1e-10);
}

#[test]
fn recover_phi_grid_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "phi.json",
        r#"{"system": "nonholonomic-particle", "grid": [3, 3]}"#,
    );
    let out = run(&["recover-phi", "--config", &cfg]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let values = doc["values"].as_array().unwrap();
    assert_eq!(values.len(), 9);
    for v in values {
        let p = v["point"].as_array().unwrap();
        let y = p[1].as_f64().unwrap();
        let phi = v["phi"].as_f64().unwrap();
        let expected = -0.5 * (1.0 + y * y).ln();
        assert!((phi - expected).abs() < 1e-6, "phi({y}) = {phi} vs {expected}");
        assert!(v["residual"].as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn distance_command_reports_match() {
    let out = run(&["distance", "--system", "vertical-disk"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["pass"], serde_json::Value::Bool(true));
    assert!(doc["residual"].as_f64().unwrap() <= 1e-4);
}
