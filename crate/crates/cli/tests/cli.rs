//! Exit codes, diagnostics and report contents of the `lw6` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn lw6(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lw6")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Rows of the CSV block named `table`, split into fields.
fn csv_rows(text: &str, table: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = Vec::new();
    let mut rows = Vec::new();
    for block in text.split("\n\n") {
        let mut lines = block.lines();
        let Some(h) = lines.next() else { continue };
        let body: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
        if body.first().is_some_and(|r| r[0] == table) {
            header = h.split(',').map(String::from).collect();
            rows = body;
        }
    }
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name} in {header:?}"))
}

#[test]
fn verify_on_hyperbolic_motion_passes() {
    let path = scenario("verify_hyperbolic.toml");
    let out = lw6(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("exit 0"));
}

#[test]
fn perturbed_numeric_tolerance_exits_3() {
    let path = scenario("flux_helical.toml");
    let out = lw6(&["flux", "--config", path.to_str().unwrap(), "--set", "tolerances.flux_rad=1e-30"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("check failed: radiative momentum flux"));
}

#[test]
fn perturbed_convergence_tolerance_exits_4() {
    let out = lw6(&["verify", "--set", "tolerances.order=1e-9"]);
    assert_eq!(code(&out), 4);
    let path = scenario("sweep_hyperbolic.toml");
    let out = lw6(&["sweep", "--config", path.to_str().unwrap(), "--set", "tolerances.exponent=1e-30"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn convergence_outranks_numeric_failures() {
    let out = lw6(&["verify", "--set", "tolerances.order=1e-9", "--set", "tolerances.moments=1e-30"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn exhausted_step_budget_is_a_convergence_failure() {
    let path = scenario("simulate_constant_force.toml");
    let out = lw6(&["simulate", "--config", path.to_str().unwrap(), "--set", "numeric.max_steps=3"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn malformed_config_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[charge]\ne = 1.0\n\n[numeric]\ntau = [0.0, \n").unwrap();
    let out = lw6(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains(&format!("{}:", path.display())), "{err}");
    assert!(out.stdout.is_empty());

    std::fs::write(&path, "[charge]\ne = 1.0\n\n[numeric]\ntau = [1.0, 1.0]\n").unwrap();
    let out = lw6(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains(":5:"), "{}", stderr(&out));

    std::fs::write(&path, "[numeric]\nsamples = 4\nunknown_key = 1\n").unwrap();
    let out = lw6(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains(":3:"), "{}", stderr(&out));
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(code(&lw6(&["verify", "--config", "/nonexistent/scenario.toml"])), 2);
    assert_eq!(code(&lw6(&["verify", "--set", "numeric.samples"])), 2);
    assert_eq!(code(&lw6(&["verify", "--set", "numeric.samples=0"])), 2);
    assert_eq!(code(&lw6(&["verify", "--set", "scenario.task=\"flux\""])), 2);
    assert_eq!(code(&lw6(&["verify", "--format", "xml"])), 2);
    assert_eq!(code(&lw6(&[])), 2);
}

#[test]
fn help_texts_exit_0() {
    let out = lw6(&["--help-config"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("[tolerances]"));
    let out = lw6(&["--help-columns"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("fd_error"));
    assert_eq!(code(&lw6(&["--help"])), 0);
}

#[test]
fn uniform_flux_has_zero_radiative_columns() {
    let path = scenario("flux_uniform.toml");
    let out = lw6(&["flux", "--config", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let (header, rows) = csv_rows(&text, "flux");
    let (comp, closed, numeric) = (column(&header, "component"), column(&header, "closed_form"), column(&header, "numeric"));
    let radiative: Vec<_> = rows.iter().filter(|r| r[comp].contains("_rad")).collect();
    assert_eq!(radiative.len(), 2 * (6 + 15));
    for r in radiative {
        assert_eq!(r[closed], "0", "{r:?}");
        assert_eq!(r[numeric], "0", "{r:?}");
    }
}

#[test]
fn sweep_reports_all_three_exponents() {
    let path = scenario("sweep_hyperbolic.toml");
    let out = lw6(&["sweep", "--config", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&stdout(&out), "exponents");
    let (power, fitted) = (column(&header, "power"), column(&header, "fitted"));
    let powers: Vec<&str> = rows.iter().map(|r| r[power].as_str()).collect();
    assert_eq!(powers, ["-3", "-2", "-1"]);
    for r in &rows {
        let p: f64 = r[power].parse().unwrap();
        let f: f64 = r[fitted].parse().unwrap();
        assert!((f - p).abs() <= 0.02, "{r:?}");
    }
}

#[test]
fn static_sweep_has_only_the_inverse_cube() {
    let path = scenario("sweep_static.toml");
    let out = lw6(&["sweep", "--config", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&stdout(&out), "endpoint");
    let (power, present) = (column(&header, "power"), column(&header, "present"));
    let found: Vec<&str> = rows.iter().filter(|r| r[present] == "yes").map(|r| r[power].as_str()).collect();
    assert_eq!(found, ["-3"]);
}

#[test]
fn simulate_report_has_drift_column() {
    let path = scenario("simulate_constant_force.toml");
    let out = lw6(&["simulate", "--config", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let (header, rows) = csv_rows(&stdout(&out), "trajectory");
    let drift = column(&header, "drift");
    assert_eq!(rows.len(), 50);
    for r in &rows {
        assert!(r[drift].parse::<f64>().unwrap() <= 1e-7);
    }
}

#[test]
fn csv_layout() {
    let out = lw6(&["fields", "--format", "csv", "--set", "numeric.samples=3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let blocks: Vec<&str> = text.trim_end().split("\n\n").collect();
    assert_eq!(blocks.len(), 2);
    assert!(blocks[0].starts_with("table,tau,r,"));
    assert!(blocks[1].starts_with("table,check,class,residual,tolerance,pass"));
    let width = blocks[0].lines().next().unwrap().split(',').count();
    for line in blocks[0].lines().skip(1) {
        assert!(line.starts_with("fields,"));
        assert_eq!(line.split(',').count(), width);
    }
}

#[test]
fn timings_only_on_request() {
    let plain = stdout(&lw6(&["simulate", "--format", "structured"]));
    let v: serde_json::Value = serde_json::from_str(&plain).unwrap();
    assert!(v["metadata"].get("timings").is_none());
    let timed = stdout(&lw6(&["simulate", "--format", "structured", "--timings"]));
    let v: serde_json::Value = serde_json::from_str(&timed).unwrap();
    assert!(v["metadata"]["timings"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn report_goes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = lw6(&["simulate", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("table,"));
}

#[test]
fn quick_mode_is_marked_and_passes() {
    for task in ["verify", "flux", "sweep", "simulate", "fields"] {
        let out = lw6(&[task, "--quick", "--format", "structured"]);
        assert_eq!(code(&out), 0, "{task}: {}", stderr(&out));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["metadata"]["quick"], true);
    }
}
