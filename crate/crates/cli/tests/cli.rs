//! End-to-end checks of the `edr` binary: flag plumbing, config files,
//! CSV shape, determinism, and the exit code contract.

use std::path::Path;
use std::process::{Command, Output};

fn edr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Data rows of a CSV dump, split into fields; asserts the expected header.
fn rows(out: &Output, header: &str) -> Vec<Vec<String>> {
    let text = stdout(out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(header));
    lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn field(row: &[String], i: usize) -> f64 {
    row[i].parse().expect("numeric field")
}

#[test]
fn sweep_flags_produce_closed_form_endpoints() {
    let out = edr(&["sweep", "--grid", "0,1", "--methods", "direct"]);
    assert_eq!(code(&out), 0);
    let rows = rows(&out, edr_core::sweep::SWEEP_CSV_HEADER);
    assert_eq!(rows.len(), 2);
    // eps(0) = sqrt(2), eta(0) = 0; eps(1) = 0, eta(1) = sqrt(2)
    assert_eq!(rows[0][0], "direct");
    assert!((field(&rows[0], 2) - 2f64.sqrt()).abs() < 1e-10);
    assert!(field(&rows[0], 3).abs() < 1e-10);
    assert!(field(&rows[1], 2).abs() < 1e-10);
    assert!((field(&rows[1], 3) - 2f64.sqrt()).abs() < 1e-10);
    // exact rows carry no error bars
    assert!(rows[0][4].is_empty() && rows[0][5].is_empty());
}

#[test]
fn sweep_default_run_covers_grid_and_methods() {
    let out = edr(&["sweep"]);
    assert_eq!(code(&out), 0);
    let rows = rows(&out, edr_core::sweep::SWEEP_CSV_HEADER);
    assert_eq!(rows.len(), 21 * 3);
}

#[test]
fn monte_carlo_rows_carry_error_bars() {
    let out = edr(&[
        "sweep",
        "--grid",
        "0.5",
        "--methods",
        "weak_probe",
        "--mode",
        "mc",
        "--total",
        "20000",
        "--reps",
        "3",
        "--seed",
        "4",
    ]);
    assert_eq!(code(&out), 0);
    let rows = rows(&out, edr_core::sweep::SWEEP_CSV_HEADER);
    assert_eq!(rows.len(), 1);
    assert!(field(&rows[0], 4) > 0.0);
    assert!(field(&rows[0], 5) > 0.0);
}

#[test]
fn pbs_flags_switch_to_imperfect_optics() {
    // ideal eps vanishes at full strength; a leaky main apparatus does not
    let out = edr(&[
        "sweep",
        "--grid",
        "1",
        "--methods",
        "direct",
        "--pbs-ma",
        "50,1000",
    ]);
    assert_eq!(code(&out), 0);
    let rows = rows(&out, edr_core::sweep::SWEEP_CSV_HEADER);
    assert!(field(&rows[0], 2) > 0.01);
}

#[test]
fn config_file_and_flag_overrides_compose() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "grid = [0.0, 1.0]\nmethods = [\"direct\"]\nwp_strength = 0.3\n",
    )
    .unwrap();
    let from_file = edr(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&from_file), 0);

    let from_flags = edr(&[
        "sweep",
        "--grid",
        "0,1",
        "--methods",
        "direct",
        "--wp-strength",
        "0.3",
    ]);
    assert_eq!(stdout(&from_file), stdout(&from_flags));

    // flag wins over the file value
    let overridden = edr(&["sweep", "--config", path.to_str().unwrap(), "--grid", "0.5"]);
    let rows = rows(&overridden, edr_core::sweep::SWEEP_CSV_HEADER);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1], "0.5");
}

#[test]
fn config_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &["sweep", "--wp-strength", "0"],
        &["sweep", "--grid", "1.5"],
        &["sweep", "--methods", "bogus"],
        &["sweep", "--mode", "sometimes"],
        &["sweep", "--norm", "percent"],
        &["sweep", "--signal", "q+"],
        &["sweep", "--pbs-wp", "100"],
        &["sweep", "--config", "/nonexistent/run.toml"],
        &["bounds", "--kind", "newton"],
        &["bounds", "--c", "1.5"],
        &["counts", "--probe-basis", "y"],
    ];
    for args in cases {
        let out = edr(args);
        assert_eq!(code(&out), 2, "args {args:?}: {}", stderr(&out));
    }
    let out = edr(&["sweep", "--wp-strength", "0"]);
    assert!(stderr(&out).contains("wp_strength"));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "gride = [0.5]\n").unwrap();
    let out = edr(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("config parse error"));
}

#[test]
fn estimator_breakdown_exits_3() {
    // per-column conditionals roughly double the correlator, so the
    // squared-quantity radicand goes far negative at high strength
    let out = edr(&[
        "sweep",
        "--grid",
        "0.9",
        "--methods",
        "weak_probe",
        "--mode",
        "mc",
        "--total",
        "10000",
        "--reps",
        "2",
        "--seed",
        "1",
        "--norm",
        "paper",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("negative"));
}

#[test]
fn bounds_reference_values() {
    let out = edr(&["bounds", "--kind", "ozawa", "--c", "1", "--grid", "0,0.5,1"]);
    assert_eq!(code(&out), 0);
    let rows = rows(&out, edr_core::sweep::BOUNDS_CSV_HEADER);
    assert_eq!(rows.len(), 3);
    assert!((field(&rows[0], 3) - 1.0).abs() < 1e-12);
    assert!((field(&rows[1], 3) - 1.0 / 3.0).abs() < 1e-12);
    assert!(field(&rows[2], 3).abs() < 1e-12);
}

#[test]
fn bounds_default_emits_all_kinds() {
    let out = edr(&["bounds"]);
    assert_eq!(code(&out), 0);
    let rows = rows(&out, edr_core::sweep::BOUNDS_CSV_HEADER);
    assert_eq!(rows.len(), 4 * 50);
    for kind in ["heisenberg", "ozawa", "branciard", "branciard_tight"] {
        assert!(rows.iter().any(|r| r[0] == kind));
    }
    // the diverging heisenberg curve leaves eta empty at eps = 0
    assert_eq!(rows[0][0], "heisenberg");
    assert!(rows[0][3].is_empty());
}

#[test]
fn counts_rows_are_deterministic_and_sum_to_total() {
    let args = [
        "counts", "--grid", "0,0.5", "--total", "1000", "--reps", "2", "--seed", "7",
    ];
    let first = edr(&args);
    assert_eq!(code(&first), 0);
    let second = edr(&args);
    assert_eq!(stdout(&first), stdout(&second));

    let rows = rows(&first, edr_core::counts::CountsRecord::<f64>::CSV_HEADER);
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let total: u64 = row[1].parse().unwrap();
        assert_eq!(total, 1000);
        let sum: u64 = row[2..].iter().map(|c| c.parse::<u64>().unwrap()).sum();
        assert_eq!(sum, total);
    }

    let x_side = edr(&[
        "counts",
        "--grid",
        "0,0.5",
        "--total",
        "1000",
        "--reps",
        "2",
        "--seed",
        "7",
        "--probe-basis",
        "x",
    ]);
    assert_ne!(stdout(&first), stdout(&x_side));
}

#[test]
fn out_flag_writes_file_instead_of_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let out = edr(&[
        "sweep",
        "--grid",
        "0",
        "--methods",
        "direct",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(Path::new(&path)).unwrap();
    assert!(text.starts_with(edr_core::sweep::SWEEP_CSV_HEADER));
    assert!(text.ends_with('\n'));
}

#[test]
fn validate_reports_every_check() {
    let out = edr(&["validate"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(!text.contains("FAIL"));
    assert_eq!(text.matches("PASS ").count(), 15);
    assert!(text.contains("all 15 checks passed"));
}
