//! End-to-end checks of the binary: flag handling, range expansion, exit
//! codes, and agreement with direct library calls.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_threshcov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn coverage_row_matches_library() {
    let text = stdout(&[
        "coverage",
        "--estimator",
        "soft",
        "--n",
        "1",
        "--eta",
        "1",
        "--a",
        "2",
        "--b",
        "2",
        "--theta",
        "0",
    ]);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "estimator,n,eta,sigma,a,b,open,theta,value,method,err"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let value: f64 = row[8].parse().unwrap();
    let setup = threshcov::ProblemSetup::standardized(1, 1.0).unwrap();
    let iv = threshcov::IntervalSpec::closed(2.0, 2.0).unwrap();
    let want = threshcov::coverage::coverage_soft(&setup, &iv, 0.0).value;
    assert_eq!(value, want, "CLI must add no computation of its own");
    assert_eq!(row[9], "closed-form");
}

#[test]
fn theta_range_expands_inclusively() {
    let text = stdout(&[
        "coverage",
        "--estimator",
        "hard",
        "--n",
        "4",
        "--eta",
        "0.5",
        "--a",
        "1",
        "--b",
        "1",
        "--theta",
        "-5:5:0.1",
    ]);
    // header plus 101 rows
    assert_eq!(text.lines().count(), 102);
    let last = text.lines().last().unwrap();
    let theta: f64 = last.split(',').nth(7).unwrap().parse().unwrap();
    assert!((theta - 5.0).abs() <= 1e-12);
}

#[test]
fn unknown_variance_rows_use_quadrature() {
    let text = stdout(&[
        "coverage",
        "--estimator",
        "soft",
        "--n",
        "2",
        "--eta",
        "1",
        "--a",
        "1.5",
        "--b",
        "1.5",
        "--theta",
        "0.3",
        "--unknown-variance",
    ]);
    let row = text.lines().nth(1).unwrap();
    assert!(row.contains("quadrature"));
}

#[test]
fn shortest_ordering_in_one_run() {
    let mut values = Vec::new();
    for est in ["hard", "adaptive", "soft"] {
        let text = stdout(&[
            "shortest",
            "--estimator",
            est,
            "--n",
            "9",
            "--eta",
            "0.6",
            "--delta",
            "0.9",
        ]);
        let row = text.lines().nth(1).unwrap();
        let a_star: f64 = row.split(',').nth(5).unwrap().parse().unwrap();
        let residual: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
        assert!(residual.abs() <= 1e-10);
        values.push(a_star);
    }
    assert!(values[0] > values[1] && values[1] > values[2]);
    let std = threshcov::shortest::standard_half_length(9, 0.9).unwrap();
    assert!(values[2] > std);
}

#[test]
fn shortest_unknown_variance_needs_soft() {
    let out = run(&[
        "shortest",
        "--estimator",
        "hard",
        "--n",
        "5",
        "--eta",
        "0.5",
        "--delta",
        "0.9",
        "--unknown-variance",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no closed form; use mc-scan"));
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["coverage", "--estimator", "quantum", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["coverage"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    let out = run(&[
        "shortest",
        "--estimator",
        "soft",
        "--n",
        "1",
        "--eta",
        "1",
        "--delta",
        "1.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "coverage",
        "--estimator",
        "soft",
        "--n",
        "1",
        "--eta",
        "1",
        "--a",
        "1",
        "--b",
        "2",
        "--theta",
        "0",
        "--unknown-variance",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn mc_seed_repetition_is_byte_identical() {
    let args = [
        "mc",
        "--estimator",
        "adaptive",
        "--n",
        "4",
        "--eta",
        "0.8",
        "--a",
        "1",
        "--b",
        "1",
        "--theta",
        "0.5",
        "--reps",
        "20000",
        "--seed",
        "77",
    ];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn mc_dn_scan_emits_grid_rows() {
    let text = stdout(&[
        "mc",
        "--estimator",
        "soft",
        "--n",
        "100",
        "--eta",
        "0.3",
        "--dn",
        "1.1",
        "--scan",
        "--scan-points",
        "9",
        "--reps",
        "2000",
        "--seed",
        "3",
    ]);
    assert!(text.lines().count() > 9);
    // half-widths derived from dn: a = b = 1.1 * 0.3
    let row = text.lines().nth(1).unwrap();
    let a: f64 = row.split(',').nth(4).unwrap().parse().unwrap();
    assert!((a - 0.33).abs() <= 1e-15);
}

#[test]
fn figure1_writes_expected_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    let text_path = path.to_str().unwrap();
    stdout(&[
        "figure1", "--deltas", "0.9", "--xmax", "0.2", "--step", "0.1", "--out", text_path,
    ]);
    let body = std::fs::read_to_string(&path).unwrap();
    let mut lines = body.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sqrt_n_eta,delta,half_hard,half_adaptive,half_soft,half_standard"
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    // x = 0: every curve equals the standard half-length
    let vals: Vec<f64> = first[2..6].iter().map(|v| v.parse().unwrap()).collect();
    assert!(vals.iter().all(|v| (*v - vals[3]).abs() <= 1e-15));
    assert_eq!(body.lines().count(), 1 + 3);
}
