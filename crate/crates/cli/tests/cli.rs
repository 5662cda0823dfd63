//! End-to-end checks of the command-line surface: flag handling, exit
//! codes, CSV shapes, and determinism.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extquad"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

#[test]
fn bound_reports_the_golden_ratio() {
    let out = run(&["bound", "--alpha", "2", "--m", "1", "--M", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("1.61803398875"), "missing rho*: {text}");
    assert!(text.contains("1.50000000000"), "missing floor: {text}");
}

#[test]
fn bound_csv_has_quantity_rows() {
    let out = run(&["bound", "--alpha", "2", "--m", "1", "--M", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("quantity,value\n"));
    assert!(text.contains("closed_form_floor,1.25000000000"));
    assert!(text.contains("method,agreement_of_both"));
}

#[test]
fn bound_rejects_alpha_at_one_with_exit_two() {
    let out = run(&["bound", "--alpha", "1", "--m", "1", "--M", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).expect("utf8");
    assert!(err.contains("alpha must exceed 1"), "stderr: {err}");
}

#[test]
fn unknown_flags_exit_two() {
    let out = run(&["bound", "--alpha", "2", "--m", "1", "--M", "1", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn curve_rows_are_sorted_and_finite() {
    let out = run(&["curve"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("alpha"))
        .map(|l| l.split(',').map(|v| v.parse().expect("numeric field")).collect())
        .collect();
    assert_eq!(rows.len(), 59 * 5, "59 alphas x 5 ratios");
    let mut last = (0.0, 0.0);
    for row in &rows {
        let (alpha, ratio, rho, floor) = (row[0], row[1], row[2], row[3]);
        assert!(alpha.is_finite() && ratio.is_finite() && rho.is_finite() && floor.is_finite());
        assert!((1.0..2.0).contains(&rho), "rho* out of window: {rho}");
        assert!((1.0..2.0).contains(&floor));
        assert!(rho >= floor);
        assert!((ratio, alpha) > last, "rows must be sorted by (ratio, alpha)");
        last = (ratio, alpha);
    }
    // the golden-ratio row
    assert!(text.contains("2.00000000000,1.00000000000,1.61803398875,1.50000000000"));
}

#[test]
fn curve_m_over_m_one_dominates_at_equal_alpha() {
    let out = run(&["curve", "--ratios", "1,0.5"]);
    let text = stdout(&out);
    let mut by_ratio: std::collections::HashMap<String, Vec<f64>> = Default::default();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("alpha")) {
        let fields: Vec<&str> = line.split(',').collect();
        by_ratio
            .entry(fields[1].to_string())
            .or_default()
            .push(fields[2].parse().expect("rho"));
    }
    let top = &by_ratio["1.00000000000"];
    let half = &by_ratio["0.500000000000"];
    assert_eq!(top.len(), half.len());
    for (a, b) in top.iter().zip(half) {
        assert!(a >= b, "m/M = 1 must dominate: {a} < {b}");
    }
}

#[test]
fn schedule_doubles_from_one() {
    let out = run(&["schedule", "--n1", "1", "--rho", "2", "--count", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let ns: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).expect("n_k field"))
        .collect();
    assert_eq!(ns, vec!["1", "2", "4", "8", "16"]);
}

#[test]
fn schedule_arithmetic_mode() {
    let out = run(&["schedule", "--n1", "100", "--step", "100", "--count", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("1,100,\n"));
    assert!(text.contains("3,300,1.50000000000"));
}

#[test]
fn identity_check_pretty_summarizes() {
    let out = run(&["identity-check", "--format", "pretty"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("667 cases"));
    assert!(text.contains("PASS"));
}

#[test]
fn schedule_requires_exactly_one_growth_mode() {
    let out = run(&["schedule", "--n1", "1", "--count", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["schedule", "--n1", "1", "--rho", "2", "--step", "3", "--count", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_flags_arithmetic_steps() {
    let out = run(&["validate", "--sizes", "100,200,300", "--alpha", "2", "--m", "1", "--M", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("1,2.00000000000,1.61803398875,true"));
    assert!(text.contains("2,1.50000000000,1.61803398875,false"));
    assert!(text.contains("admissible: false"));
}

#[test]
fn validate_accepts_doubling_at_alpha_three() {
    let out = run(&["validate", "--sizes", "64,128", "--alpha", "3", "--m", "1", "--M", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("admissible: true"));
}

#[test]
fn validate_rejects_malformed_sizes() {
    let out = run(&["validate", "--sizes", "10,oops", "--alpha", "2", "--m", "1", "--M", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["validate", "--sizes", "10,10", "--alpha", "2", "--m", "1", "--M", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_path_exits_three() {
    let out = run(&[
        "curve",
        "--output",
        "/nonexistent-dir/curve.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn identity_check_passes_and_is_deterministic() {
    let a = run(&["identity-check", "--seed", "7"]);
    assert!(a.status.success());
    let b = run(&["identity-check", "--seed", "7"]);
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    assert!(text.contains("result: PASS"));
    // header plus one row per case
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 667 + 1);
}

#[test]
fn experiment_small_run_reports_properties() {
    let out = run(&["experiment", "--replicates", "8", "--seed", "3"]);
    let text = stdout(&out);
    assert!(text.contains("# identity_suite:"));
    assert!(text.contains("# iid_rate_window:"));
    assert!(text.contains("# scrambled_rate:"));
    assert!(text.contains("# weighted_block_rate:"));
    assert!(text.contains("# off_schedule_degradation:"));
    assert!(text.lines().next().expect("header").starts_with("# experiment seed=3 replicates=8"));
}
