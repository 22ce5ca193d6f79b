use std::process::{Command, Output};

use boxhunt_cli::output::ReportRecord;
use num::BigRational;

fn boxhunt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boxhunt"))
        .args(args)
        .env_remove("BOXHUNT_SEED")
        .env_remove("BOXHUNT_OUT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = boxhunt(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn csv_field(text: &str, row: usize, name: &str) -> String {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == name).unwrap();
    lines.nth(row).unwrap().split(',').nth(col).unwrap().to_string()
}

#[test]
fn bounds_table() {
    let out = ok(&["bounds", "--k", "1..4"]);
    let rows: Vec<(String, String)> = (0..4)
        .map(|i| (csv_field(&out, i, "uniform_fraction"), csv_field(&out, i, "adversarial_fraction")))
        .collect();
    let expect = [("1", "1"), ("6/5", "9/8"), ("3/2", "4/3"), ("20/11", "25/16")];
    for (r, e) in rows.iter().zip(expect) {
        assert_eq!((r.0.as_str(), r.1.as_str()), e);
    }
    let json: serde_json::Value = serde_json::from_str(&ok(&["bounds", "--k", "2", "--format", "json"])).unwrap();
    assert!(json.is_object());
    assert_eq!(json["uniform_bound"], 1.2);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["bounds", "--k", "0"][..],
        &["bounds", "--k", "4..2"],
        &["opt", "--k", "1"],
        &["exact", "--alg", "nope", "--k", "2", "--m", "6"],
        &["exact", "--alg", "opt", "--k", "2", "--m", "600", "--mode", "rational"],
        &["simulate", "--alg", "opt", "--k", "2", "--m", "10", "--crash", "2@0"],
        &["frobnicate"],
        &[],
    ] {
        assert_eq!(boxhunt(args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(boxhunt(&["--help"]).status.code(), Some(0));
    assert_eq!(boxhunt(&["--version"]).status.code(), Some(0));
}

#[test]
fn exact_rational_matches_hand_computation() {
    // rows of the k = 2, m = 6 non-visit matrix: x = 1,2 / 3,4 / 5,6
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let rows = [
        [q(1, 1), q(1, 2), q(1, 3), q(1, 4), q(1, 6), q(1, 12)],
        [q(1, 1), q(1, 1), q(2, 3), q(1, 2), q(1, 3), q(1, 6)],
        [q(1, 1), q(1, 1), q(1, 1), q(3, 4), q(1, 2), q(1, 4)],
    ];
    let mut theta = q(0, 1);
    for x in 1..=6i64 {
        let e: BigRational = rows[(x as usize - 1) / 2].iter().map(|v| v * v).sum();
        theta += e / q(6 * x, 1);
    }
    let out = ok(&["exact", "--alg", "opt", "--k", "2", "--m", "6", "--mode", "rational", "--check-columns"]);
    assert_eq!(csv_field(&out, 0, "theta"), format!("{}/{}", theta.numer(), theta.denom()));
    assert_eq!(csv_field(&out, 0, "mode"), "exact");
    assert_eq!(csv_field(&out, 0, "stderr"), "");
}

#[test]
fn exact_headline_values() {
    let out = ok(&["exact", "--alg", "trivial", "--k", "1", "--m", "1000"]);
    assert_eq!(csv_field(&out, 0, "speedup_inv_theta"), "1");
    let out = ok(&["exact", "--alg", "opt", "--k", "2", "--m", "6000"]);
    let s: f64 = csv_field(&out, 0, "speedup_inv_theta").parse().unwrap();
    assert!((s - 1.2).abs() < 0.05 * 1.2, "{s}");
    let out = ok(&["exact", "--alg", "all", "--k", "2..3", "--m", "30", "--check-columns"]);
    assert_eq!(out.lines().count(), 1 + 10);
}

#[test]
fn per_box_detail_follows_the_report() {
    let out = ok(&["exact", "--alg", "partition", "--k", "2", "--m", "4", "--per-x"]);
    let (report, detail) = out.split_once("\n\n").unwrap();
    assert_eq!(csv_field(report, 0, "speedup_mean"), "1.625");
    let times: Vec<String> = (0..4).map(|i| csv_field(detail, i, "expected_time")).collect();
    assert_eq!(times, ["1.0", "1.0", "2.0", "2.0"]);
}

#[test]
fn simulate_is_deterministic_and_close_to_exact() {
    let args = ["simulate", "--alg", "opt", "--k", "2", "--m", "1000", "--trials", "100000", "--seed", "7"];
    let a = boxhunt(&args);
    let b = boxhunt(&args);
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    let exact: f64 = csv_field(&ok(&["exact", "--alg", "opt", "--k", "2", "--m", "1000"]), 0, "theta").parse().unwrap();
    let est: f64 = csv_field(&out, 0, "theta").parse().unwrap();
    let se: f64 = csv_field(&out, 0, "stderr").parse().unwrap();
    assert!((est - exact).abs() <= 3.0 * se, "{est} ± {se} vs {exact}");
    assert_eq!(csv_field(&out, 0, "seed"), "7");
    assert_eq!(csv_field(&out, 0, "mode"), "montecarlo");
}

#[test]
fn crashed_partition_reports_found_fraction() {
    let o = boxhunt(&[
        "simulate", "--alg", "partition", "--k", "3", "--m", "999", "--crash", "0@0", "--trials", "1000", "--seed", "1",
        "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rec: ReportRecord = serde_json::from_slice(&o.stdout).unwrap();
    let f = rec.found_fraction.unwrap();
    assert!((f - 2.0 / 3.0).abs() < 0.05, "{f}");
    assert!(rec.report.not_found.unwrap() > 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not valid"));
}

#[test]
fn json_output_round_trips() {
    for args in [
        &["exact", "--alg", "memoryless", "--k", "3", "--m", "30", "--mode", "rational", "--per-x", "--format", "json"][..],
        &["simulate", "--alg", "stoc", "--k", "2", "--m", "50", "--trials", "3000", "--format", "json"],
    ] {
        let text = ok(args);
        let rec: ReportRecord = serde_json::from_str(&text).unwrap();
        let again = serde_json::to_string_pretty(&rec).unwrap() + "\n";
        assert_eq!(again, text);
        assert_eq!(serde_json::from_str::<ReportRecord>(&again).unwrap(), rec);
    }
}

#[test]
fn opt_table() {
    let out = ok(&["opt", "--k", "2"]);
    assert_eq!(csv_field(&out, 0, "region_below"), "0.25");
    assert_eq!(csv_field(&out, 0, "region_above"), "0.5");
    let late: f64 = csv_field(&out, 0, "region_late").parse().unwrap();
    assert!((late - 1.0 / 12.0).abs() < 1e-15);
    assert_eq!(csv_field(&out, 0, "closed_form_fraction"), "5/6");
    let out = ok(&["opt", "--k", "3", "--method", "closed"]);
    assert_eq!(csv_field(&out, 0, "closed_form_fraction"), "2/3");
    assert_eq!(csv_field(&out, 0, "quadrature"), "");
}

#[test]
fn opt_tolerance_failure_exits_two() {
    assert_eq!(boxhunt(&["opt", "--k", "2", "--tol", "1e-18"]).status.code(), Some(2));
}

#[test]
fn verify_suites_pass() {
    for args in [
        &["verify", "--suite", "gamma", "--cases", "1000", "--seed", "3"][..],
        &["verify", "--suite", "columns", "--alg", "opt", "--k", "2..4", "--m", "60"],
        &["verify", "--suite", "zoom"],
        &["verify", "--suite", "monotonicity", "--m", "40"],
        &["verify", "--suite", "mc", "--k", "2", "--m", "40", "--trials", "5000"],
    ] {
        let out = ok(args);
        assert!(out.lines().skip(1).all(|l| l.contains(",true,")), "{out}");
    }
    assert_eq!(boxhunt(&["verify", "--suite", "zoom", "--zoom-tol", "1e-12"]).status.code(), Some(2));
}

#[test]
fn output_destinations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.csv");
    let o = boxhunt(&["bounds", "--k", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("k,uniform_bound"));

    let o = Command::new(env!("CARGO_BIN_EXE_boxhunt"))
        .args(["simulate", "--alg", "trivial", "--k", "1", "--m", "5", "--trials", "10", "--format", "json"])
        .env("BOXHUNT_OUT", dir.path())
        .env("BOXHUNT_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let rec: ReportRecord =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("simulate.json")).unwrap()).unwrap();
    assert_eq!(rec.report.seed, Some(99));
    assert_eq!(rec.report.theta, 1.0);
}
