use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thermal-gbs"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn check_emits_reports() {
    let text = ok(&["check", "--set", "n_bar=0.6", "--set", "eta_l=0.5", "--set", "r=1"]);
    let reports: Vec<Value> = serde_json::from_str(&text).unwrap();
    let names: Vec<&str> = reports.iter().map(|r| r["criterion"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        [
            "general_condition",
            "uniform_recast",
            "gbs_condition",
            "gbs_threshold_temperature",
            "universal_threshold",
            "approx_condition"
        ]
    );
    let gbs = &reports[2];
    assert_eq!(gbs["verdict"], "simulable");
    let expected = 0.6 * 0.5 - 0.5 * (1.0 - (-2.0f64).exp()) / 2.0;
    assert!((gbs["margin"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert!(gbs["details"]["q_d"].is_number());
}

#[test]
fn check_at_zero_temperature_includes_comparison_bound() {
    let text = ok(&["check", "--set", "n_bar=0"]);
    let reports: Vec<Value> = serde_json::from_str(&text).unwrap();
    assert_eq!(reports.last().unwrap()["criterion"], "quesada_zero_t_condition");
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"r": 0.5, "eta_l": 0.3, "n_bar": 0.0, "m": 3}"#);
    let out = dir.path().join("report.csv");
    ok(&["check", "--config", &cfg, "--set", "n_bar=2", "--format", "csv", "--out", out.to_str().unwrap()]);
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("criterion,verdict,margin"));
    assert!(text.lines().skip(1).all(|l| l.contains(",simulable,")), "{text}");
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{\n  \"r\": 1.0,\n  \"bogus\": 3\n}");
    let out = run(&["check", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    for args in [
        &["check", "--set", "eta_l=1.5"][..],
        &["check", "--set", "nonsense=1"],
        &["phase-diagram", "--sweep", "n_bar:0:1"],
        &["phase-diagram", "--sweep", "n_bar:0:1:0"],
        &["check", "--set", "n_bar=1", "--set", "temperature=0.1"],
        &["check", "--bogus-flag"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn infeasible_plan_exits_with_three() {
    let out = run(&["sample", "--set", "n_bar=0", "--set", "m=2", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["compare", "--set", "n_bar=0", "--set", "m=2", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oracle_scale_exits_with_four() {
    let out = run(&["compare", "--set", "m=13", "--set", "n_bar=5", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(4));
    let out = run(&["sample", "--exact", "--set", "m=13", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn phase_diagram_csv_is_versioned() {
    let text = ok(&["phase-diagram", "--sweep", "n_bar:0:1:5", "--set", "eta_l=0.5", "--set", "r=1"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# thermal-gbs phase-diagram v1"));
    let header = lines.next().unwrap();
    assert!(header.starts_with("r,eta_l,n_bar,eta_d,p_d,epsilon,m,general_condition_margin,general_condition_verdict,"));
    assert!(header.ends_with("a_minus,n_bar_star,universal_n_bar_star,min_epsilon"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    let verdicts: Vec<&str> = rows.iter().map(|r| r.split(',').nth(8).unwrap()).collect();
    assert_eq!(
        verdicts,
        ["not-certified", "not-certified", "simulable", "simulable", "simulable"]
    );
}

#[test]
fn two_axis_sweep_has_all_rows() {
    let text = ok(&["phase-diagram", "--sweep", "n_bar:0:1:3", "--sweep", "eta_l:0.2:0.8:4"]);
    assert_eq!(text.lines().count(), 2 + 12);
    let n_bar: Vec<&str> = text.lines().skip(2).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(n_bar[..5], ["0", "0", "0", "0", "0.5"]);
}

#[test]
fn outputs_are_bit_reproducible() {
    let args = ["sample", "--set", "m=3", "--set", "n_bar=2", "--samples", "50000", "--seed", "17"];
    let a = run(&args).stdout;
    let b = run(&args).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let c = run(&["sample", "--set", "m=3", "--set", "n_bar=2", "--samples", "50000", "--seed", "18"]).stdout;
    assert_ne!(a, c);

    let pd = ["phase-diagram", "--sweep", "r:0:2:7", "--sweep", "n_bar:0:1:3"];
    assert_eq!(run(&pd).stdout, run(&pd).stdout);
}

#[test]
fn sample_outputs() {
    let raw = ok(&["sample", "--raw", "--set", "m=3", "--set", "n_bar=2", "--samples", "1000"]);
    let lines: Vec<&str> = raw.lines().collect();
    assert_eq!(lines.len(), 1000);
    assert!(lines.iter().all(|l| l.len() == 3 && l.chars().all(|c| c == '0' || c == '1')));

    let csv = ok(&["sample", "--set", "m=2", "--set", "n_bar=2", "--samples", "1000"]);
    let mut it = csv.lines();
    assert_eq!(it.next(), Some("pattern,count"));
    let total: u64 = it.map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 1000);

    let json: Value = serde_json::from_str(&ok(&[
        "sample", "--exact", "--format", "json", "--set", "m=2", "--set", "n_bar=0", "--samples", "500",
    ]))
    .unwrap();
    assert_eq!(json["sampler"], "exact");
    assert_eq!(json["n_samples"], 500);
}

#[test]
fn compare_reports_tvd() {
    let json: Value = serde_json::from_str(&ok(&[
        "compare", "--set", "m=2", "--set", "n_bar=1", "--set", "eta_l=0.4", "--set", "r=0.8", "--samples", "200000",
    ]))
    .unwrap();
    for key in ["tvd", "n_samples", "stat_err"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["n_samples"], 200_000);
    assert!(json["tvd"].as_f64().unwrap() <= 3.0 * json["stat_err"].as_f64().unwrap());
}

#[test]
fn fidelity_report() {
    let json: Value = serde_json::from_str(&ok(&["fidelity", "--set", "n_bar=0.1", "--set", "p_d=0.01"])).unwrap();
    let f = json["f_max"].as_f64().unwrap();
    assert!(f > 0.0 && f <= 1.0);
    assert!(json["tvd_bound"].as_f64().unwrap() >= 0.0);

    // above the GBS threshold the bound is exactly zero
    let json: Value = serde_json::from_str(&ok(&["fidelity", "--set", "n_bar=1"])).unwrap();
    assert_eq!(json["f_max"].as_f64(), Some(1.0));
    assert_eq!(json["tvd_bound"].as_f64(), Some(0.0));
}

#[test]
fn temperature_input() {
    let text = ok(&["check", "--set", "temperature=0.05", "--set", "omega=1e10"]);
    let reports: Vec<Value> = serde_json::from_str(&text).unwrap();
    let n = reports[3]["details"]["n_bar"].as_f64().unwrap();
    let expected = 1.0 / ((1.054571817e-34f64 * 1e10 / (1.380649e-23 * 0.05)).exp() - 1.0);
    assert!((n - expected).abs() < 1e-12 * expected.max(1.0));
}
