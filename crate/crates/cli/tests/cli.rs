use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skglass"))
        .args(args)
        .env_remove("SKGLASS_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SWEEP: [&str; 13] = [
    "sweep", "--n", "8", "--samples", "10", "--beta-min", "0.5", "--beta-max", "3.0", "--beta-steps", "6", "--seed", "1",
];

#[test]
fn sweep_csv_schema_and_determinism() {
    let mut args = SWEEP.to_vec();
    args.extend(["--format", "csv"]);
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,beta,f_mean,f_se,s_mean,s_se,u_mean,u_se");
    assert_eq!(lines.len(), 7);
    assert!(!text.contains('\r'));
    for l in &lines[1..] {
        assert_eq!(l.split(',').count(), 8);
        assert!(l.split(',').all(|f| f.parse::<f64>().is_ok()));
    }
}

#[test]
fn sweep_worker_count_does_not_change_output() {
    let mut one = SWEEP.to_vec();
    one.extend(["--workers", "1"]);
    let mut three = SWEEP.to_vec();
    three.extend(["--workers", "3"]);
    let env = Command::new(env!("CARGO_BIN_EXE_skglass"))
        .args(SWEEP)
        .env("SKGLASS_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(run(&one).stdout, run(&three).stdout);
    assert_eq!(run(&one).stdout, env.stdout);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["sweep", "--n", "8", "--beta-steps", "0"],
        vec!["sweep", "--samples", "3"],
        vec!["sweep", "--n", "8", "--workers", "0"],
        vec!["sweep", "--n", "8", "--model", "log"],
        vec!["sweep", "--n", "8", "--n-list", "4,6"],
        vec!["frobnicate"],
        vec!["zero-cross", "--synthetic", "--n-list", "8,12"],
        vec!["gs", "--n", "6", "--samples", "2", "--format", "csv", "--restarts", "0"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn resource_caps_exit_3() {
    let o = run(&["validate", "--n", "25", "--distribution"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
    assert_eq!(run(&["sweep", "--n", "31", "--samples", "1"]).status.code(), Some(3));
    assert_eq!(run(&["predict", "--n", "21", "--samples", "1"]).status.code(), Some(3));
}

#[test]
fn files_are_deterministic_and_sidecar_holds_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.json");
    let out_str = out.to_str().unwrap();
    let args = [
        "sweep", "--n-list", "4,6,8", "--samples", "10", "--beta-min", "0.5", "--beta-max", "3.0", "--beta-steps",
        "6", "--seed", "1", "--format", "json", "--out", out_str,
    ];
    assert!(run(&args).status.success());
    let first = fs::read(&out).unwrap();
    let meta: Value = serde_json::from_slice(&fs::read(dir.path().join("sweep.json.meta.json")).unwrap()).unwrap();
    assert!(meta["generated_at"].is_string());
    assert!(run(&args).status.success());
    assert_eq!(first, fs::read(&out).unwrap());

    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["rows"].as_array().unwrap().len(), 18);
    assert_eq!(v["extrapolation"].as_array().unwrap().len(), 6);
    assert_eq!(v["metadata"]["content_hash"], meta["content_hash"]);
    assert_eq!(v["metadata"]["extrapolation_model"], "linear-in-1/n");
    assert!(!String::from_utf8_lossy(&first).contains("generated_at"));
}

#[test]
fn format_both_writes_two_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.out");
    let mut args = SWEEP.to_vec();
    args.extend(["--format", "both", "--out", out.to_str().unwrap()]);
    assert!(run(&args).status.success());
    let csv = fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert!(csv.starts_with("n,beta,f_mean"));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("grid.json")).unwrap()).unwrap();
    assert!(v["extrapolation"].is_null());
}

#[test]
fn validate_default_passes() {
    let o = run(&["validate"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let checks = text.lines().filter(|l| l.ends_with("PASS")).count();
    assert!(checks >= 8, "{text}");
    assert!(!text.contains("FAIL"));
    let j = run(&["validate", "--format", "json"]);
    let v: Value = serde_json::from_slice(&j.stdout).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn validate_distribution_within_cap() {
    let o = run(&["validate", "--n", "6", "--distribution"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("64 states"));
}

#[test]
fn predict_constants_and_comparisons() {
    let bare = stdout(&run(&["predict"]));
    for v in ["2.772589", "2.171812", "0.443147", "0.159832", "-0.159832", "0.693147", "0.943147"] {
        assert!(bare.contains(v), "missing {v}");
    }
    let o = run(&["predict", "--n", "12", "--samples", "50", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 7);
    for r in &rows {
        let (mean, limit, gap): (f64, f64, f64) = (r[2].parse().unwrap(), r[4].parse().unwrap(), r[5].parse().unwrap());
        assert!((gap - (mean - limit)).abs() < 1e-12);
    }
    let names: Vec<&str> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(
        names,
        ["f_n(1)", "f_n(beta*)", "s_n(beta*)", "alpha_n", "kl_density", "cross_entropy_density", "uniform_kl_density"]
    );
}

#[test]
fn bits_only_changes_display() {
    let nats = stdout(&run(&["predict", "--n", "8", "--samples", "5"]));
    let bits = stdout(&run(&["predict", "--n", "8", "--samples", "5", "--bits"]));
    assert_ne!(nats, bits);
    assert!(bits.contains("in bits"));
    let a = run(&["predict", "--n", "8", "--samples", "5", "--format", "json"]);
    let b = run(&["predict", "--n", "8", "--samples", "5", "--format", "json", "--bits"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn zero_cross_synthetic_and_no_crossing() {
    let o = run(&["zero-cross", "--synthetic", "--n-list", "8,12,16,20"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("crosses zero at beta = 1.66"));
    let none = run(&["zero-cross", "--synthetic", "--n-list", "8,12,16,20", "--beta-min", "0.5", "--beta-max", "1.0"]);
    assert_eq!(none.status.code(), Some(1));
    let text = stdout(&none);
    assert!(text.contains("intercept at beta = 0.500000"));
    assert!(text.contains("intercept at beta = 1.000000"));
}

#[test]
fn zero_cross_real_data_reports_either_outcome() {
    let o = run(&["zero-cross", "--n-list", "6,8,10", "--samples", "10", "--format", "json"]);
    assert!(matches!(o.status.code(), Some(0) | Some(1)));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let outcome = v["result"]["outcome"].as_str().unwrap();
    assert!(outcome == "crossing" || outcome == "no_crossing");
    assert_eq!(o.status.code() == Some(0), outcome == "crossing");
}

#[test]
fn rem_table() {
    let o = run(&["rem", "--n-list", "6,8", "--samples", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("1.665109"));
    assert!(text.contains("beta_c^2             = 2.772589"));
}

#[test]
fn gs_matches_exact() {
    let o = run(&["gs", "--n", "10", "--samples", "5", "--seed", "7", "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert_eq!(r["matched"], true);
        assert_eq!(r["exact_index"], r["anneal_index"]);
    }
}

#[test]
fn mc_within_three_standard_errors() {
    let o = run(&["mc", "--n", "14", "--beta", "1.0", "--sweeps", "20000", "--seed", "3", "--format", "json"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let z = v["rows"][0]["z"].as_f64().unwrap();
    assert!(z.abs() <= 3.0);
}
