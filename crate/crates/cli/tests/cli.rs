use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_erasure-ft"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn ok_text(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn err_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("erasure-ft-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn classify_examples() {
    let v = ok_json(&["classify", "MMM...."]);
    assert_eq!(v["weight"], 3);
    assert_eq!(v["correctability"], "correctable");
    assert_eq!(v["class"]["label"], "3c");

    let v = ok_json(&["classify", "......."]);
    assert_eq!(v["weight"], 0);
    assert_eq!(v["step"], "done");

    let v = ok_json(&["classify", "EEEE..."]);
    assert_eq!(v["model"], "lossy");
    assert_eq!(v["correctability"], "procedure-fail");
    assert_eq!(v["step"], "abort");

    let v = ok_json(&["classify", "....MMM"]);
    assert_eq!(v["correctability"], "procedure-fail");
}

#[test]
fn classify_errors() {
    assert_eq!(err_json(&["classify", "MMM"])["error"], "parse-pattern");
    assert_eq!(err_json(&["classify", "MMX...."])["error"], "parse-pattern");
    assert_eq!(err_json(&["classify", "MZ....."])["error"], "usage");
    assert_eq!(
        err_json(&["classify", "E......", "--model", "ideal"])["error"],
        "usage"
    );
}

#[test]
fn class_tables() {
    let v = ok_json(&["classes", "--model", "ideal"]);
    assert_eq!(v["class_count"], 5);
    assert_eq!(v["pattern_count"], 128);
    let v = ok_json(&["classes", "--model", "lossy"]);
    assert_eq!(v["pattern_count"], 2187);
    assert_eq!(v["classes"][0]["label"], "[0,0]");
    let v = ok_json(&["classes", "--model", "ideal", "--unreduced"]);
    assert_eq!(v["class_count"], 128);
    let csv = ok_text(&["classes", "--model", "ideal", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn chain_export() {
    let v = ok_json(&["chain", "--model", "ideal"]);
    assert_eq!(v["classes"].as_array().unwrap().len(), 5);
    assert_eq!(v["absorbing"]["intact"], 0);
    assert!(!v["matrix"].as_array().unwrap().is_empty());
}

#[test]
fn series_report() {
    let v = ok_json(&["series", "--model", "ideal"]);
    let c = &v["coefficients"];
    assert_eq!(c[3]["exact"], "49");
    assert_eq!(c[3]["reference"], 56.0);
    assert_eq!(c[3]["deviation"], -7.0);
    assert_eq!(c[0]["exact"], "0");

    let v = ok_json(&["series", "--model", "lossy", "--fixture", "reference-lossy"]);
    assert_eq!(v["coefficients"][3]["exact"], "1050");
    assert_eq!(v["coefficients"][3]["deviation"], 0.0);

    let v = ok_json(&["series", "--model", "lossy", "--bivariate", "--order", "3"]);
    assert!(v["coefficients"].is_null());
    assert!(!v["series"].as_array().unwrap().is_empty());

    assert_eq!(
        err_json(&["series", "--model", "measurement"])["error"],
        "usage"
    );
}

#[test]
fn measurement_threshold_is_flagged() {
    let v = ok_json(&["threshold", "--model", "measurement"]);
    assert_eq!(v["root_4sf"], "0.2559");
    assert_eq!(v["reference"]["matches"], false);
    assert!(v["reference"]["flag"].is_string());
    assert!((v["recursion_at_0.25"].as_f64().unwrap() - 0.2436).abs() < 1e-4);
}

#[test]
fn fixture_thresholds() {
    let v = ok_json(&[
        "threshold",
        "--model",
        "lossy",
        "--fixture",
        "reference-lossy",
    ]);
    assert!((v["root"].as_f64().unwrap() - 0.0178).abs() < 5e-4);
    assert_eq!(v["reference"]["matches"], true);
    assert_eq!(v["below_measurement_threshold"], true);

    let e = err_json(&[
        "threshold",
        "--model",
        "ideal",
        "--fixture",
        "reference-ideal",
    ]);
    assert_eq!(e["error"], "no-sign-change");
    assert_eq!(e["samples"].as_array().unwrap().len(), 2);
}

#[test]
fn threshold_arguments() {
    let v = ok_json(&[
        "threshold",
        "--model",
        "measurement",
        "--tol",
        "1/1000",
        "--bracket",
        "0.2,0.3",
    ]);
    let [lo, hi] = [0, 1].map(|i| v["bracket"][i].as_f64().unwrap());
    assert!(hi - lo <= 1e-3 && lo <= 0.2559 && 0.2558 <= hi);
    assert_eq!(
        err_json(&["threshold", "--model", "measurement", "--bracket", "0.3"])["error"],
        "usage"
    );
    assert_eq!(
        err_json(&["threshold", "--model", "measurement", "--tol", "0"])["error"],
        "threshold"
    );
}

#[test]
fn sweep_rows() {
    let csv = ok_text(&[
        "sweep", "--model", "ideal", "--eps", "0", "--trials", "1000",
    ]);
    assert_eq!(
        csv,
        "eps,encoded_failure_exact,mc_mean,mc_stderr\n0,0,0,0\n"
    );

    let csv = ok_text(&[
        "sweep",
        "--model",
        "ideal",
        "--eps",
        "0.01,0.05,0.1",
        "--trials",
        "0",
    ]);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("0.05,0.0081742317593"), "{}", rows[1]);
    assert!(rows[1].ends_with(",,"));

    let v = ok_json(&[
        "sweep",
        "--model",
        "lossy",
        "--eps",
        "0:0.02:0.01",
        "--trials",
        "0",
        "--format",
        "json",
    ]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);

    assert_eq!(
        err_json(&["sweep", "--model", "ideal", "--eps", "0.7"])["error"],
        "parse-grid"
    );
}

#[test]
fn mc_rows() {
    let csv = ok_text(&[
        "mc", "--model", "ideal", "--eps", "0.1", "--trials", "20000", "--seed", "3",
    ]);
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[..3], ["0.1", "0", "20000"]);
    assert!(row[5].parse::<f64>().unwrap().abs() <= 4.0);

    let csv = ok_text(&["mc", "--model", "lossy", "--eps", "0", "--trials", "100"]);
    assert_eq!(csv.lines().nth(1).unwrap(), "0,0,100,0,0,");

    let v = ok_json(&[
        "mc",
        "--model",
        "lossy",
        "--eps",
        "0.01,0.02",
        "--delta",
        "0.005",
        "--trials",
        "1000",
        "--format",
        "json",
    ]);
    assert_eq!(v["rows"][1]["delta"], "0.005");

    assert_eq!(
        err_json(&["mc", "--model", "ideal", "--eps", "0.1", "--delta", "0.1"])["error"],
        "usage"
    );
    assert_eq!(
        err_json(&["mc", "--model", "ideal", "--eps", "0.1", "--trials", "0"])["error"],
        "usage"
    );
}

#[test]
fn concat_tables() {
    let csv = ok_text(&[
        "concat", "--model", "ideal", "--eps", "0", "--format", "csv",
    ]);
    assert_eq!(csv, "level,rate\n1,0\n2,0\n3,0\n");

    let v = ok_json(&["concat", "--model", "measurement", "--eps", "0.1"]);
    let rates: Vec<f64> = v["levels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["rate"].as_f64().unwrap())
        .collect();
    assert_eq!(rates.len(), 3);
    assert!((rates[0] - 0.0256915).abs() < 1e-7);
    assert!(rates.windows(2).all(|w| w[1] < w[0]));

    assert_eq!(
        err_json(&["concat", "--model", "ideal", "--eps", "0.1", "--levels", "11"])["error"],
        "usage"
    );
}

#[test]
fn output_file_and_manifest() {
    let out = scratch("sweep.csv");
    let path = out.to_str().unwrap();
    let args = [
        "sweep", "--model", "ideal", "--eps", "0.05,0.1", "--trials", "2000", "--seed", "9",
        "--out", path,
    ];
    let first = {
        assert!(run(&args).stdout.is_empty());
        std::fs::read(&out).unwrap()
    };
    assert!(run(&args).status.success());
    assert_eq!(std::fs::read(&out).unwrap(), first);

    let side: Value =
        serde_json::from_slice(&std::fs::read(format!("{path}.manifest.json")).unwrap()).unwrap();
    assert_eq!(side["command"], "sweep");
    assert_eq!(side["parameters"]["seed"], "9");
    assert!(side["timestamp_unix"].is_u64());
    assert_eq!(side["circuit_config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn stdout_is_deterministic() {
    let args = [
        "mc", "--model", "lossy", "--eps", "0.05", "--trials", "5000", "--seed", "1",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn circuit_config_changes_the_chain() {
    let cfg = scratch("three-helpers.json");
    std::fs::write(&cfg, r#"{"z_recovery": {"helper_locations": 3}}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let base = ok_json(&["series", "--model", "lossy", "--order", "3"]);
    let alt = ok_json(&[
        "series",
        "--model",
        "lossy",
        "--order",
        "3",
        "--circuit-config",
        cfg,
    ]);
    assert_ne!(
        base["manifest"]["circuit_config_hash"],
        alt["manifest"]["circuit_config_hash"]
    );
    assert_ne!(
        base["coefficients"][3]["exact"],
        alt["coefficients"][3]["exact"]
    );

    let bad = scratch("bad.json");
    std::fs::write(&bad, r#"{"z_recovery": {"helper_locations": 0}}"#).unwrap();
    assert_eq!(
        err_json(&[
            "classes",
            "--model",
            "ideal",
            "--circuit-config",
            bad.to_str().unwrap()
        ])["error"],
        "circuit-config"
    );
    assert_eq!(
        err_json(&[
            "classes",
            "--model",
            "ideal",
            "--circuit-config",
            "/nonexistent.json"
        ])["error"],
        "io"
    );
}
