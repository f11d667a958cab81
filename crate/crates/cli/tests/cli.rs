//! Binary-level behavior: output shapes, exit codes, error JSON, config
//! precedence and the ensemble/aggregate flows.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dataset_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic.csv")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chaincast"))
        .args(args)
        .output()
        .unwrap()
}

fn run_with_paths(args: &[&std::ffi::OsStr]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chaincast"))
        .args(args)
        .output()
        .unwrap()
}

macro_rules! osargs {
    ($($a:expr),* $(,)?) => {
        &[$(AsRef::<std::ffi::OsStr>::as_ref(&$a)),*]
    };
}

#[test]
fn forecast_writes_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fc.csv");
    let output = run_with_paths(osargs![
        "forecast",
        "--input",
        dataset_path(),
        "--horizon",
        "16",
        "--out",
        out,
    ]);
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("effective horizon: 16"), "{stdout}");

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "index,lower,upper,trend");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 17); // horizon + 1
    for row in rows {
        assert_eq!(row.split(',').count(), 4);
    }

    let diag_path = dir.path().join("fc.diagnostics.json");
    let diag: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(diag_path).unwrap()).unwrap();
    assert_eq!(diag["effective_horizon"], 16);
    assert_eq!(diag["levels"].as_array().unwrap().len(), 5); // 1,2,4,8,16
}

#[test]
fn forecast_single_scenario_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fc.csv");
    let output = run_with_paths(osargs![
        "forecast",
        "--input",
        dataset_path(),
        "--horizon",
        "8",
        "--scenario",
        "lower",
        "--out",
        out,
    ]);
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "index,lower,trend");
}

#[test]
fn missing_input_yields_error_json_and_exit_2() {
    let output = run(&[
        "forecast",
        "--input",
        "/nonexistent/data.csv",
        "--horizon",
        "8",
        "--out",
        "/tmp/unused.csv",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&stderr).unwrap();
    assert_eq!(doc["code"], "input_not_found");
    assert!(doc["message"].as_str().unwrap().contains("/nonexistent/data.csv"));
    assert!(doc["context"]["path"].is_string());
}

#[test]
fn bad_row_yields_parse_error_and_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    std::fs::write(&input, "t,v\n1,10.0\n2,11.0\n3,oops\n4,12.0\n").unwrap();
    let output = run_with_paths(osargs![
        "forecast",
        "--input",
        input,
        "--horizon",
        "2",
        "--out",
        dir.path().join("out.csv"),
    ]);
    assert_eq!(output.status.code(), Some(3));
    let doc: serde_json::Value =
        serde_json::from_str(&String::from_utf8(output.stderr).unwrap()).unwrap();
    assert_eq!(doc["code"], "parse_error");
    assert_eq!(doc["context"]["row"], 4);
}

#[test]
fn degenerate_series_yields_data_error_and_level_context() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flat.csv");
    let mut text = String::from("v\n");
    for _ in 0..64 {
        text.push_str("5.0\n");
    }
    std::fs::write(&input, text).unwrap();
    let output = run_with_paths(osargs![
        "forecast",
        "--input",
        input,
        "--horizon",
        "4",
        "--out",
        dir.path().join("out.csv"),
    ]);
    assert_eq!(output.status.code(), Some(5));
    let doc: serde_json::Value =
        serde_json::from_str(&String::from_utf8(output.stderr).unwrap()).unwrap();
    assert_eq!(doc["code"], "data_error");
    assert_eq!(doc["context"]["level"], 1);
}

#[test]
fn invalid_flag_value_yields_config_error_and_exit_4() {
    let output = run(&[
        "forecast",
        "--input",
        "/tmp/whatever.csv",
        "--hierarchy",
        "fib",
        "--out",
        "/tmp/out.csv",
    ]);
    assert_eq!(output.status.code(), Some(4));
    let doc: serde_json::Value =
        serde_json::from_str(&String::from_utf8(output.stderr).unwrap()).unwrap();
    assert_eq!(doc["code"], "config_error");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "horizon = 8\nstates = 6\n").unwrap();

    // file value applies
    let out1 = dir.path().join("a.csv");
    let output = run_with_paths(osargs![
        "forecast",
        "--input",
        dataset_path(),
        "--config",
        conf,
        "--out",
        out1,
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("effective horizon: 8"), "{stdout}");

    // flag overrides the file
    let out2 = dir.path().join("b.csv");
    let output = run_with_paths(osargs![
        "forecast",
        "--input",
        dataset_path(),
        "--config",
        conf,
        "--horizon",
        "16",
        "--out",
        out2,
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("effective horizon: 16"), "{stdout}");
}

#[test]
fn qerror_rms_improves_with_more_states() {
    let dir = tempfile::tempdir().unwrap();
    let mut rms = Vec::new();
    for s in ["2", "8"] {
        let out = dir.path().join(format!("q{s}.json"));
        let output = run_with_paths(osargs![
            "qerror",
            "--input",
            dataset_path(),
            "--states",
            s,
            "--horizon",
            "16",
            "--out",
            out,
        ]);
        assert!(output.status.success());
        let doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        rms.push(doc["spliced"]["rms"].as_f64().unwrap());
    }
    assert!(rms[1] <= rms[0], "rms at s=8 ({}) > s=2 ({})", rms[1], rms[0]);
}

#[test]
fn ensemble_writes_members_mean_std() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ens.csv");
    let output = run_with_paths(osargs![
        "ensemble",
        "--input",
        dataset_path(),
        "--horizon",
        "16",
        "--learning-lengths",
        "256,384,512,10000",
        "--scenario",
        "lower",
        "--out",
        out,
    ]);
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("members: 3"), "{stdout}");
    assert!(stdout.contains("learning length 10000 skipped"), "{stdout}");

    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "index,m256,m384,m512,mean,std");
    assert_eq!(text.lines().count(), 1 + 17);
}

#[test]
fn aggregate_weighted_mean_of_constant_series() {
    let dir = tempfile::tempdir().unwrap();
    // after eq-norm both ramps become identical 0..1 lines, so any weights
    // reproduce the same normalized ramp
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let mut text_a = String::from("v\n");
    let mut text_b = String::from("v\n");
    for i in 0..10 {
        text_a.push_str(&format!("{}.0\n", 100 + i));
        text_b.push_str(&format!("{}.0\n", 2000 + 10 * i));
    }
    std::fs::write(&a, text_a).unwrap();
    std::fs::write(&b, text_b).unwrap();
    let weights = dir.path().join("w.csv");
    std::fs::write(&weights, "label,weight\na,1.0\nb,3.0\n").unwrap();

    let out = dir.path().join("agg.csv");
    let output = run_with_paths(osargs![
        "aggregate",
        "--input",
        a,
        "--input",
        b,
        "--weights",
        weights,
        "--out",
        out,
    ]);
    assert!(output.status.success(), "{output:?}");
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "index,weighted_mean");
    let values: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 10);
    for (i, v) in values.iter().enumerate() {
        let expected = i as f64 / 9.0;
        assert!((v - expected).abs() < 1e-10, "index {i}: {v}");
    }
}

#[test]
fn aggregate_mismatched_weights_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    std::fs::write(&a, "v\n1.0\n2.0\n").unwrap();
    let weights = dir.path().join("w.csv");
    std::fs::write(&weights, "x,1.0\n").unwrap();
    let output = run_with_paths(osargs![
        "aggregate",
        "--input",
        a,
        "--input",
        a,
        "--weights",
        weights,
        "--out",
        dir.path().join("out.csv"),
    ]);
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn dump_transitions_is_valid_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fc.csv");
    let dump = dir.path().join("tables.json");
    let output = run_with_paths(osargs![
        "forecast",
        "--input",
        dataset_path(),
        "--horizon",
        "8",
        "--dump-transitions",
        dump,
        "--out",
        out,
    ]);
    assert!(output.status.success(), "{output:?}");
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    let levels = doc["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 4); // 1,2,4,8
    for level in levels {
        assert!(level["rows"].as_array().unwrap().len() >= 1);
        let row = &level["rows"][0];
        assert_eq!(
            row["history"].as_array().unwrap().len(),
            level["order"].as_u64().unwrap() as usize
        );
    }
}
