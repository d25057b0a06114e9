use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use batlife_cli::{run_cli, EXIT_INVALID, EXIT_OK, EXIT_SIMULATION, EXIT_USAGE};

fn shipped_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/paper_baseline.toml")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("batlife").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_variant(dir: &Path, from: &str, to: &str) -> String {
    let text = fs::read_to_string(shipped_config()).unwrap().replace(from, to);
    assert!(text.contains(to));
    let path = dir.join("variant.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn validate_shipped_config() {
    let (code, out, _) = run(&["validate", shipped_config().to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("ok"));
}

#[test]
fn validate_reports_issues() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_variant(tmp.path(), "current_a = 0.0", "current_a = 3.0");
    let (code, out, _) = run(&["validate", &cfg]);
    assert_eq!(code, EXIT_INVALID);
    assert!(out.contains("idle"), "{out}");
}

#[test]
fn validate_syntax_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_variant(tmp.path(), "days = 30", "days = = 30");
    let (code, _, err) = run(&["validate", &cfg]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("line"), "{err}");
}

#[test]
fn missing_file_is_io_error() {
    let (code, _, err) = run(&["validate", "/definitely/not/here.toml"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("/definitely/not/here.toml"));
}

#[test]
fn unknown_scenario_lists_available() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("o");
    let (code, _, err) = run(&[
        "simulate",
        shipped_config().to_str().unwrap(),
        "--scenario",
        "hover",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("baseline") && err.contains("ceiling"), "{err}");
}

#[test]
fn simulate_writes_series_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = shipped_config();
    for (fmt, file) in [("csv", "timeseries.csv"), ("json", "timeseries.json")] {
        let dir = tmp.path().join(fmt);
        let (code, _, err) = run(&[
            "simulate",
            cfg.to_str().unwrap(),
            "--scenario",
            "baseline",
            "--out",
            dir.to_str().unwrap(),
            "--sample-interval-s",
            "600",
            "--format",
            fmt,
        ]);
        assert_eq!(code, EXIT_OK, "{err}");
        assert!(dir.join(file).exists());
        let summary: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
        let per_day = summary["fec_per_day"].as_f64().unwrap();
        assert!((per_day - 9.1346).abs() < 1e-4);
    }
    let csv = fs::read_to_string(tmp.path().join("csv/timeseries.csv")).unwrap();
    assert!(csv.starts_with("t_hours,current_a,soc,fec,mode,day,mission\n"));
}

#[test]
fn depletion_exits_with_simulation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_variant(tmp.path(), "current_a = 9.5", "current_a = 19.5");
    let (code, _, err) = run(&["simulate", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(code, EXIT_SIMULATION);
    assert!(err.contains("day 1, mission 1, phase 'flight'"), "{err}");
}

#[test]
fn compare_report() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("cmp");
    let (code, out, err) = run(&[
        "compare",
        shipped_config().to_str().unwrap(),
        "--baseline",
        "baseline",
        "--variant",
        "ceiling",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("fec_reduction"));
    assert_eq!(out, fs::read_to_string(dir.join("comparison.txt")).unwrap());

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("comparison.json")).unwrap()).unwrap();
    let report = &json["report"];
    assert!((report["fec_reduction_fraction"].as_f64().unwrap() - 0.1579).abs() < 1e-4);
    assert!((report["dod_reduction_fraction"].as_f64().unwrap() - 0.1579).abs() < 1e-4);
    assert!((report["charge_time_saving_minutes"].as_f64().unwrap() - 2.885).abs() < 1e-3);
    assert_eq!(
        json["degradation"]["statement"].as_str().unwrap(),
        "cycling degradation reduced by 15.79%"
    );
}

#[test]
fn compare_with_aging_coefficient() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("cmp");
    let cfg = shipped_config();
    let base = ["compare", cfg.to_str().unwrap(), "--baseline", "baseline", "--variant", "ceiling", "--out", dir.to_str().unwrap()];

    let mut args = base.to_vec();
    args.extend(["--k-cycle", "1e-4"]);
    let (code, _, _) = run(&args);
    assert_eq!(code, EXIT_OK);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("comparison.json")).unwrap()).unwrap();
    let dsoh = json["degradation"]["baseline_delta_soh"].as_f64().unwrap();
    assert!((dsoh - 0.027404).abs() < 5e-7);

    let mut args = base.to_vec();
    args.extend(["--k-cycle=-1"]);
    let (code, _, _) = run(&args);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["simulate"]).0, EXIT_USAGE);
    let cfg = shipped_config();
    let (code, _, _) = run(&["simulate", cfg.to_str().unwrap(), "--out", "/tmp/x", "--sample-interval-s", "0"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = run(&["simulate", cfg.to_str().unwrap(), "--out", "/tmp/x", "--format", "xml"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("compare"));
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_batlife");
    let status = Command::new(bin).arg("validate").arg(shipped_config()).status().unwrap();
    assert_eq!(status.code(), Some(EXIT_OK));
    let status = Command::new(bin).arg("validate").arg("/nope.toml").status().unwrap();
    assert_eq!(status.code(), Some(EXIT_USAGE));
}
