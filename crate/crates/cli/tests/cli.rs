//! End-to-end runs of the `spcorr` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spcorr")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn markov_corr_prints_exponential_decay() {
    let out = spcorr(&["corr", "--m", "2", "--n", "2", "--t", "1", "--s", "0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "m,n,t,s,pairing,regime,value,lower,upper,asymptotic");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let value: f64 = row[6].parse().unwrap();
    assert!((value - (-2.0f64).exp()).abs() < 1e-15);
}

#[test]
fn bochner_pv_off_diagonal_vanishes() {
    let out = spcorr(&[
        "corr", "--family", "smallpert", "--regime", "bochner", "--sub", "stable:0.5", "--pairing", "PV", "--m", "2",
        "--n", "3", "--t", "2", "--s", "1",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let row = stdout(&out).lines().nth(1).unwrap().to_string();
    let value: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
    assert_eq!(value, 0.0);
}

#[test]
fn missing_subordinator_is_a_usage_error() {
    let out = spcorr(&["corr", "--regime", "inverse", "--m", "1", "--n", "1", "--t", "2", "--s", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--sub"), "{}", stderr(&out));
}

#[test]
fn simulate_writes_one_row_per_path_and_time() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("paths.csv");
    let out = spcorr(&["simulate", "--paths", "10000", "--grid", "0,1,2", "--seed", "42", "--output", path_str(&csv)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "path_id,t,value");
    assert_eq!(text.lines().count(), 1 + 30_000);
    assert!(dir.path().join("paths.csv.manifest.json").exists());
}

#[test]
fn same_seed_and_rerun_reproduce_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    let common = ["simulate", "--regime", "inverse", "--sub", "stable:0.7", "--paths", "500", "--grid", "0.5,1,4"];
    for (target, threads) in [(&a, "1"), (&b, "4")] {
        let mut args = common.to_vec();
        args.extend(["--seed", "7", "--threads", threads, "--output", path_str(target)]);
        let out = spcorr(&args);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let manifest = dir.path().join("a.csv.manifest.json");
    let out = spcorr(&["rerun", path_str(&manifest), "--output", path_str(&c)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let first = fs::read(&a).unwrap();
    assert_eq!(first, fs::read(&b).unwrap());
    assert_eq!(first, fs::read(&c).unwrap());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    fs::write(&config, "# corr settings\nm = 3\nn = 3\nt = 1\ns = 0\n").unwrap();
    let out = spcorr(&["corr", "--config", path_str(&config), "--m", "1", "--n", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let row = stdout(&out).lines().nth(1).unwrap().to_string();
    let value: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
    assert!((value - (-1.0f64).exp()).abs() < 1e-15);

    fs::write(&config, "bogus = 1\n").unwrap();
    let out = spcorr(&["corr", "--config", path_str(&config)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus"));
}

#[test]
fn malformed_sample_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "path_id,t,value\n0,0,1.0\n0,1,abc\n").unwrap();
    let out = spcorr(&["estimate", "--input", path_str(&input)]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line 3") && err.contains("value"), "{err}");
}

#[test]
fn validate_exit_codes() {
    let out = spcorr(&["validate"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(!stderr(&out).contains("FAIL"));
    assert_eq!(spcorr(&["validate", "--tolerance", "0"]).status.code(), Some(1));
    assert_eq!(spcorr(&["validate", "--tolerance", "-1"]).status.code(), Some(2));
}

#[test]
fn geometric_g_sequence_is_short_range() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.csv");
    let rows: String = (1..=30).map(|k| format!("{k},{:e}\n", 0.5f64.powi(k))).collect();
    fs::write(&g, format!("k,g\n{rows}")).unwrap();
    let sample = dir.path().join("sample.csv");
    let out = spcorr(&["simulate", "--paths", "2000", "--grid", "0,1", "--output", path_str(&sample)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = spcorr(&["estimate", "--input", path_str(&sample), "--g-input", path_str(&g)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["range_dependence"]["label"], "short-range");
}
