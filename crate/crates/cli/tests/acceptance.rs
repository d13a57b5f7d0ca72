//! CLI acceptance: determinism of the full verify run, plus the exit-code
//! and output-format contract.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn wdc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wdc"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wdc-acceptance-{}-{tag}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        out.insert(
            entry.file_name().to_string_lossy().into_owned(),
            fs::read(entry.path()).unwrap(),
        );
    }
    out
}

#[test]
fn acceptance_11_full_verify_is_deterministic() {
    let dir_a = scratch("det-a");
    let dir_b = scratch("det-b");
    for dir in [&dir_a, &dir_b] {
        let status = wdc()
            .args(["verify", "--level", "full", "--seed", "7", "--threads", "8"])
            .arg("--out-dir")
            .arg(dir)
            .status()
            .unwrap();
        assert!(status.success(), "verify full must pass");
    }
    let a = dir_contents(&dir_a);
    let b = dir_contents(&dir_b);
    assert_eq!(
        a.keys().collect::<Vec<_>>(),
        b.keys().collect::<Vec<_>>(),
        "same report files"
    );
    assert!(a.contains_key("verify_summary.json"));
    assert!(a.contains_key("corr_grid.csv"));
    assert!(a.contains_key("ratio_window.csv"));
    for (name, bytes) in &a {
        assert_eq!(bytes, &b[name], "report {name} must be byte-identical");
    }
    println!("criterion 11 PASS: two full verify runs produced byte-identical reports");
    let _ = fs::remove_dir_all(dir_a);
    let _ = fs::remove_dir_all(dir_b);
}

#[test]
fn identity_json_matches_documented_shape() {
    let out = wdc().args(["identity", "--t", "4"]).output().unwrap();
    assert!(out.status.success());
    let line = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        line.trim(),
        r#"{"t":4,"sum":"2401/16","expected":"2401/16","pass":true}"#
    );
}

#[test]
fn usage_errors_exit_2() {
    // unknown flag
    let out = wdc().args(["identity", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // moments without an exponent selection
    let out = wdc().args(["moments", "--P", "8", "--n", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // empty window
    let out = wdc()
        .args(["ratio", "--n", "3", "--k", "8", "--from", "10", "--to", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resource_limits_exit_3() {
    // s·P^n far past the dense-array guard
    let out = wdc()
        .args(["moments", "--P", "65536", "--n", "2", "--s", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"failure\""), "failure record expected: {stdout}");
}

#[test]
fn ratio_csv_has_stable_columns() {
    let out = wdc()
        .args([
            "ratio", "--n", "3", "--k", "8", "--from", "250", "--to", "260", "--format", "csv",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "N,I,J,ratio");
    assert_eq!(lines.clone().count(), 11);
    assert!(lines.all(|l| l.split(',').count() == 4));
}

#[test]
fn corr_csv_has_stable_columns() {
    let out = wdc()
        .args(["corr", "--X", "4096", "--H", "8", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "h,S,V,kappa12_h1,alpha_bound");
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn weylscan_json_reports_metadata() {
    let out = wdc()
        .args(["weylscan", "--P", "64", "--n", "3", "--q-max", "8"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["kind"], "sup_scan");
    assert_eq!(v["data"]["scan"]["p"], 64);
    assert_eq!(v["data"]["scan"]["q_max"], 8);
    assert!(v["data"]["wall_time_seconds"].is_f64());
    // q = 1 row (alpha integer) must be present
    assert_eq!(v["data"]["scan"]["rows"][0]["q"], 1);
}

#[test]
fn count_matches_known_values() {
    let out = wdc()
        .args(["count", "--N", "4", "--n", "3", "--k", "4"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["data"]["count"], "1");
}
