use std::path::Path;
use std::process::{Command, Output};

fn wincuckoo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wincuckoo"))
        .args(args)
        .env_remove("WINCUCKOO_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn threshold_csv_row() {
    let out = wincuckoo(&["threshold", "--k", "2", "--ell", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,ell,gamma,lambda_star,residual_g,near_one"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let gamma: f64 = row[2].parse().unwrap();
    assert!((gamma - 0.964994923).abs() < 1e-9, "{gamma}");
    assert_eq!(row[5], "false");
}

#[test]
fn threshold_json() {
    let out = wincuckoo(&["threshold", "--k", "3", "--ell", "2", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["gamma"].as_f64().unwrap() - 0.9968991072).abs() < 1e-9);
    assert_eq!(v["params"]["k"], 3);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["threshold", "--ell", "1"][..],
        &["threshold", "--format", "svg"],
        &["simulate", "--trials", "0"],
        &["simulate", "--scheme", "rings"],
        &["lsa-bench", "--load", "1.5"],
        &["table", "--k-max", "1"],
        &["no-such-command"],
    ] {
        let out = wincuckoo(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(wincuckoo(&["--help"]).status.code(), Some(0));
}

#[test]
fn table_covers_grid() {
    let out = wincuckoo(&["table", "--k-max", "4", "--ell-max", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 3 * 2);
    assert!(text.lines().nth(1).unwrap().starts_with("2,2,0.964994923"));
}

#[test]
fn lsa_bench_zero_load_is_header_only() {
    let out = wincuckoo(&["lsa-bench", "--n", "1000", "--load", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "load,avg_touches\n");
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--n", "2000", "--trials", "4", "--seed", "3"];
    let a = wincuckoo(&args);
    let b = wincuckoo(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().next(), Some("load,fail_fraction"));
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(last[1], "1");
}

#[test]
fn simulate_json_has_records() {
    let out = wincuckoo(&["simulate", "--scheme", "blocks", "--n", "1000", "--trials", "3", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 3);
    assert_eq!(v["scheme"], "blocks");
}

fn assert_svg(text: &str) {
    assert!(text.starts_with("<?xml"));
    assert!(text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<svg").count(), 1);
    assert!(text.contains("<polyline"));
}

#[test]
fn svg_outputs() {
    let out = wincuckoo(&["simulate", "--n", "1000", "--trials", "3", "--format", "svg"]);
    assert!(out.status.success());
    assert_svg(&stdout(&out));
    let out = wincuckoo(&["lsa-bench", "--n", "10000", "--load", "0.8", "--batch", "1000", "--format", "svg"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_svg(&text);
    assert!(text.contains("γ = 0.96"));
}

#[test]
fn out_flag_and_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("t.csv");
    let out = wincuckoo(&["threshold", "--out", file.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&file).unwrap().starts_with("k,ell,gamma"));

    let out = Command::new(env!("CARGO_BIN_EXE_wincuckoo"))
        .args(["lsa-bench", "--n", "1000", "--load", "0.5", "--batch", "100", "--format", "json"])
        .env("WINCUCKOO_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let written = dir.path().join("lsa-bench.json");
    assert!(Path::new(&written).exists());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(written).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5);
}

#[test]
fn selftest_passes_and_detects_fault() {
    let ok = wincuckoo(&["selftest", "--seed", "1"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let again = wincuckoo(&["selftest", "--seed", "1"]);
    assert_eq!(ok.stdout, again.stdout);
    assert!(stdout(&ok).lines().filter(|l| l.starts_with("PASS")).count() >= 4);

    let bad = wincuckoo(&["selftest", "--seed", "1", "--inject-fault", "capacity"]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(stdout(&bad).contains("FAIL flow engine"));
}
