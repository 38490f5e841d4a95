use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tamed_euler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tamed-euler"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .split("\r\n")
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn brownian_convergence_has_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bm.csv");
    let res = tamed_euler(&[
        "convergence",
        "--problem",
        "brownian",
        "--dim",
        "2",
        "--samples",
        "50",
        "--levels",
        "16..256",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let rows = rows(&out);
    assert_eq!(rows[0][3], "root_error");
    assert_eq!(rows.len(), 6);
    for row in &rows[1..] {
        assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn lj_pair_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("check.csv");
    let res = tamed_euler(&[
        "check",
        "--problem",
        "lj_pair",
        "--p",
        "12",
        "--q",
        "6",
        "--pairs",
        "20000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let rows = rows(&out);
    let kernel: Vec<_> = rows[1..]
        .iter()
        .filter(|r| r[0].starts_with("K_"))
        .collect();
    assert_eq!(kernel.len(), 3);
    assert!(rows[1..].iter().all(|r| r[1] == "true"), "{rows:?}");
}

#[test]
fn manifest_round_trips_and_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("stop.csv");
    let res = tamed_euler(&[
        "stopping",
        "--samples",
        "200",
        "--levels",
        "16..128",
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let manifest_path = dir.path().join("stop.csv.manifest.json");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["command"], "stopping");
    assert_eq!(manifest["estimator"]["seed"], 11);
    assert_eq!(manifest["scheme"]["w"], 1.0 / 12.0);
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert!(manifest["version"].is_string());

    let first = fs::read(&out).unwrap();
    let rerun = dir.path().join("rerun.csv");
    let res = tamed_euler(&[
        "stopping",
        "--config",
        manifest_path.to_str().unwrap(),
        "--threads",
        "1",
        "--out",
        rerun.to_str().unwrap(),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    assert_eq!(fs::read(&rerun).unwrap(), first);
}

#[test]
fn invalid_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    for args in [
        vec!["convergence", "--w", "0.5", "--out", out],
        vec!["convergence", "--levels", "64,32", "--out", out],
        vec!["moments", "--problem", "ou", "--out", out],
        vec!["moments", "--alpha", "1", "--out", out],
        vec!["check", "--problem", "lj_pair", "--q", "13", "--out", out],
    ] {
        let res = tamed_euler(&args);
        assert_eq!(res.status.code(), Some(1), "{args:?}");
    }
    assert!(!Path::new(out).exists());
}
