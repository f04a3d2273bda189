// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cpmean"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn step(n: usize, jump_at: usize) -> String {
    (0..n)
        .map(|i| {
            // xorshift scramble of i: irregular, reproducible, roughly uniform on [-0.5, 0.5)
            let mut h = (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            h ^= h >> 29;
            h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
            h ^= h >> 32;
            let wiggle = (h % 10_000) as f64 / 10_000.0 - 0.5;
            let level = if i < jump_at { 0.0 } else { 4.0 };
            format!("{}\n", level + wiggle)
        })
        .collect()
}

#[test]
fn detect_finds_a_step_with_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "x.txt", &step(200, 120));
    for m in ["pelt", "segneigh", "bs", "wbs", "wbs2", "tguh", "idetect"] {
        let v = json(&run(&["detect", &f, "-m", m]));
        assert_eq!(v["change_points"], serde_json::json!([120]), "method {m}");
    }
    let v = json(&run(&["detect", &f, "-m", "mosum", "--bandwidth", "30"]));
    assert_eq!(v["change_points"], serde_json::json!([120]));
    let v = json(&run(&["detect", &f, "-m", "tautstring", "--gamma", "40"]));
    assert!(v["n_changes"].as_u64().unwrap() >= 1);
}

#[test]
fn missing_values_map_back_to_original_positions() {
    let dir = tempfile::tempdir().unwrap();
    let mut lines: Vec<String> = step(100, 50).lines().map(str::to_owned).collect();
    lines.insert(10, "NA".into());
    lines.insert(30, "NA".into());
    let f = write(&dir, "x.txt", &(lines.join("\n") + "\n"));
    let v = json(&run(&["detect", &f]));
    assert_eq!(v["n"], 102);
    assert_eq!(v["n_observed"], 100);
    assert_eq!(v["change_points"], serde_json::json!([52]));
    assert_eq!(v["segments"][1]["end"], 102);
}

#[test]
fn json_output_reproduces_segments() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "x.txt", &step(150, 40));
    let out = dir.path().join("out.json");
    let st = run(&["detect", &f, "-o", out.to_str().unwrap()]);
    assert!(st.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let x: Vec<f64> = step(150, 40).lines().map(|l| l.parse().unwrap()).collect();
    for seg in v["segments"].as_array().unwrap() {
        let (s, e) = (seg["start"].as_u64().unwrap() as usize, seg["end"].as_u64().unwrap() as usize);
        let mean = x[s - 1..e].iter().sum::<f64>() / (e - s + 1) as f64;
        assert!((mean - seg["mean"].as_f64().unwrap()).abs() < 1e-12);
    }
}

#[test]
fn csv_input_and_csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "x.csv", &format!("value\n{}", step(80, 30)));
    let out = run(&["detect", &f, "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("start,end,mean"));
    assert!(lines.next().unwrap().starts_with("1,30,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.txt", "1\n2\nabc\n");
    assert_eq!(run(&["detect", &bad]).status.code(), Some(2));
    let empty = write(&dir, "empty.txt", "NA\nNA\n");
    assert_eq!(run(&["detect", &empty]).status.code(), Some(2));
    let good = write(&dir, "x.txt", &step(50, 20));
    assert_eq!(run(&["detect", &good, "-m", "nosuch"]).status.code(), Some(3));
    assert_eq!(run(&["detect", &good, "-m", "mosum"]).status.code(), Some(3));
    assert_eq!(run(&["detect", &good, "-m", "pelt", "--select", "sdll"]).status.code(), Some(3));
    assert_eq!(run(&["detect", &good, "--sigma", "-1"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn stdin_input() {
    use std::io::Write;
    let mut child = bin()
        .args(["detect", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(step(60, 25).as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(json(&out)["change_points"], serde_json::json!([25]));
}

#[test]
fn path_is_ranked_and_truncated() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "x.txt", &step(120, 70));
    let v = json(&run(&["path", &f, "-m", "wbs2", "--top-k", "5"]));
    let e = v["entries"].as_array().unwrap();
    assert_eq!(e.len(), 5);
    assert_eq!(e[0]["b"], 70);
    let c: Vec<f64> = e.iter().map(|r| r["cusum"].as_f64().unwrap()).collect();
    assert!(c.windows(2).all(|w| w[0] >= w[1]));
    assert_eq!(run(&["path", &f, "-m", "pelt"]).status.code(), Some(3));
}

#[test]
fn crops_table_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "x.txt", &step(150, 60));
    let v = json(&run(&["crops", &f, "--lambda-min", "0.01", "--lambda-max", "100"]));
    let rows = v["rows"].as_array().unwrap();
    assert!(rows.len() >= 2);
    let n: Vec<u64> = rows.iter().map(|r| r["n_changes"].as_u64().unwrap()).collect();
    assert!(n.windows(2).all(|w| w[0] > w[1]));
    let out = run(&["crops", &f, "--format", "csv"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("n_changes,rss_scaled\n"));
}

#[test]
fn welllog_on_synthetic_fixture() {
    let f = fixture("welllog_synthetic.txt");
    let v = json(&run(&["welllog", f.to_str().unwrap(), "--intervals", "2000"]));
    assert_eq!(v["schema"], "cpmean.welllog/1");
    assert_eq!(v["noise"]["n_raw"], 600);
    assert!(v["noise"]["removed"].as_u64().unwrap() >= 5);
    // true changes at 120, 210, 370 and 450 on the raw scale
    assert!(v["pelt"]["n_changes"].as_u64().unwrap() >= 4);
}

#[test]
fn simulate_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("reps.csv");
    let v = json(&run(&[
        "simulate",
        "--signal",
        "blocks:512",
        "--noise",
        "gaussian:1",
        "--reps",
        "8",
        "--seed",
        "3",
        "--csv",
        csv.to_str().unwrap(),
    ]));
    assert_eq!(v["schema"], "cpmean.accuracy/1");
    assert_eq!(v["n_true"], 11);
    assert_eq!(v["records"].as_array().unwrap().len(), 8);
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 9);

    let again = json(&run(&[
        "simulate", "--signal", "blocks:512", "--reps", "8", "--seed", "3",
    ]));
    assert_eq!(v["records"], again["records"]);
}

#[test]
fn simulate_scenario_file_and_replica() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write(
        &dir,
        "sc.json",
        r#"{"signal":{"kind":"mscale"},"noise":{"kind":"gaussian","sd":0.5},"seed":1,"reps":4}"#,
    );
    let v = json(&run(&["simulate", "--scenario", &sc, "-m", "wbs2"]));
    assert_eq!(v["n_true"], 2);
    assert_eq!(v["records"].as_array().unwrap().len(), 4);
    let broken = write(&dir, "broken.json", r#"{"signal":{"kind":"sine"}}"#);
    assert_eq!(run(&["simulate", "--scenario", &broken]).status.code(), Some(3));
    let v = json(&run(&["simulate", "--noise-variance-replica", "--reps", "20"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows[0]["noise"], "gaussian");
    assert_eq!(rows[1]["noise"], "laplace");
    assert_eq!(run(&["simulate", "-m", "bogus"]).status.code(), Some(3));
}
