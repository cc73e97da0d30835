use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use tvg_twins::fixtures::WRAP_TEL;

const P3_TEL: &str = "p=1 n=3\n0 1 2\n0 2 3\n";

fn tvg_twins(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvg-twins"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn twins_of(doc: &serde_json::Value, node: u64) -> Vec<(u64, u64)> {
    doc["windows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|w| w["node"] == node)
        .unwrap()["twins"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| (t["peer"].as_u64().unwrap(), t["start"].as_u64().unwrap()))
        .collect()
}

#[test]
fn run_on_p3_reports_end_points() {
    let dir = TempDir::new().unwrap();
    let p3 = write(&dir, "p3.tel", P3_TEL);
    let out = tvg_twins(&["run", "--input", s(&p3), "--delta", "1", "--d", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json(&out);
    assert_eq!(twins_of(&doc, 1), vec![(3, 0)]);
    assert_eq!(twins_of(&doc, 3), vec![(1, 0)]);
    assert!(twins_of(&doc, 2).is_empty());
    assert!(doc.get("stats").is_none());
}

#[test]
fn run_on_wrap_fixture_reports_wrapped_window() {
    let dir = TempDir::new().unwrap();
    let wrap = write(&dir, "wrap.tel", WRAP_TEL);
    let out = tvg_twins(&["run", "--input", s(&wrap), "--delta", "3", "--d", "0", "--stats"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(twins_of(&doc, 0), vec![(1, 3)]);
    assert_eq!(doc["stats"]["lemma1_bound"], 12);
    assert_eq!(doc["input"]["max_degree"], 3);
}

#[test]
fn delta_above_period_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let p3 = write(&dir, "p3.tel", P3_TEL);
    let out = tvg_twins(&["run", "--input", s(&p3), "--delta", "2", "--d", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("exceeds period 1"), "{err}");
}

#[test]
fn input_errors_exit_with_code_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.tel");
    let out = tvg_twins(&["run", "--input", s(&missing), "--delta", "1", "--d", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let bad = write(&dir, "bad.tel", "p=1 n=3\n0 1 1\n");
    let out = tvg_twins(&["oracle", "--input", s(&bad), "--delta", "1", "--d", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let out = tvg_twins(&["run", "--delta", "1", "--d", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sketch_flags_in_exact_mode_warn_and_are_ignored() {
    let dir = TempDir::new().unwrap();
    let p3 = write(&dir, "p3.tel", P3_TEL);
    let plain = tvg_twins(&["run", "--input", s(&p3), "--delta", "1", "--d", "0"]);
    let flagged = tvg_twins(&["run", "--input", s(&p3), "--delta", "1", "--d", "0", "--k", "5"]);
    assert_eq!(flagged.status.code(), Some(0));
    assert!(stderr(&flagged).contains("warning"));
    assert_eq!(plain.stdout, flagged.stdout);
}

#[test]
fn oracle_output_diffs_cleanly_against_run() {
    let dir = TempDir::new().unwrap();
    for (name, text, delta) in [("p3.tel", P3_TEL, "1"), ("wrap.tel", WRAP_TEL, "3")] {
        let path = write(&dir, name, text);
        let args = ["--input", s(&path), "--delta", delta, "--d", "0"];
        let from_run = tvg_twins(&[&["run"][..], &args].concat());
        let from_oracle = tvg_twins(&[&["oracle"][..], &args].concat());
        assert_eq!(from_oracle.status.code(), Some(0));
        assert_eq!(from_run.stdout, from_oracle.stdout, "{name}");
    }
}

#[test]
fn oracle_on_edgeless_graph_is_empty() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.tel", "p=3 n=5\n");
    let out = tvg_twins(&["oracle", "--input", s(&empty), "--delta", "2", "--d", "4"]);
    let doc = json(&out);
    let windows = doc["windows"].as_array().unwrap();
    assert_eq!(windows.len(), 5);
    assert!(windows.iter().all(|w| w["twins"].as_array().unwrap().is_empty()));
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let p3 = write(&dir, "p3.tel", P3_TEL);
    let target = dir.path().join("result.json");
    let out = tvg_twins(&["run", "--input", s(&p3), "--delta", "1", "--d", "0", "--out", s(&target)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(twins_of(&doc, 1), vec![(3, 0)]);
}

#[test]
fn batch_compare_exact_reports_zero_differences() {
    let out = tvg_twins(&[
        "compare", "--gen", "20,6,0.3", "--trials", "100", "--delta", "3", "--d", "1", "--seed", "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("0 differences / 100 trials"), "{}", stdout(&out));
}

#[test]
fn single_file_compare_is_clean() {
    let dir = TempDir::new().unwrap();
    let wrap = write(&dir, "wrap.tel", WRAP_TEL);
    let out = tvg_twins(&["compare", "--input", s(&wrap), "--delta", "3", "--d", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "0 differences / 1 trials\n");
}

#[test]
fn lossless_sketch_compare_is_clean() {
    let out = tvg_twins(&[
        "compare", "--gen", "12,4,0.4", "--trials", "10", "--delta", "2", "--d", "1", "--mode", "sketch", "--k",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("0 differences / 10 trials"), "{text}");
    assert!(text.contains("mismatch rate 0.000000"), "{text}");
}

#[test]
fn lossy_sketch_mismatch_above_nu_exits_three() {
    // k = 2 cannot resolve these neighbourhoods; a near-zero ν makes any miss fatal.
    let out = tvg_twins(&[
        "compare", "--gen", "40,2,0.6", "--trials", "3", "--delta", "1", "--d", "4", "--mode", "sketch", "--k",
        "2", "--nu", "0.0001",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stdout(&out));
    assert!(stdout(&out).contains("boundary decisions"));
}

#[test]
fn compare_needs_an_instance_source() {
    let out = tvg_twins(&["compare", "--delta", "1", "--d", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_triangle() {
    let out = tvg_twins(&["gen", "--n", "3", "--p", "1", "--prob", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let edges: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("p="))
        .collect();
    assert_eq!(edges, vec!["0 0 1", "0 0 2", "0 1 2"]);
    let g = tvg_twins::tvg::parse_tel(&text).unwrap();
    assert_eq!((g.n(), g.period(), g.edge_count()), (3, 1, 3));
}

#[test]
fn gen_is_deterministic() {
    let args = ["gen", "--n", "15", "--p", "5", "--prob", "0.3", "--seed", "9"];
    let a = tvg_twins(&args);
    let b = tvg_twins(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = tvg_twins(&["gen", "--n", "15", "--p", "5", "--prob", "0.3", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gen_plant_is_verified_and_found_by_run() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("planted.tel");
    let out = tvg_twins(&[
        "gen", "--n", "10", "--p", "5", "--prob", "0.4", "--seed", "3", "--plant", "0,1,2,3,0", "--verify", "--out",
        s(&target),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("verified"));

    let run = tvg_twins(&["run", "--input", s(&target), "--delta", "3", "--d", "0"]);
    assert!(twins_of(&json(&run), 0).contains(&(1, 2)));
}

#[test]
fn infeasible_plant_is_rejected() {
    let out = tvg_twins(&["gen", "--n", "4", "--p", "2", "--prob", "0.5", "--plant", "0,1,0,1,3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("plant"));
}
