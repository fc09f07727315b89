use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ising-storage");

fn run(args: &[&str], config: Option<&str>, dir: &Path) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    if let Some(text) = config {
        let path = dir.join("config.toml");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect()
}

fn run_into(sub: &str, config: &str, workers: &str, out: &Path) -> BTreeMap<String, Vec<u8>> {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        &[sub, "--workers", workers, "--out", out.to_str().unwrap()],
        Some(config),
        tmp.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    outputs(out)
}

const ERODE: &str = "seed = 7\ntrials = 40\n[erode]\nells = [3, 4, 5]\nhopf_every = 5\n";
const SIMULATE: &str = r#"
seed = 11
[simulate]
horizon = 20.0
lattice = { kind = "square_grid", side = 10 }
initial = { type = "random", p = 0.5 }
dynamics = { beta = 1.5 }
"#;

#[test]
fn erode_is_reproducible_across_runs_and_workers() {
    let tmp = tempfile::tempdir().unwrap();
    let a = run_into("erode", ERODE, "1", &tmp.path().join("a"));
    let b = run_into("erode", ERODE, "1", &tmp.path().join("b"));
    let c = run_into("erode", ERODE, "4", &tmp.path().join("c"));
    assert!(a.contains_key("erode_trials.jsonl"));
    assert!(a.contains_key("erode_summary.csv"));
    assert_eq!(a, b);
    assert_eq!(a, c);
    let csv = String::from_utf8(a["erode_summary.csv"].clone()).unwrap();
    assert!(csv.starts_with("# schema_version=1 experiment=erode master_seed=7\n"));
}

#[test]
fn simulate_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let a = run_into("simulate", SIMULATE, "1", &tmp.path().join("a"));
    let b = run_into("simulate", SIMULATE, "1", &tmp.path().join("b"));
    assert_eq!(a, b);
    let events = String::from_utf8(a["events.jsonl"].clone()).unwrap();
    let header: serde_json::Value = serde_json::from_str(events.lines().next().unwrap()).unwrap();
    assert_eq!(header["header"]["master_seed"], 11);
    assert_eq!(header["header"]["schema_version"], 1);
}

#[test]
fn census_writes_expected_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("census");
    let o = run(
        &["census", "--seed", "1", "--out", out.to_str().unwrap()],
        Some("[census]\nks = [3, 4]\n"),
        tmp.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("census.csv")).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[2].starts_with("4,8,6,6,"), "{}", rows[2]);
}

#[test]
fn missing_seed_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["census", "--out", tmp.path().to_str().unwrap()], None, tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["census"], Some("seed = 1\n[census]\nkz = [3]\n"), tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn infeasible_geometry_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let config = "seed = 1\n[codec]\ncodec = { scheme = \"honeycomb\", rows = 2, cols = 2 }\n";
    let o = run(&["codec", "--out", tmp.path().join("o").to_str().unwrap()], Some(config), tmp.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unwritable_output_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let o = run(&["census", "--seed", "1", "--out", out.to_str().unwrap()], None, tmp.path());
    assert_eq!(o.status.code(), Some(5));
}
