use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sfcmec::golden;
use sfcmec::scenario_file;

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn bundled() -> PathBuf {
    repo().join("scenarios/paper.toml")
}

fn sfcmec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfcmec")).args(args).env_remove("SFCMEC_OUT").output().unwrap()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn read_summary(dir: &Path) -> csv::StringRecord {
    let mut r = csv::Reader::from_path(dir.join("summary.csv")).unwrap();
    r.records().next().unwrap().unwrap()
}

#[test]
fn scenario_gen_reproduces_bundled_file() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.toml");
    let b = tmp.path().join("b.toml");
    ok(&sfcmec(&["scenario-gen", "--template", "paper", "--out", a.to_str().unwrap()]));
    ok(&sfcmec(&["scenario-gen", "--out", b.to_str().unwrap()]));
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    assert_eq!(bytes, fs::read(bundled()).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    assert!(text.contains("name = \"sfc-1\"\nvnfs = [\"vnf-1\", \"vnf-2\", \"vnf-3\"]"));
    assert!(text.contains("name = \"sfc-2\"\nvnfs = [\"vnf-1\", \"vnf-4\", \"vnf-6\"]"));
    assert!(text.contains("name = \"sfc-3\"\nvnfs = [\"vnf-3\", \"vnf-4\", \"vnf-5\", \"vnf-7\"]"));
    scenario_file::load(&a).unwrap();
}

#[test]
fn scenario_gen_rejects_load_out_of_range() {
    let tmp = tempfile::tempdir().unwrap();
    let out = sfcmec(&["scenario-gen", "--load", "0.9", "--out", tmp.path().join("x.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_summary_matches_golden_value() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&sfcmec(&["run", "--scenario", bundled().to_str().unwrap(), "--engine", "oracle", "--out", tmp.path().to_str().unwrap()]));
    let summary = read_summary(tmp.path());
    let objective: f64 = summary[3].parse().unwrap();
    let fp = scenario_file::load(&bundled()).unwrap().fingerprint;
    let gold = golden::lookup(&repo().join("data/oracle_golden.csv"), &fp, 1e6).unwrap().expect("golden entry");
    assert!((objective - gold).abs() <= 1e-12 * gold, "{objective} vs {gold}");
}

#[test]
fn unknown_engine_is_a_usage_error() {
    let out = sfcmec(&["run", "--scenario", bundled().to_str().unwrap(), "--engine", "annealing"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_scenario_fails_with_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    let out = sfcmec(&["run", "--scenario", "/nonexistent.toml", "--engine", "ga", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonexistent.toml"));
}

#[test]
fn bad_override_key_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "[ga]\nelite = 2\n").unwrap();
    let out = sfcmec(&[
        "run", "--scenario", bundled().to_str().unwrap(), "--engine", "ga", "--config", cfg.to_str().unwrap(),
        "--out", tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rl_run_writes_artifacts_and_decodes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("rl");
    let scenario = bundled();
    ok(&sfcmec(&["run", "--scenario", scenario.to_str().unwrap(), "--engine", "rl", "--seed", "4", "--episodes", "300", "--out", dir.to_str().unwrap()]));
    for f in ["summary.csv", "placement.csv", "requests.csv", "training_log.csv", "reward_curves.csv", "policy.txt", "wall_time.txt"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let log = fs::read_to_string(dir.join("training_log.csv")).unwrap();
    assert!(log.starts_with("episode,reward,delay_ms,temperature\n"));
    assert_eq!(log.lines().count(), 301);

    let decoded = tmp.path().join("decoded");
    ok(&sfcmec(&[
        "decode", "--scenario", scenario.to_str().unwrap(), "--policy", dir.join("policy.txt").to_str().unwrap(),
        "--out", decoded.to_str().unwrap(),
    ]));
    assert_eq!(fs::read(dir.join("placement.csv")).unwrap(), fs::read(decoded.join("placement.csv")).unwrap());
}

#[test]
fn output_dir_defaults_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sfcmec"))
        .args(["run", "--scenario", bundled().to_str().unwrap(), "--engine", "mfg"])
        .env("SFCMEC_OUT", tmp.path())
        .output()
        .unwrap();
    ok(&out);
    assert!(tmp.path().join("mfg_iterations.csv").exists());
    assert!(tmp.path().join("mfg_solution.csv").exists());
    assert_eq!(&read_summary(tmp.path())[4], "true");
}

#[test]
fn single_step_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&sfcmec(&[
        "sweep", "--scenario", bundled().to_str().unwrap(), "--engines", "ga,oracle", "--beta-steps", "1", "--seeds", "2",
        "--out", tmp.path().to_str().unwrap(),
    ]));
    let text = fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "chain,beta_bytes,engine,mean_delay_ms,stddev_ms,seeds");
    // three chains, one size, two engines
    assert_eq!(lines.len(), 1 + 3 * 2);
    assert!(lines[1..].iter().all(|l| l.split(',').nth(1) == Some("100000")));
}
