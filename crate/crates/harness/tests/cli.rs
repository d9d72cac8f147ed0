use std::path::Path;
use std::process::Command;

use aurora_core::fields::Snapshot;
use aurora_harness::output::{LEDGER, SNAPSHOT_DIR, SUMMARY};

const QUIESCENT: &str = include_str!("../configs/quiescent.toml");
const HEAT: &str = include_str!("../configs/heat.toml");

fn aurora(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_aurora")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn run_then_strict_diag_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), QUIESCENT);
    let out = tmp.path().join("out");
    let run = aurora(&["run", "-c", &cfg, "-o", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    for f in [LEDGER, SUMMARY, "config.toml"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let diag = aurora(&["diag", "-d", out.to_str().unwrap(), "--strict"]);
    assert!(diag.status.success(), "{}", String::from_utf8_lossy(&diag.stderr));
}

#[test]
fn strict_diag_rejects_tampered_density() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), HEAT);
    let out = tmp.path().join("out");
    assert!(aurora(&["run", "-c", &cfg, "-o", out.to_str().unwrap()]).status.success());
    let snaps = out.join(SNAPSHOT_DIR);
    let last = std::fs::read_dir(&snaps)
        .unwrap()
        .map(|e| e.unwrap().path())
        .max_by_key(|p| p.file_stem().unwrap().to_string_lossy().trim_start_matches("step-").parse::<usize>().unwrap())
        .unwrap();
    let mut snap = Snapshot::read_from(std::fs::File::open(&last).unwrap()).unwrap();
    let idx = snap.header.components.iter().position(|c| c.name == "rho").unwrap();
    snap.fields[idx].data_mut()[0] += 0.5;
    snap.write_to(std::fs::File::create(&last).unwrap()).unwrap();
    let diag = aurora(&["diag", "-d", out.to_str().unwrap(), "--strict"]);
    assert_eq!(diag.status.code(), Some(5), "{}", String::from_utf8_lossy(&diag.stdout));
}

#[test]
fn bad_config_exits_with_config_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &QUIESCENT.replace("nx = 32", "nx = 2"));
    assert_eq!(aurora(&["run", "-c", &cfg]).status.code(), Some(2));
    let missing = tmp.path().join("nope.toml");
    assert_eq!(aurora(&["run", "-c", missing.to_str().unwrap()]).status.code().map(|c| c != 0), Some(true));
}

#[test]
fn rejected_sweep_plan_exits_with_config_code() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!("{QUIESCENT}\n[sweep]\neps0 = 0.01\nn_schedule = \"increment\"\n");
    let cfg = write_config(tmp.path(), &text);
    let out = aurora(&["sweep", "-c", &cfg, "--levels", "2"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}
