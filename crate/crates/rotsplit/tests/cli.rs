use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rotsplit::Snapshot;

const SMALL: &str = "\
[grid]
L = 8
nx = 32
ny = 32
[hamiltonian]
omega0_sq = 2
rotation = 0.2
modulation = sin-half
[nonlinear]
g = 1
lambda = 0
potential = none
[time]
t0 = 0
T = 0.5
[run]
methods = ROT2, STD2
steps = 4, 8
initial = vortex
reference_method = ROT2
reference_factor = 16
magnus_order = 4
seed = 0
[output]
csv = small.csv
";

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rotsplit-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn rotsplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotsplit")).args(args).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("small.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn error_column(csv: &Path) -> Vec<String> {
    let mut r = csv::Reader::from_path(csv).unwrap();
    r.records().map(|row| row.unwrap()[3].to_string()).collect()
}

#[test]
fn presets_are_listed_and_valid() {
    let out = rotsplit(&["presets"]);
    assert!(out.status.success());
    let names = String::from_utf8(out.stdout).unwrap();
    assert_eq!(names.lines().collect::<Vec<_>>(), ["fig1", "fig2", "fig3", "fig4"]);
    for name in names.lines() {
        let out = rotsplit(&["validate", name]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn validate_reports_lines_and_fails() {
    let dir = scratch("validate");
    let bad = SMALL
        .replace("nx = 32", "nx = 31")
        .replace("lambda = 0", "lambda = 0.1")
        .replace("ROT2, STD2", "ROT2, BM4-ROT");
    let out = rotsplit(&["validate", &write_config(&dir, &bad)]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3: nx"), "{err}");
    assert!(err.contains("BM4-ROT"), "{err}");
    assert!(err.contains("2 problem(s)"), "{err}");
}

#[test]
fn run_writes_csv_and_is_thread_independent() {
    let dir = scratch("run");
    let cfg = write_config(&dir, SMALL);
    let mut columns = Vec::new();
    for threads in ["1", "2"] {
        let out_dir = dir.join(format!("t{threads}"));
        let out = rotsplit(&["run", &cfg, "--out", out_dir.to_str().unwrap(), "--threads", threads]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let csv = out_dir.join("small.csv");
        let text = std::fs::read_to_string(&csv).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "method,n_steps,h,l2_error,final_norm,fft_count,wall_time_ms,note"
        );
        assert_eq!(text.lines().count(), 5);
        columns.push(error_column(&csv));
    }
    assert_eq!(columns[0], columns[1]);
}

#[test]
fn reference_snapshot_is_reused() {
    let dir = scratch("reference");
    let cfg = write_config(&dir, SMALL);
    let out_dir = dir.to_str().unwrap();
    assert!(rotsplit(&["reference", &cfg, "--out", out_dir]).status.success());
    let reference = dir.join("small_reference.rbec");
    let snap = Snapshot::load(&reference).unwrap();
    assert_eq!((snap.spec.nx, snap.spec.ny, snap.time), (32, 32, 0.5));
    assert!(snap.comment.contains("n_steps=128"), "{}", snap.comment);

    let fresh = dir.join("fresh");
    assert!(rotsplit(&["run", &cfg, "--out", fresh.to_str().unwrap(), "--snapshot-final"]).status.success());
    let reused = dir.join("reused");
    let out = rotsplit(&["run", &cfg, "--out", reused.to_str().unwrap(), "--reference", reference.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(error_column(&fresh.join("small.csv")), error_column(&reused.join("small.csv")));
    assert!(fresh.join("small_ROT2_8.rbec").exists());
}

#[test]
fn mismatched_reference_is_rejected() {
    let dir = scratch("mismatch");
    let cfg = write_config(&dir, SMALL);
    assert!(rotsplit(&["reference", &cfg, "--out", dir.to_str().unwrap()]).status.success());
    let longer = write_config(&dir, &SMALL.replace("T = 0.5", "T = 0.75"));
    let reference = dir.join("small_reference.rbec");
    let out = rotsplit(&["run", &longer, "--out", dir.to_str().unwrap(), "--reference", reference.to_str().unwrap()]);
    assert!(!out.status.success());
}
