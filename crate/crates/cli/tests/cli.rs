//! End-to-end tests of the `nsf` binary.

use std::path::Path;
use std::process::{Command, Output};

const ZERO: &str = "[domain]\nT = 0.05\n[discretization]\nN = 4\nM = 4\n[data]\nf = zero\nu0 = zero\ntheta0 = zero\n";
const SMALL: &str = "[domain]\nT = 0.02\n[discretization]\nN = 4\nM = 4\ndt = 0.002\n";

fn nsf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsf")).args(args).env("NSF_THREADS", "1").output().expect("spawn nsf")
}

fn write_scenario(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn run_into(dir: &Path, scenario: &str, out: &str) -> String {
    let out = dir.join(out);
    let o = nsf(&["run", scenario, "--out", out.to_str().unwrap(), "--plot-grid", "8"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out.to_str().unwrap().to_string()
}

#[test]
fn zero_run_verifies_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "zero.txt", ZERO);
    let out = run_into(tmp.path(), &sc, "run");
    let o = nsf(&["verify", &out, "--cutoffs", "6", "--cylinders", "6"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(o.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("failures = 0"));
    let checks = std::fs::read_to_string(Path::new(&out).join("checks.csv")).unwrap();
    assert!(checks.lines().skip(1).all(|l| l.contains(",true,")));
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "small.txt", SMALL);
    let a = run_into(tmp.path(), &sc, "a");
    let b = run_into(tmp.path(), &sc, "b");
    for f in ["velocity.nsf", "temperature.nsf", "pressure.nsf", "fields.nsf", "ledger.csv", "manifest.txt", "scenario.txt"] {
        let x = std::fs::read(Path::new(&a).join(f)).unwrap();
        let y = std::fs::read(Path::new(&b).join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}

#[test]
fn corrupted_dump_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "small.txt", SMALL);
    let out = run_into(tmp.path(), &sc, "run");
    let path = Path::new(&out).join("velocity.nsf");
    let mut bytes = std::fs::read(&path).unwrap();
    let k = bytes.len() / 2;
    bytes[k] ^= 0x40;
    std::fs::write(&path, bytes).unwrap();
    let o = nsf(&["verify", &out, "--cutoffs", "2", "--cylinders", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn bad_scenario_is_a_parse_error() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "bad.txt", "[physics]\nk = 0.1\nbogus = 3\n");
    let o = nsf(&["run", &sc, "--out", tmp.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&o.stderr));
    let o = nsf(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(nsf(&["--help"]).status.code(), Some(0));
}

#[test]
fn export_writes_one_frame_per_level() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "small.txt", SMALL);
    let out = run_into(tmp.path(), &sc, "run");
    let o = nsf(&["export-plots", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let plots = Path::new(&out).join("plots");
    let index = std::fs::read_to_string(plots.join("index.csv")).unwrap();
    let levels = 11; // T / dt + 1
    assert_eq!(index.lines().count(), levels + 1);
    let frames = std::fs::read_dir(&plots).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("theta_")).count();
    assert_eq!(frames, levels);
}

#[test]
fn sweep_of_equal_values_has_zero_differences() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "small.txt", SMALL);
    let out = tmp.path().join("sweep");
    let o = nsf(&["sweep", &sc, "--param", "nu", "--values", "0.05,0.05,0.1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let rows: Vec<Vec<&str>> = table.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][4].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[0][5].parse::<f64>().unwrap(), 0.0);
    assert!(rows[1][4].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn neumann_oracle_reports_agreement() {
    let o = nsf(&["oracle", "neumann", "--seed", "3", "--size", "12"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    let worst = text
        .lines()
        .skip(1)
        .take(20)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .fold(0.0f64, f64::max);
    assert!(worst < 1e-8, "{text}");
}
