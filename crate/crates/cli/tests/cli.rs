//! The `bipi` binary end to end: exit codes, outputs and configuration.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn geometry(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../geometries").join(name)
}

fn bipi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bipi"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(bipi(&["--help"]).status.code(), Some(0));
    assert_eq!(bipi(&["pack", "--help"]).status.code(), Some(0));
    assert_eq!(bipi(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    let out = tempfile::tempdir().unwrap();
    let trap = geometry("trapezoid.bnd");
    assert_eq!(bipi(&[]).status.code(), Some(1));
    assert_eq!(bipi(&["pack", "--out", path(out.path())]).status.code(), Some(1));
    assert_eq!(bipi(&["pack", "--geometry", "/nonexistent.bnd", "--out", path(out.path())]).status.code(), Some(1));
    let bad_ratio = bipi(&["pack", "--geometry", path(&trap), "--h-ratio", "5", "--out", path(out.path())]);
    assert_eq!(bad_ratio.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_ratio.stderr).contains("h_ratio"));
    assert_eq!(bipi(&["pack", "--geometry", path(&trap), "--dx", "abc"]).status.code(), Some(1));
}

#[test]
fn malformed_geometry_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bnd = dir.path().join("bad.bnd");
    std::fs::write(&bnd, "loop 3\n0 0\n1 0\n").unwrap();
    let out = bipi(&["seed", "--geometry", path(&bnd), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_writes_its_outputs() {
    let out = tempfile::tempdir().unwrap();
    let run = bipi(&["seed", "--geometry", path(&geometry("trapezoid.bnd")), "--dx", "0.05", "--out", path(out.path())]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    for f in ["particles.csv", "particles.vtk", "gradc.svg", "summary.json"] {
        assert!(out.path().join(f).is_file(), "{f} missing");
    }
    let s = summary(out.path());
    assert_eq!(s["command"], "seed");
    let rows = std::fs::read_to_string(out.path().join("particles.csv")).unwrap().lines().count() - 1;
    assert_eq!(Some(rows as u64), s["n"].as_u64());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!(
            "# coarse run\ngeometry = {}\ndx = 0.05\nh_ratio = 1.5\nout = {}\n",
            geometry("trapezoid.bnd").display(),
            dir.path().display()
        ),
    )
    .unwrap();
    let run = bipi(&["pack", "--config", path(&cfg), "--h-ratio", "2.5", "--max-iters-2a", "20", "--max-iters-2c", "20"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stderr).contains("overrides"));
    let s = summary(dir.path());
    assert_eq!(s["dx"], 0.05);
    assert_eq!(s["h_ratio"], 2.5);
    assert!(dir.path().join("metrics.csv").is_file());
}

#[test]
fn unknown_config_key_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "spacing = 0.05\n").unwrap();
    let out = bipi(&["pack", "--config", path(&cfg), "--geometry", path(&geometry("trapezoid.bnd"))]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn short_drop_run() {
    let out = tempfile::tempdir().unwrap();
    let run = bipi(&["drop", "--dx", "0.1", "--t-end", "0.05", "--init", "grid", "--out", path(out.path())]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let s = summary(out.path());
    let (a, b) = (s["oracle_a"].as_f64().unwrap(), s["oracle_b"].as_f64().unwrap());
    assert!((a * b - 1.0).abs() < 1e-12);
    assert!(s["fitted_ratio"].as_f64().unwrap() > 1.0);
    assert!(out.path().join("timeseries.csv").is_file());
}

#[test]
fn short_hydrostatic_run() {
    let out = tempfile::tempdir().unwrap();
    let run = bipi(&[
        "hydrostatic",
        "--geometry",
        path(&geometry("rectangle.bnd")),
        "--dx",
        "0.05",
        "--t-end",
        "0.01",
        "--init",
        "grid",
        "--out",
        path(out.path()),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let s = summary(out.path());
    let slope = s["pressure_depth_slope"].as_f64().unwrap();
    assert!((slope / (1000.0 * 9.81) - 1.0).abs() < 0.05, "slope {slope}");
    assert_eq!(s["init"], "grid");
    assert!(out.path().join("fluid.csv").is_file());
}

#[test]
fn numerical_abort_exits_two() {
    // A sound speed far below the flow speed blows the density up at once.
    let out = tempfile::tempdir().unwrap();
    let run = bipi(&[
        "hydrostatic",
        "--geometry",
        path(&geometry("rectangle.bnd")),
        "--dx",
        "0.05",
        "--c0",
        "0.05",
        "--t-end",
        "1",
        "--init",
        "grid",
        "--out",
        path(out.path()),
    ]);
    assert_eq!(run.status.code(), Some(2), "{}", String::from_utf8_lossy(&run.stderr));
}

#[test]
fn bench_over_three_resolutions() {
    let out = tempfile::tempdir().unwrap();
    let run = bipi(&[
        "bench",
        "--geometry",
        path(&geometry("trapezoid.bnd")),
        "--resolutions",
        "0.08,0.06,0.05",
        "--max-iters-2a",
        "30",
        "--max-iters-2c",
        "30",
        "--out",
        path(out.path()),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = std::fs::read_to_string(out.path().join("bench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}
