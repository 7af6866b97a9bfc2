//! End-to-end checks of the command-line binary: exit codes, file outputs,
//! config-file handling, and byte-level determinism of summary.json.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_catena"))
}

fn run_ok(dir: &Path, args: &[&str]) {
    let out = bin()
        .args(args)
        .args(["--out_dir", dir.to_str().unwrap()])
        .output()
        .expect("spawn binary");
    assert!(
        out.status.success(),
        "args {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("catena-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn catenoid_writes_summary_and_table() {
    let dir = tmp("catenoid");
    run_ok(&dir, &["--command", "catenoid", "--sigma", "2", "--grid_n", "101"]);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["command"], "catenoid");
    assert!((summary["c_out"].as_f64().unwrap() - 0.5894).abs() < 1e-3);
    assert!((summary["c_in"].as_f64().unwrap() - 2.1268).abs() < 1e-3);
    let table = std::fs::read_to_string(dir.join("catenoid.tsv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("z\tu_outer\tu_inner"));
    assert_eq!(lines.count(), 101);
    // No leftover temp file from the atomic write.
    assert!(!dir.join("summary.tmp").exists());
}

#[test]
fn below_critical_sigma_is_a_domain_error() {
    let dir = tmp("domain");
    let out = bin()
        .args(["--command", "catenoid", "--sigma", "1"])
        .args(["--out_dir", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sigma_crit"), "stderr: {err}");
}

#[test]
fn bad_config_values_exit_2() {
    let dir = tmp("badcfg");
    for args in [
        ["--command", "nonsense", "--sigma", "2"],
        ["--command", "catenoid", "--sigma", "zebra"],
        ["--command", "catenoid", "--grid_n", "100"], // even grid rejected
    ] {
        let out = bin()
            .args(args)
            .args(["--out_dir", dir.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tmp("cfgfile");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "command = catenoid\nsigma = 5.0\n# comment\ngrid_n = 51\n").unwrap();
    run_ok(&dir, &["--config", cfg.to_str().unwrap(), "--sigma", "2"]);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["sigma"], 2.0); // flag wins over file
    assert_eq!(summary["provenance"]["grid_n"], 51); // file value survives
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tmp("unknown");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "command = catenoid\nsgima = 2\n").unwrap();
    let out = bin()
        .args(["--config", cfg.to_str().unwrap()])
        .args(["--out_dir", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn deflect_reports_sign_pattern() {
    let dir = tmp("deflect");
    run_ok(&dir, &["--command", "deflect", "--sigma", "2", "--branch", "inner", "--grid_n", "201"]);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    let r0 = summary["sign_pattern"]["TwoSignChanges"]["r0"].as_f64().unwrap();
    assert!(r0 > 0.0 && r0 < 1.0, "r0 = {r0}");
    assert_eq!(summary["r0"].as_f64().unwrap(), r0);
    assert!(dir.join("deflect.tsv").exists());
}

#[test]
fn eigencurve_summary_locates_critical_point() {
    let dir = tmp("eig");
    run_ok(
        &dir,
        &["--command", "eigencurve", "--samples", "11", "--grid_n", "201", "--c_lo", "0.8", "--c_hi", "1.6"],
    );
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    let zero = summary["zero_crossing"].as_f64().unwrap();
    assert!((zero - 1.19968).abs() < 1e-3, "zero at {zero}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let d1 = tmp("det1");
    let d2 = tmp("det2");
    let args = ["--command", "simulate", "--sigma", "2", "--grid_n", "101", "--t_max", "0.5", "--random_perturbation", "--seed", "42"];
    run_ok(&d1, &args);
    run_ok(&d2, &args);
    let s1 = std::fs::read(d1.join("summary.json")).unwrap();
    let s2 = std::fs::read(d2.join("summary.json")).unwrap();
    assert_eq!(s1, s2);
    let t1 = std::fs::read(d1.join("trajectory.tsv")).unwrap();
    let t2 = std::fs::read(d2.join("trajectory.tsv")).unwrap();
    assert_eq!(t1, t2);
}
