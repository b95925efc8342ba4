use std::fs;
use std::process::Command;

use backcom_cli::read_results;

fn backcom() -> Command {
    Command::new(env!("CARGO_BIN_EXE_backcom"))
}

#[test]
fn fig3_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.toml");
    fs::write(&config, "[fig3]\nelements = [4, 9]\n").unwrap();
    let out = dir.path().join("out");
    let status = backcom()
        .args(["--experiment", "fig3", "--realizations", "2", "--seed", "5"])
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let rows = read_results(&out.join("results.csv")).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2);
    assert!(rows.iter().all(|r| r.experiment == "fig3" && r.feasible));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 * 2);
    assert!(fs::read_to_string(out.join("plot.gp")).unwrap().contains("plot "));
}

#[test]
fn scheme_and_regime_flags_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let bad_scheme = backcom()
        .args(["--schemes", "mm_sdr,warp_drive", "--realizations", "1"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!bad_scheme.status.success());
    assert!(String::from_utf8_lossy(&bad_scheme.stderr).contains("warp_drive"));

    let bad_regime = backcom()
        .args(["--regime", "sideways", "--realizations", "1"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!bad_regime.status.success());
}

#[test]
fn single_run_with_circuit_power_and_forced_regime() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    fs::write(&config, "[layout]\nelements = 9\n[tag]\ncircuit_power_dbm = -60.0\nharvest_efficiency = 0.5\n").unwrap();
    let out = dir.path().join("o");
    let status = backcom()
        .args(["--experiment", "single", "--realizations", "2", "--regime", "dinkelbach", "--record-timing"])
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = read_results(&out.join("results.csv")).unwrap();
    let mm: Vec<_> = rows.iter().filter(|r| r.scheme == "mm_sdr").collect();
    assert_eq!(mm.len(), 2);
    assert!(mm.iter().all(|r| r.feasible && r.mm_iterations > 0 && r.wall_ms > 0.0));
}
