//! End-to-end behaviour of the binary at toy scale.

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_uav-vr-alloc");

const TINY: [&str; 7] = [
    "esn.reservoir_size=10",
    "game.max_actions=8",
    "experiment.horizon=30",
    "experiment.final_window=10",
    "experiment.smoothing_window=5",
    "topology.n_users=4",
    "experiment.sweep_uavs=[1, 2]",
];

fn run(args: &[&str]) -> Output {
    let mut cmd = Command::new(BIN);
    for s in TINY {
        cmd.args(["--set", s]);
    }
    cmd.args(args).env("UAV_VR_ALLOC_LOG", "off").output().expect("binary runs")
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

fn files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

#[test]
fn validate_prints_a_loadable_config() {
    let out = run(&["validate"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("reservoir_size = 10"));
    assert!(uav_vr_alloc::ExperimentConfig::from_toml_str(&text, &[]).is_ok());
}

#[test]
fn bad_input_exits_nonzero_with_a_diagnostic() {
    for args in [
        vec!["--set", "esn.bogus=1", "validate"],
        vec!["--set", "esn.leak_rate=-1", "validate"],
        vec!["--config", "/nonexistent/cfg.toml", "validate"],
        vec!["figures", "--only", "7"],
        vec!["run", "--algo", "sarsa"],
        vec!["--jobs", "0", "validate"],
    ] {
        let out = run(&args);
        assert!(!out.status.success(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn run_writes_results_summary_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let status = run(&["run", "--seed", "3", "--runs", "1", "--algo", "esn-leaky", "--trace", "--out", out]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert_eq!(files(dir.path()), ["results.csv", "summary.csv", "trace.csv"]);
    assert_eq!(header(&dir.path().join("results.csv")), "sweep_value,algo,seed,metric,value");
    assert_eq!(header(&dir.path().join("summary.csv")), "sweep_value,algo,metric,mean,std,n");
    assert_eq!(header(&dir.path().join("trace.csv")), "iteration,uav,action,utility,estimate_error");
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + 30 * 5);
}

#[test]
fn several_runs_get_one_trace_each() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(run(&["run", "--runs", "2", "--algo", "q", "--algo", "esn", "--trace", "--out", out]).status.success());
    assert_eq!(
        files(dir.path()),
        ["results.csv", "summary.csv", "trace_esn_0.csv", "trace_esn_1.csv", "trace_q_0.csv", "trace_q_1.csv"]
    );
}

#[test]
fn same_seed_same_bytes() {
    let read = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert!(run(&["run", "--seed", seed, "--runs", "2", "--out", out]).status.success());
        std::fs::read(dir.path().join("results.csv")).unwrap()
    };
    assert_eq!(read("7"), read("7"));
    assert_ne!(read("7"), read("8"));
}

#[test]
fn parallelism_does_not_change_results() {
    let read = |jobs: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert!(run(&["--jobs", jobs, "sweep", "--runs", "3", "--algo", "esn-leaky", "--out", out]).status.success());
        std::fs::read(dir.path().join("results.csv")).unwrap()
    };
    assert_eq!(read("1"), read("3"));
}

#[test]
fn figures_only_writes_the_requested_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(run(&["figures", "--only", "4", "--runs", "2", "--out", out]).status.success());
    assert_eq!(files(dir.path()), ["fig4.csv"]);
    assert_eq!(header(&dir.path().join("fig4.csv")), "figure,algo,x,metric,mean,std,n");

    let all = tempfile::tempdir().unwrap();
    let out = all.path().to_str().unwrap();
    assert!(run(&["figures", "--runs", "1", "--algo", "q", "--out", out]).status.success());
    assert_eq!(files(all.path()), ["fig3.csv", "fig4.csv", "fig5.csv", "fig6.csv"]);
    let fig5 = std::fs::read_to_string(all.path().join("fig5.csv")).unwrap();
    assert_eq!(fig5.lines().count(), 1 + 30);
}

#[test]
fn nash_check_reports_regrets_and_writes_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let status = Command::new(BIN)
        .args(["--set", "topology.n_uavs=2", "--set", "topology.n_users=2", "--set", "game.max_actions=3"])
        .args(["--set", "esn.reservoir_size=20", "--set", "experiment.horizon=200", "--set", "experiment.final_window=100"])
        .args(["--set", "topology.coverage_radius=10000.0"])
        .args(["nash-check", "--out", out])
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let text = String::from_utf8(status.stdout).unwrap();
    assert!(text.contains("uav 0: regret") && text.contains("uav 1: regret"), "{text}");
    assert!(text.contains("equilibrium"));
    assert!(header(&dir.path().join("utility_table.csv")).starts_with("joint_index,uav0_action,uav1_action"));
}

#[test]
fn nash_check_refuses_oversized_tables() {
    let out = Command::new(BIN)
        .args(["--set", "game.oracle_cell_cap=10", "--set", "game.max_actions=8", "--set", "esn.reservoir_size=10"])
        .args(["nash-check", "--out", tempfile::tempdir().unwrap().path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
