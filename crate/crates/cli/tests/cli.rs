//! End-to-end checks of the `coupler` binary: exit codes, CSV behavior,
//! config handling and the sweep front end.

use std::path::PathBuf;
use std::process::{Command, Output};

use coupler_cli::config::ScenarioConfig;

fn coupler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coupler"))
        .args(args)
        .output()
        .expect("spawn coupler")
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("coupler_cli_test_{}_{name}", std::process::id()))
}

fn read_csv_column(path: &PathBuf, column: usize) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|line| line.split(',').nth(column).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn vacuum_input_emits_zero_factors() {
    let out_path = tmp("vacuum.csv");
    let cfg_path = tmp("vacuum.cfg");
    std::fs::write(
        &cfg_path,
        "alpha1_re=0\nalpha2_re=0\nmeasure=sum\nsteps=50\nt_stop=3\n",
    )
    .unwrap();
    let out = coupler(&[
        "run",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for column in [1, 2] {
        for v in read_csv_column(&out_path, column) {
            assert!(v.abs() < 1e-12, "nonzero factor {v}");
        }
    }
    let _ = std::fs::remove_file(out_path);
    let _ = std::fs::remove_file(cfg_path);
}

#[test]
fn fig1a_preset_shows_squeezing_in_s_column() {
    let out_path = tmp("fig1a.csv");
    let out = coupler(&[
        "run",
        "--preset",
        "fig1a_n2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let s = read_csv_column(&out_path, 1);
    assert_eq!(s.len(), 4000);
    assert!(s.iter().copied().fold(f64::INFINITY, f64::min) < -0.29);
    let header = std::fs::read_to_string(&out_path).unwrap();
    assert!(header.starts_with("t,s,q,var_x,var_y,c_mean,raw_s,raw_q,envelope\n"));
    let _ = std::fs::remove_file(out_path);
}

#[test]
fn preset_subcommand_round_trips() {
    let out = coupler(&["preset", "fig3b"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg = ScenarioConfig::parse(&text).unwrap();
    assert_eq!(cfg, coupler_cli::config::preset("fig3b").unwrap());
    assert_eq!(cfg.serialize(), text);
}

#[test]
fn difference_series_is_chi_independent_byte_for_byte() {
    let base = "measure=difference\nalpha1_re=0.3\nalpha2_re=0.6\ndelta=50\nsteps=300\nt_stop=6.283185307179586\n";
    let mut outputs = Vec::new();
    for chi in ["0", "0.7"] {
        let cfg_path = tmp(&format!("diff_chi{chi}.cfg"));
        let out_path = tmp(&format!("diff_chi{chi}.csv"));
        std::fs::write(&cfg_path, format!("{base}chi={chi}\n")).unwrap();
        let out = coupler(&[
            "run",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        outputs.push(std::fs::read(&out_path).unwrap());
        let _ = std::fs::remove_file(cfg_path);
        let _ = std::fs::remove_file(out_path);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn both_backend_writes_two_files_and_summary() {
    let out_path = tmp("both.csv");
    let out = coupler(&[
        "run",
        "--preset",
        "fig1a_n2",
        "--backend",
        "both",
        "--grid",
        "0:3:120",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("both-backend max abs diff"), "stderr: {stderr}");
    let analytic = tmp("both.analytic.csv");
    let fock = tmp("both.fock.csv");
    assert!(analytic.exists() && fock.exists());
    let sa = read_csv_column(&analytic, 1);
    let sf = read_csv_column(&fock, 1);
    for (a, f) in sa.iter().zip(&sf) {
        assert!((a - f).abs() < 1e-6);
    }
    let _ = std::fs::remove_file(analytic);
    let _ = std::fs::remove_file(fock);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(coupler(&["run", "--preset", "fig9"]).status.code(), Some(1));
    assert_eq!(
        coupler(&["run", "--preset", "fig1a_n2", "--config", "x.cfg"]).status.code(),
        Some(1)
    );
    assert_eq!(coupler(&["run", "--grid", "0:1"]).status.code(), Some(1));
    assert_eq!(coupler(&["sweep", "--axis", "gamma", "--values", "1"]).status.code(), Some(1));
    assert_eq!(coupler(&["bogus-subcommand"]).status.code(), Some(1));
    let missing = coupler(&["run", "--config", "/nonexistent/path.cfg"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn cutoff_guard_exits_two_and_names_the_index() {
    let out_path = tmp("guard.csv");
    let out = coupler(&[
        "run",
        "--preset",
        "fig1a_n2",
        "--backend",
        "fock",
        "--cutoff",
        "6",
        "--grid",
        "0:1:10",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("moment index (0,2,0,0)"),
        "stderr should name the first offending moment index: {stderr}"
    );
    let _ = std::fs::remove_file(out_path);
}

#[test]
fn compare_exit_codes_by_convention() {
    let ok = coupler(&["compare", "--preset", "fig3b", "--grid", "0:2:80"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let bad = coupler(&[
        "compare",
        "--preset",
        "fig3b",
        "--grid",
        "0:2:80",
        "--convention",
        "paper-exact",
    ]);
    assert_eq!(bad.status.code(), Some(3));
    let stderr = String::from_utf8(bad.stderr).unwrap();
    assert!(
        stderr.contains("conservation drift"),
        "stderr should report the nonconservation: {stderr}"
    );
}

#[test]
fn sweep_order_monotonicity_and_delta_summary() {
    // order sweep on the fig1a base: minima strictly increase toward zero
    let out = coupler(&[
        "sweep",
        "--preset",
        "fig1a_n2",
        "--axis",
        "n",
        "--values",
        "1,2,3",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(lines.next().unwrap(), "value,min_s,argmin_t");
    let mins: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(mins.len(), 3);
    assert!(mins[0] < mins[1] && mins[1] < mins[2]);
    assert!(mins[2] < 0.0);

    // detuning sweep: the collapse-interval count changes with delta
    let out = coupler(&[
        "sweep",
        "--preset",
        "fig1a_n2",
        "--grid",
        "0:6.283185307179586:4000",
        "--axis",
        "delta",
        "--values",
        "0,50",
    ]);
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    let counts: Vec<&str> = stderr
        .lines()
        .filter_map(|l| l.split("collapse_intervals=").nth(1))
        .collect();
    assert_eq!(counts.len(), 2, "stderr: {stderr}");
    assert_ne!(counts[0], counts[1]);
    assert_eq!(counts[0], "0");
}

#[test]
fn sweep_writes_csv_when_out_given() {
    let out_path = tmp("sweep.csv");
    let out = coupler(&[
        "sweep",
        "--preset",
        "fig1a_n2",
        "--grid",
        "0:3:200",
        "--axis",
        "chi",
        "--values",
        "0.25,0.5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("value,min_s,argmin_t\n"));
    assert_eq!(text.lines().count(), 3);
    let _ = std::fs::remove_file(out_path);
}
