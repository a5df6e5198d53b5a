//! Drivers behind the CLI subcommands.

use coupler_core::analysis::{
    apply_axis, compute_series, default_flatness_threshold, default_min_width,
    detect_collapse_intervals, SweepAxis, SweepPoint, TimeSeries,
};
use coupler_core::analytic::classical_trajectory;
use coupler_core::CouplerError;

use crate::config::{BackendKind, ScenarioConfig};
use crate::csv;

fn write_file(path: &str, contents: &str) -> Result<(), CouplerError> {
    std::fs::write(path, contents)
        .map_err(|e| CouplerError::InvalidParameter(format!("cannot write `{path}`: {e}")))
}

fn series_for(cfg: &ScenarioConfig, backend: BackendKind) -> Result<TimeSeries, CouplerError> {
    compute_series(&cfg.request_for(backend)?)
}

/// `run`: compute the configured series and emit CSV. With `backend=both`
/// two files are written and a max-abs-difference summary goes to stderr.
pub fn run(cfg: &ScenarioConfig) -> Result<Vec<String>, CouplerError> {
    cfg.validate()?;
    match cfg.backend {
        BackendKind::Both => {
            let analytic = series_for(cfg, BackendKind::Analytic)?;
            let fock = series_for(cfg, BackendKind::Fock)?;
            let (path_a, path_f) = csv::both_paths(&cfg.output);
            write_file(&path_a, &csv::render_series(&analytic))?;
            write_file(&path_f, &csv::render_series(&fock))?;
            let diffs = csv::column_diffs(&analytic, &fock);
            let worst = csv::worst_column(&diffs);
            eprintln!(
                "both-backend max abs diff {:.3e} (column {} at t={})",
                worst.max_abs_diff, worst.column, worst.at_t
            );
            Ok(vec![path_a, path_f])
        }
        backend => {
            let series = series_for(cfg, backend)?;
            write_file(&cfg.output, &csv::render_series(&series))?;
            Ok(vec![cfg.output.clone()])
        }
    }
}

/// `compare`: force both backends, report per-column max-abs-diff and the
/// worst disagreement. Returns true when the worst diff exceeds `tolerance`.
pub fn compare(cfg: &ScenarioConfig, tolerance: f64) -> Result<bool, CouplerError> {
    cfg.validate()?;
    let analytic = series_for(cfg, BackendKind::Analytic)?;
    let fock = series_for(cfg, BackendKind::Fock)?;
    let diffs = csv::column_diffs(&analytic, &fock);
    for d in &diffs {
        println!("column {:<8} max abs diff {:.6e} at t={}", d.column, d.max_abs_diff, d.at_t);
    }
    let worst = csv::worst_column(&diffs);
    println!(
        "worst: column {} diff {:.6e} at t={} (tolerance {:.3e})",
        worst.column, worst.max_abs_diff, worst.at_t, tolerance
    );
    // conservation diagnostic: the fock engine is unitary by construction, so
    // any drift of the classical total intensity points at the trajectory
    // convention, not the oracle.
    let params = cfg.params()?;
    let init = cfg.initial_amplitudes()?;
    let eps = init.epsilon();
    let drift = cfg
        .grid()
        .points()
        .iter()
        .map(|&t| (classical_trajectory(&params, &init, t).total_intensity() - eps).abs())
        .fold(0.0, f64::max);
    eprintln!(
        "classical photon-number conservation drift ({} convention): max |.|^2 deviation {:.3e}",
        params.convention, drift
    );
    Ok(worst.max_abs_diff > tolerance)
}

/// `sweep`: vary one axis, emit `value,min_s,argmin_t` CSV rows, and report
/// the collapse-interval count per value on stderr.
pub fn sweep_run(
    cfg: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
    out: Option<&str>,
) -> Result<(), CouplerError> {
    cfg.validate()?;
    let base = cfg.request_for(match cfg.backend {
        BackendKind::Both => BackendKind::Analytic,
        other => other,
    })?;
    let mut points = Vec::with_capacity(values.len());
    for &value in values {
        let req = apply_axis(&base, axis, value)?;
        let series = compute_series(&req)?;
        let (min_s, argmin_t) = series.min_s();
        points.push(SweepPoint {
            value,
            min_s,
            argmin_t,
        });
        let report = detect_collapse_intervals(
            &series,
            default_flatness_threshold(&series),
            default_min_width(&series),
        )?;
        eprintln!(
            "{axis}={value}: min_s={min_s} at t={argmin_t}, collapse_intervals={}",
            report.intervals.len()
        );
    }
    let rendered = csv::render_sweep(&points);
    match out {
        Some(path) => write_file(path, &rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}
