//! CSV emission. Schema is bit-exact: header
//! `t,s,q,var_x,var_y,c_mean,raw_s,raw_q,envelope`, LF line endings, floats
//! rendered with Rust's shortest round-trip formatting.

use coupler_core::analysis::{envelope, SweepPoint, TimeSeries};
use coupler_core::squeezing::QuadratureSpec;

pub const HEADER: &str = "t,s,q,var_x,var_y,c_mean,raw_s,raw_q,envelope";

/// Envelope column value for a series row: the measure's own envelope order
/// (`f(n chi t)` for the nth single-mode measure, `f(2 chi t)` for sum, and
/// constant 1 for the chi-independent difference measure).
fn envelope_at(series: &TimeSeries, t: f64) -> f64 {
    let chi = series.meta.params.chi;
    let eps = series.meta.init.epsilon();
    match series.meta.spec {
        QuadratureSpec::SingleModeNth { n, .. } => envelope(n, chi, eps, t),
        QuadratureSpec::Sum => envelope(2, chi, eps, t),
        QuadratureSpec::Difference => 1.0,
    }
}

pub fn render_series(series: &TimeSeries) -> String {
    let mut out = String::with_capacity(64 * (series.samples.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for sample in &series.samples {
        let row = [
            sample.t,
            sample.s,
            sample.q,
            sample.var_x,
            sample.var_y,
            sample.c_mean,
            sample.raw_s,
            sample.raw_q,
            envelope_at(series, sample.t),
        ];
        let mut first = true;
        for value in row {
            if !first {
                out.push(',');
            }
            out.push_str(&value.to_string());
            first = false;
        }
        out.push('\n');
    }
    out
}

pub const SWEEP_HEADER: &str = "value,min_s,argmin_t";

pub fn render_sweep(points: &[SweepPoint]) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.value, p.min_s, p.argmin_t));
    }
    out
}

/// Output paths for a `both`-backend run: the `.csv` suffix (if any) is
/// replaced by `.analytic.csv` / `.fock.csv`.
pub fn both_paths(output: &str) -> (String, String) {
    let stem = output.strip_suffix(".csv").unwrap_or(output);
    (format!("{stem}.analytic.csv"), format!("{stem}.fock.csv"))
}

/// Per-column maximum absolute difference between two series on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnDiff {
    pub column: &'static str,
    pub max_abs_diff: f64,
    pub at_t: f64,
}

type ColumnGetter = fn(&coupler_core::SqueezingSample) -> f64;

pub fn column_diffs(a: &TimeSeries, b: &TimeSeries) -> Vec<ColumnDiff> {
    let columns: [(&'static str, ColumnGetter); 8] = [
        ("t", |s| s.t),
        ("s", |s| s.s),
        ("q", |s| s.q),
        ("var_x", |s| s.var_x),
        ("var_y", |s| s.var_y),
        ("c_mean", |s| s.c_mean),
        ("raw_s", |s| s.raw_s),
        ("raw_q", |s| s.raw_q),
    ];
    let mut diffs: Vec<ColumnDiff> = columns
        .iter()
        .map(|(name, get)| {
            let mut worst = ColumnDiff {
                column: name,
                max_abs_diff: 0.0,
                at_t: a.t.first().copied().unwrap_or(0.0),
            };
            for (sa, sb) in a.samples.iter().zip(&b.samples) {
                let d = (get(sa) - get(sb)).abs();
                if d > worst.max_abs_diff {
                    worst.max_abs_diff = d;
                    worst.at_t = sa.t;
                }
            }
            worst
        })
        .collect();
    // envelope depends only on params, identical by construction
    diffs.push(ColumnDiff {
        column: "envelope",
        max_abs_diff: 0.0,
        at_t: a.t.first().copied().unwrap_or(0.0),
    });
    diffs
}

pub fn worst_column(diffs: &[ColumnDiff]) -> &ColumnDiff {
    diffs
        .iter()
        .max_by(|x, y| x.max_abs_diff.total_cmp(&y.max_abs_diff))
        .expect("non-empty column set")
}
