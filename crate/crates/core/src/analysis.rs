//! Series generation, envelope evaluation, revival-collapse detection and
//! parameter sweeps.

use rayon::prelude::*;

use crate::analytic::AnalyticSource;
use crate::domain::{CouplerParams, InitialAmplitudes, SqueezingSample, DEFAULT_MAX_ORDER};
use crate::error::CouplerError;
use crate::fock::{auto_cutoff, OracleEngine};
use crate::squeezing::{squeezing_factors, QuadratureSpec};

/// Envelope function `exp[-2 eps sin^2(n chi t)]`. Its minima mark collapse,
/// its maxima restored oscillation.
pub fn envelope(n: u32, chi: f64, epsilon: f64, t: f64) -> f64 {
    (-2.0 * epsilon * (n as f64 * chi * t).sin().powi(2)).exp()
}

/// All envelope-minimum times `t = (2m+1) pi / (2 n chi)` inside `[0, t_max]`.
pub fn predict_collapse_centers(n: u32, chi: f64, t_max: f64) -> Result<Vec<f64>, CouplerError> {
    if chi == 0.0 {
        return Err(CouplerError::InvalidParameter(
            "chi = 0 has a constant envelope and no collapse centers".into(),
        ));
    }
    if n == 0 {
        return Err(CouplerError::InvalidParameter("order n must be >= 1".into()));
    }
    let spacing = std::f64::consts::PI / (2.0 * n as f64 * chi.abs());
    let mut centers = Vec::new();
    let mut m = 0u32;
    loop {
        let t = (2 * m + 1) as f64 * spacing;
        if t > t_max {
            break;
        }
        centers.push(t);
        m += 1;
    }
    Ok(centers)
}

/// Which cutoff the Fock backend should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffChoice {
    /// Tail-tolerance-driven cutoff plus the measure's index headroom.
    Auto,
    Fixed(usize),
}

/// Engine selection for series generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    Analytic,
    Fock {
        cutoff: CutoffChoice,
        tail_tolerance: f64,
    },
}

/// Uniform time grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn validate(&self) -> Result<(), CouplerError> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CouplerError::InvalidParameter("grid bounds must be finite".into()));
        }
        if self.steps < 2 {
            return Err(CouplerError::InvalidParameter(format!(
                "grid needs at least 2 steps, got {}",
                self.steps
            )));
        }
        if self.stop <= self.start {
            return Err(CouplerError::InvalidParameter(format!(
                "grid stop {} must exceed start {}",
                self.stop, self.start
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let dt = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.start + dt * k as f64).collect()
    }
}

/// Everything needed to produce one squeezing time series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRequest {
    pub params: CouplerParams,
    pub init: InitialAmplitudes,
    pub spec: QuadratureSpec,
    pub grid: TimeGrid,
    pub backend: Backend,
    pub normalization_tolerance: f64,
}

/// Provenance attached to a computed series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMeta {
    pub params: CouplerParams,
    pub init: InitialAmplitudes,
    pub spec: QuadratureSpec,
    pub backend: Backend,
}

/// A squeezing series on a strictly increasing grid, one sample per point.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub t: Vec<f64>,
    pub samples: Vec<SqueezingSample>,
    pub meta: SeriesMeta,
}

impl TimeSeries {
    /// Minimum of `s` and the time where it first occurs.
    pub fn min_s(&self) -> (f64, f64) {
        let mut best = (f64::INFINITY, f64::NAN);
        for sample in &self.samples {
            if sample.s < best.0 {
                best = (sample.s, sample.t);
            }
        }
        best
    }
}

/// Oscillation order the detector windows against: the `O^2` moment of each
/// measure beats at `2 n_eff lambda`.
fn effective_order(spec: &QuadratureSpec) -> u32 {
    match spec {
        QuadratureSpec::SingleModeNth { n, .. } => *n,
        QuadratureSpec::Sum => 2,
        QuadratureSpec::Difference => 1,
    }
}

/// Fock cutoff for a request: the tail-driven cutoff plus enough headroom
/// that no moment of the measure trips the truncation guard.
pub fn resolve_cutoff(req: &SeriesRequest) -> Result<usize, CouplerError> {
    match req.backend {
        Backend::Fock {
            cutoff: CutoffChoice::Fixed(n),
            ..
        } => Ok(n),
        Backend::Fock {
            cutoff: CutoffChoice::Auto,
            tail_tolerance,
        } => Ok(auto_cutoff(req.init.epsilon(), tail_tolerance)?
            + req.spec.max_index_shift() as usize),
        Backend::Analytic => Err(CouplerError::InvalidParameter(
            "analytic backend has no cutoff".into(),
        )),
    }
}

/// Compute one series. Grid points are evaluated independently (in parallel
/// when a rayon pool is available); results land in grid order regardless of
/// scheduling, so output is deterministic for any worker count.
pub fn compute_series(req: &SeriesRequest) -> Result<TimeSeries, CouplerError> {
    req.params.validate()?;
    req.grid.validate()?;
    req.spec.validate(DEFAULT_MAX_ORDER)?;
    let points = req.grid.points();
    let samples: Vec<SqueezingSample> = match req.backend {
        Backend::Analytic => points
            .par_iter()
            .map(|&t| {
                let src = AnalyticSource::new(&req.params, &req.init, t)?;
                squeezing_factors(req.spec, &src, req.normalization_tolerance)
            })
            .collect::<Result<_, _>>()?,
        Backend::Fock { .. } => {
            let n_max = resolve_cutoff(req)?;
            let engine = OracleEngine::new(&req.params, &req.init, n_max)?;
            points
                .par_iter()
                .map(|&t| {
                    let src = engine.source_at(t)?;
                    squeezing_factors(req.spec, &src, req.normalization_tolerance)
                })
                .collect::<Result<_, _>>()?
        }
    };
    Ok(TimeSeries {
        t: points,
        samples,
        meta: SeriesMeta {
            params: req.params,
            init: req.init,
            spec: req.spec,
            backend: req.backend,
        },
    })
}

/// Detected flat stretches of a series, paired with the envelope prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseReport {
    /// Maximal runs where the windowed peak-to-peak stays below threshold,
    /// disjoint and sorted.
    pub intervals: Vec<(f64, f64)>,
    /// Midpoints of the intervals above.
    pub detected_centers: Vec<f64>,
    /// Midpoints of the oscillating gaps between consecutive intervals.
    pub revival_centers: Vec<f64>,
    /// Envelope-minimum times from [`predict_collapse_centers`]; empty when
    /// `chi = 0`.
    pub predicted_centers: Vec<f64>,
    /// Distance from each detected center to its nearest predicted center.
    pub residuals: Vec<f64>,
    /// Window used for the peak-to-peak scan, one fast period `2 pi / (2 n lambda)`.
    pub window: f64,
    pub points_per_window: f64,
    /// False when the grid resolves a fast period with fewer than 8 points;
    /// reported rather than silently accepted.
    pub grid_adequate: bool,
}

/// Default flatness threshold: 2% of the series range (positive floor so a
/// constant series counts as flat).
pub fn default_flatness_threshold(series: &TimeSeries) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for sample in &series.samples {
        lo = lo.min(sample.s);
        hi = hi.max(sample.s);
    }
    (0.02 * (hi - lo)).max(f64::MIN_POSITIVE)
}

/// Default minimum interval width: two windows.
pub fn default_min_width(series: &TimeSeries) -> f64 {
    2.0 * fast_window(series)
}

fn fast_window(series: &TimeSeries) -> f64 {
    let n_eff = effective_order(&series.meta.spec) as f64;
    let lambda = series.meta.params.lambda_rate();
    let w = std::f64::consts::PI / (n_eff * lambda);
    if w.is_finite() && w > 0.0 {
        w
    } else {
        // no oscillation at all; scan with the full span
        series.t.last().unwrap() - series.t[0]
    }
}

/// Sliding-window peak-to-peak flatness detection.
///
/// A point is flat when the peak-to-peak amplitude of `s` within one fast
/// period around it stays below `flatness_threshold`; maximal flat runs at
/// least `min_width` wide become collapse intervals. Detected centers are
/// paired with the nearest envelope-predicted center.
pub fn detect_collapse_intervals(
    series: &TimeSeries,
    flatness_threshold: f64,
    min_width: f64,
) -> Result<CollapseReport, CouplerError> {
    if series.t.is_empty() || series.samples.len() != series.t.len() {
        return Err(CouplerError::InvalidParameter(
            "series must be nonempty with one sample per grid point".into(),
        ));
    }
    if !flatness_threshold.is_finite() || flatness_threshold <= 0.0 {
        return Err(CouplerError::InvalidParameter(
            "flatness threshold must be > 0".into(),
        ));
    }
    if series.t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CouplerError::InvalidParameter(
            "series grid must be strictly increasing".into(),
        ));
    }

    let t = &series.t;
    let s: Vec<f64> = series.samples.iter().map(|x| x.s).collect();
    let n = t.len();
    let window = fast_window(series);
    let dt = (t[n - 1] - t[0]) / (n - 1) as f64;
    let points_per_window = window / dt;
    let grid_adequate = points_per_window >= 8.0;

    // windowed peak-to-peak via monotonic deques
    let mut ptp = vec![0.0; n];
    let mut max_q: std::collections::VecDeque<usize> = Default::default();
    let mut min_q: std::collections::VecDeque<usize> = Default::default();
    let (mut lo, mut hi) = (0usize, 0usize);
    for i in 0..n {
        let left = t[i] - window / 2.0;
        let right = t[i] + window / 2.0;
        while hi < n && t[hi] <= right {
            while max_q.back().is_some_and(|&j| s[j] <= s[hi]) {
                max_q.pop_back();
            }
            max_q.push_back(hi);
            while min_q.back().is_some_and(|&j| s[j] >= s[hi]) {
                min_q.pop_back();
            }
            min_q.push_back(hi);
            hi += 1;
        }
        while lo < n && t[lo] < left {
            if max_q.front() == Some(&lo) {
                max_q.pop_front();
            }
            if min_q.front() == Some(&lo) {
                min_q.pop_front();
            }
            lo += 1;
        }
        ptp[i] = s[*max_q.front().unwrap()] - s[*min_q.front().unwrap()];
    }

    let mut intervals = Vec::new();
    let mut i = 0;
    while i < n {
        if ptp[i] < flatness_threshold {
            let run_start = i;
            while i + 1 < n && ptp[i + 1] < flatness_threshold {
                i += 1;
            }
            if t[i] - t[run_start] >= min_width {
                intervals.push((t[run_start], t[i]));
            }
        }
        i += 1;
    }

    let detected_centers: Vec<f64> = intervals.iter().map(|(a, b)| 0.5 * (a + b)).collect();
    let revival_centers: Vec<f64> = intervals
        .windows(2)
        .map(|pair| 0.5 * (pair[0].1 + pair[1].0))
        .collect();
    let chi = series.meta.params.chi;
    let predicted_centers = if chi != 0.0 {
        predict_collapse_centers(effective_order(&series.meta.spec), chi, t[n - 1])?
    } else {
        Vec::new()
    };
    let residuals = if predicted_centers.is_empty() {
        Vec::new()
    } else {
        detected_centers
            .iter()
            .map(|c| {
                predicted_centers
                    .iter()
                    .map(|p| (c - p).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    };

    Ok(CollapseReport {
        intervals,
        detected_centers,
        revival_centers,
        predicted_centers,
        residuals,
        window,
        points_per_window,
        grid_adequate,
    })
}

/// Parameter axis a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Kappa,
    Chi,
    Delta,
    Alpha1,
    Alpha2,
    N,
}

impl std::str::FromStr for SweepAxis {
    type Err = CouplerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kappa" => Ok(SweepAxis::Kappa),
            "chi" => Ok(SweepAxis::Chi),
            "delta" => Ok(SweepAxis::Delta),
            "alpha1" => Ok(SweepAxis::Alpha1),
            "alpha2" => Ok(SweepAxis::Alpha2),
            "n" => Ok(SweepAxis::N),
            other => Err(CouplerError::UnknownAxis(other.to_string())),
        }
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            SweepAxis::Kappa => "kappa",
            SweepAxis::Chi => "chi",
            SweepAxis::Delta => "delta",
            SweepAxis::Alpha1 => "alpha1",
            SweepAxis::Alpha2 => "alpha2",
            SweepAxis::N => "n",
        };
        write!(f, "{name}")
    }
}

/// One sweep result: the deepest `s` over the grid and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub min_s: f64,
    pub argmin_t: f64,
}

/// Apply `axis = value` to a copy of the base request.
pub fn apply_axis(
    base: &SeriesRequest,
    axis: SweepAxis,
    value: f64,
) -> Result<SeriesRequest, CouplerError> {
    let mut req = base.clone();
    match axis {
        SweepAxis::Kappa => req.params.kappa = value,
        SweepAxis::Chi => req.params.chi = value,
        SweepAxis::Delta => req.params.delta = value,
        SweepAxis::Alpha1 => req.init = InitialAmplitudes::real(value, base.init.alpha2.re)?,
        SweepAxis::Alpha2 => req.init = InitialAmplitudes::real(base.init.alpha1.re, value)?,
        SweepAxis::N => {
            let QuadratureSpec::SingleModeNth { mode, .. } = base.spec else {
                return Err(CouplerError::InvalidParameter(
                    "axis n requires the single_mode_nth measure".into(),
                ));
            };
            if value < 1.0 || value.fract() != 0.0 {
                return Err(CouplerError::InvalidParameter(format!(
                    "axis n needs a positive integer value, got {value}"
                )));
            }
            req.spec = QuadratureSpec::SingleModeNth {
                mode,
                n: value as u32,
            };
        }
    }
    Ok(req)
}

/// Sweep one axis over the given values, in order.
pub fn sweep(
    base: &SeriesRequest,
    axis: SweepAxis,
    values: &[f64],
) -> Result<Vec<SweepPoint>, CouplerError> {
    values
        .iter()
        .map(|&value| {
            let req = apply_axis(base, axis, value)?;
            let series = compute_series(&req)?;
            let (min_s, argmin_t) = series.min_s();
            Ok(SweepPoint {
                value,
                min_s,
                argmin_t,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Mode;
    use std::f64::consts::PI;

    fn basic_request() -> SeriesRequest {
        SeriesRequest {
            params: CouplerParams::new(1.0, 0.5, 0.0).unwrap(),
            init: InitialAmplitudes::real(1.0, 0.5).unwrap(),
            spec: QuadratureSpec::SingleModeNth { mode: Mode::One, n: 1 },
            grid: TimeGrid { start: 0.0, stop: 2.0 * PI, steps: 400 },
            backend: Backend::Analytic,
            normalization_tolerance: 1e-9,
        }
    }

    #[test]
    fn envelope_values_and_period() {
        assert_eq!(envelope(2, 0.5, 4.0, 0.0), 1.0);
        // n chi t = pi/2 at the collapse floor
        let floor = envelope(2, 0.5, 4.0, PI / 2.0);
        assert!((floor - (-8.0f64).exp()).abs() < 1e-18);
        assert!((floor - 3.3546e-4).abs() < 1e-8);
        for k in 0..40 {
            let t = 0.23 * k as f64;
            let period = PI / (3.0 * 0.5);
            assert!((envelope(3, 0.5, 2.0, t) - envelope(3, 0.5, 2.0, t + period)).abs() < 1e-14);
        }
    }

    #[test]
    fn predicted_centers_examples() {
        let c = predict_collapse_centers(2, 0.5, 10.0).unwrap();
        assert_eq!(c.len(), 3);
        assert!((c[0] - PI / 2.0).abs() < 1e-14);
        assert!((c[1] - 3.0 * PI / 2.0).abs() < 1e-14);
        assert!((c[2] - 5.0 * PI / 2.0).abs() < 1e-14);

        let c = predict_collapse_centers(1, 0.5, 3.2).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0] - PI).abs() < 1e-14);
        // the single n=1 center sits at pi, just past a horizon of 3
        assert!(predict_collapse_centers(1, 0.5, 3.0).unwrap().is_empty());

        // larger n packs more centers into the same horizon
        let c2 = predict_collapse_centers(2, 0.5, 4.0).unwrap();
        let c3 = predict_collapse_centers(3, 0.5, 4.0).unwrap();
        assert!(c3.len() > c2.len());
        assert!(c3.iter().all(|&t| t <= 4.0));

        assert!(predict_collapse_centers(2, 0.0, 4.0).is_err());
    }

    #[test]
    fn grid_points_hit_endpoints() {
        let g = TimeGrid { start: 0.0, stop: 1.0, steps: 5 };
        let p = g.points();
        assert_eq!(p.len(), 5);
        assert_eq!(p[0], 0.0);
        assert!((p[4] - 1.0).abs() < 1e-15);
        assert!(TimeGrid { start: 0.0, stop: 0.0, steps: 5 }.validate().is_err());
        assert!(TimeGrid { start: 0.0, stop: 1.0, steps: 1 }.validate().is_err());
    }

    #[test]
    fn constant_series_is_one_full_interval() {
        let req = basic_request();
        let mut series = compute_series(&req).unwrap();
        for sample in &mut series.samples {
            sample.s = 0.5;
        }
        let report =
            detect_collapse_intervals(&series, 1e-6, default_min_width(&series)).unwrap();
        assert_eq!(report.intervals.len(), 1);
        assert_eq!(report.intervals[0], (series.t[0], *series.t.last().unwrap()));
    }

    #[test]
    fn synthetic_burst_yields_two_flat_intervals() {
        let req = SeriesRequest {
            params: CouplerParams::new(1.0, 0.5, 50.0).unwrap(),
            ..basic_request()
        };
        let mut series = compute_series(&SeriesRequest {
            grid: TimeGrid { start: 0.0, stop: 3.0, steps: 3000 },
            ..req
        })
        .unwrap();
        let lambda = series.meta.params.lambda_rate();
        for (i, sample) in series.samples.iter_mut().enumerate() {
            let t = series.t[i];
            sample.s = if (1.0..2.0).contains(&t) {
                (2.0 * lambda * t).sin()
            } else {
                0.0
            };
        }
        let report = detect_collapse_intervals(
            &series,
            default_flatness_threshold(&series),
            default_min_width(&series),
        )
        .unwrap();
        assert!(report.grid_adequate);
        assert_eq!(report.intervals.len(), 2, "{:?}", report.intervals);
        assert_eq!(report.revival_centers.len(), 1);
        assert!((report.revival_centers[0] - 1.5).abs() < 0.1);
    }

    #[test]
    fn coarse_grid_flagged() {
        let req = SeriesRequest {
            params: CouplerParams::new(1.0, 0.5, 50.0).unwrap(),
            grid: TimeGrid { start: 0.0, stop: 2.0 * PI, steps: 40 },
            ..basic_request()
        };
        let series = compute_series(&req).unwrap();
        let report = detect_collapse_intervals(&series, 0.01, 0.1).unwrap();
        assert!(!report.grid_adequate);
        assert!(report.points_per_window < 8.0);
    }

    #[test]
    fn sweep_chi_independence_of_difference_measure() {
        let base = SeriesRequest {
            spec: QuadratureSpec::Difference,
            init: InitialAmplitudes::real(0.3, 0.6).unwrap(),
            params: CouplerParams::new(1.0, 0.5, 50.0).unwrap(),
            grid: TimeGrid { start: 0.0, stop: 2.0 * PI, steps: 300 },
            ..basic_request()
        };
        let points = sweep(&base, SweepAxis::Chi, &[0.0, 0.7]).unwrap();
        assert!((points[0].min_s - points[1].min_s).abs() < 1e-10);
    }

    #[test]
    fn sweep_axis_errors() {
        let base = basic_request();
        assert!(matches!(
            "gamma".parse::<SweepAxis>(),
            Err(CouplerError::UnknownAxis(_))
        ));
        let sum_base = SeriesRequest { spec: QuadratureSpec::Sum, ..base.clone() };
        assert!(sweep(&sum_base, SweepAxis::N, &[1.0]).is_err());
        assert!(sweep(&base, SweepAxis::N, &[1.5]).is_err());
    }

    #[test]
    fn resolve_cutoff_adds_measure_headroom() {
        let req = SeriesRequest {
            backend: Backend::Fock { cutoff: CutoffChoice::Auto, tail_tolerance: 1e-12 },
            spec: QuadratureSpec::SingleModeNth { mode: Mode::One, n: 2 },
            init: InitialAmplitudes::real(2.0, 0.0).unwrap(),
            ..basic_request()
        };
        // auto_cutoff(4, 1e-12) = 25, plus 2n = 4 headroom
        assert_eq!(resolve_cutoff(&req).unwrap(), 29);
    }
}
