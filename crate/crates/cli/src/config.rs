//! Scenario configuration: the flat key=value config grammar, figure presets
//! and the mapping onto engine requests.

use std::f64::consts::PI;
use std::str::FromStr;

use coupler_core::analysis::{Backend, CutoffChoice, SeriesRequest, TimeGrid};
use coupler_core::squeezing::QuadratureSpec;
use coupler_core::{Convention, CouplerError, CouplerParams, InitialAmplitudes, Mode};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    SingleModeNth,
    Sum,
    Difference,
}

impl std::fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MeasureKind::SingleModeNth => write!(f, "single_mode_nth"),
            MeasureKind::Sum => write!(f, "sum"),
            MeasureKind::Difference => write!(f, "difference"),
        }
    }
}

impl FromStr for MeasureKind {
    type Err = CouplerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single_mode_nth" => Ok(MeasureKind::SingleModeNth),
            "sum" => Ok(MeasureKind::Sum),
            "difference" => Ok(MeasureKind::Difference),
            other => Err(CouplerError::InvalidParameter(format!(
                "unknown measure `{other}` (expected single_mode_nth, sum or difference)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Analytic,
    Fock,
    Both,
}

impl std::fmt::Display for BackendKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BackendKind::Analytic => write!(f, "analytic"),
            BackendKind::Fock => write!(f, "fock"),
            BackendKind::Both => write!(f, "both"),
        }
    }
}

impl FromStr for BackendKind {
    type Err = CouplerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(BackendKind::Analytic),
            "fock" => Ok(BackendKind::Fock),
            "both" => Ok(BackendKind::Both),
            other => Err(CouplerError::InvalidParameter(format!(
                "unknown backend `{other}` (expected analytic, fock or both)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffKind {
    Auto,
    Fixed(usize),
}

impl std::fmt::Display for CutoffKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CutoffKind::Auto => write!(f, "auto"),
            CutoffKind::Fixed(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for CutoffKind {
    type Err = CouplerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(CutoffKind::Auto);
        }
        s.parse::<usize>().map(CutoffKind::Fixed).map_err(|_| {
            CouplerError::InvalidParameter(format!(
                "cutoff must be `auto` or a non-negative integer, got `{s}`"
            ))
        })
    }
}

/// One fully specified run: physics, measure, grid, engine and output.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kappa: f64,
    pub chi: f64,
    pub delta: f64,
    pub convention: Convention,
    pub alpha1_re: f64,
    pub alpha1_im: f64,
    pub alpha2_re: f64,
    pub alpha2_im: f64,
    pub measure: MeasureKind,
    pub mode: u8,
    pub n: u32,
    pub t_start: f64,
    pub t_stop: f64,
    pub steps: usize,
    pub backend: BackendKind,
    pub cutoff: CutoffKind,
    pub tail_tolerance: f64,
    pub normalization_tolerance: f64,
    pub output: String,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            chi: 0.5,
            delta: 0.0,
            convention: Convention::Unitary,
            alpha1_re: 1.0,
            alpha1_im: 0.0,
            alpha2_re: 0.0,
            alpha2_im: 0.0,
            measure: MeasureKind::SingleModeNth,
            mode: 1,
            n: 1,
            t_start: 0.0,
            t_stop: 4.0 * PI,
            steps: 4000,
            backend: BackendKind::Analytic,
            cutoff: CutoffKind::Auto,
            tail_tolerance: 1e-12,
            normalization_tolerance: 1e-9,
            output: "series.csv".to_string(),
        }
    }
}

pub const PRESET_NAMES: [&str; 9] = [
    "fig1a_n2",
    "fig1a_n3",
    "fig1b",
    "fig1c",
    "fig2a",
    "fig2b",
    "fig3a_small",
    "fig3a_large",
    "fig3b",
];

/// Preset scenarios. All use kappa = 1, chi = 0.5; detuned scenarios get a
/// [0, 2 pi] grid, resonant ones [0, 4 pi].
pub fn preset(name: &str) -> Result<ScenarioConfig, CouplerError> {
    let mut cfg = ScenarioConfig {
        output: format!("{name}.csv"),
        alpha1_re: 2.0,
        alpha2_re: 0.0,
        ..ScenarioConfig::default()
    };
    let detuned = |cfg: &mut ScenarioConfig| {
        cfg.delta = 50.0;
        cfg.t_stop = 2.0 * PI;
    };
    match name {
        "fig1a_n2" => cfg.n = 2,
        "fig1a_n3" => cfg.n = 3,
        "fig1b" => {
            cfg.n = 2;
            detuned(&mut cfg);
        }
        "fig1c" => {
            cfg.n = 3;
            detuned(&mut cfg);
        }
        "fig2a" | "fig2b" => {
            cfg.n = if name == "fig2a" { 2 } else { 3 };
            cfg.alpha1_re = 0.3;
            cfg.alpha2_re = 0.3;
            detuned(&mut cfg);
        }
        "fig3a_small" => {
            cfg.measure = MeasureKind::Sum;
            cfg.alpha1_re = 1.0;
            cfg.alpha2_re = 1.5;
        }
        "fig3a_large" => {
            cfg.measure = MeasureKind::Sum;
            cfg.alpha1_re = 2.0;
            cfg.alpha2_re = 3.0;
        }
        "fig3b" => {
            cfg.measure = MeasureKind::Sum;
            cfg.alpha1_re = 0.3;
            cfg.alpha2_re = 0.6;
            detuned(&mut cfg);
        }
        other => {
            return Err(CouplerError::InvalidParameter(format!(
                "unknown preset `{other}` (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    }
    Ok(cfg)
}

impl ScenarioConfig {
    /// Parse the flat `key=value` grammar: one pair per line, `#` comments,
    /// blank lines ignored, later keys override earlier ones, unknown keys
    /// rejected. Missing keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self, CouplerError> {
        let mut cfg = ScenarioConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CouplerError::InvalidParameter(format!(
                    "config line {}: expected key=value, got `{line}`",
                    lineno + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| {
                CouplerError::InvalidParameter(format!(
                    "config line {}: invalid {what} `{value}`",
                    lineno + 1
                ))
            };
            match key {
                "kappa" => cfg.kappa = value.parse().map_err(|_| bad("kappa"))?,
                "chi" => cfg.chi = value.parse().map_err(|_| bad("chi"))?,
                "delta" => cfg.delta = value.parse().map_err(|_| bad("delta"))?,
                "convention" => cfg.convention = value.parse()?,
                "alpha1_re" => cfg.alpha1_re = value.parse().map_err(|_| bad("alpha1_re"))?,
                "alpha1_im" => cfg.alpha1_im = value.parse().map_err(|_| bad("alpha1_im"))?,
                "alpha2_re" => cfg.alpha2_re = value.parse().map_err(|_| bad("alpha2_re"))?,
                "alpha2_im" => cfg.alpha2_im = value.parse().map_err(|_| bad("alpha2_im"))?,
                "measure" => cfg.measure = value.parse()?,
                "mode" => cfg.mode = value.parse().map_err(|_| bad("mode"))?,
                "n" => cfg.n = value.parse().map_err(|_| bad("n"))?,
                "t_start" => cfg.t_start = value.parse().map_err(|_| bad("t_start"))?,
                "t_stop" => cfg.t_stop = value.parse().map_err(|_| bad("t_stop"))?,
                "steps" => cfg.steps = value.parse().map_err(|_| bad("steps"))?,
                "backend" => cfg.backend = value.parse()?,
                "cutoff" => cfg.cutoff = value.parse()?,
                "tail_tolerance" => {
                    cfg.tail_tolerance = value.parse().map_err(|_| bad("tail_tolerance"))?
                }
                "normalization_tolerance" => {
                    cfg.normalization_tolerance =
                        value.parse().map_err(|_| bad("normalization_tolerance"))?
                }
                "output" => cfg.output = value.to_string(),
                other => {
                    return Err(CouplerError::InvalidParameter(format!(
                        "config line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }

    /// Serialize as the same grammar with every key present, in fixed order.
    /// `parse(serialize(cfg))` reproduces `cfg` exactly.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut push = |key: &str, value: String| {
            out.push_str(key);
            out.push('=');
            out.push_str(&value);
            out.push('\n');
        };
        push("kappa", self.kappa.to_string());
        push("chi", self.chi.to_string());
        push("delta", self.delta.to_string());
        push("convention", self.convention.to_string());
        push("alpha1_re", self.alpha1_re.to_string());
        push("alpha1_im", self.alpha1_im.to_string());
        push("alpha2_re", self.alpha2_re.to_string());
        push("alpha2_im", self.alpha2_im.to_string());
        push("measure", self.measure.to_string());
        push("mode", self.mode.to_string());
        push("n", self.n.to_string());
        push("t_start", self.t_start.to_string());
        push("t_stop", self.t_stop.to_string());
        push("steps", self.steps.to_string());
        push("backend", self.backend.to_string());
        push("cutoff", self.cutoff.to_string());
        push("tail_tolerance", self.tail_tolerance.to_string());
        push(
            "normalization_tolerance",
            self.normalization_tolerance.to_string(),
        );
        push("output", self.output.clone());
        out
    }

    pub fn validate(&self) -> Result<(), CouplerError> {
        self.params()?;
        self.initial_amplitudes()?;
        self.grid().validate()?;
        self.quadrature_spec()?.validate(coupler_core::DEFAULT_MAX_ORDER)?;
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance < 1.0) {
            return Err(CouplerError::InvalidParameter(format!(
                "tail_tolerance must lie in (0, 1), got {}",
                self.tail_tolerance
            )));
        }
        if !(self.normalization_tolerance >= 0.0 && self.normalization_tolerance.is_finite()) {
            return Err(CouplerError::InvalidParameter(format!(
                "normalization_tolerance must be finite and >= 0, got {}",
                self.normalization_tolerance
            )));
        }
        Ok(())
    }

    pub fn params(&self) -> Result<CouplerParams, CouplerError> {
        CouplerParams::with_convention(self.kappa, self.chi, self.delta, self.convention)
    }

    pub fn initial_amplitudes(&self) -> Result<InitialAmplitudes, CouplerError> {
        InitialAmplitudes::new(
            Complex64::new(self.alpha1_re, self.alpha1_im),
            Complex64::new(self.alpha2_re, self.alpha2_im),
        )
    }

    pub fn quadrature_spec(&self) -> Result<QuadratureSpec, CouplerError> {
        Ok(match self.measure {
            MeasureKind::SingleModeNth => QuadratureSpec::SingleModeNth {
                mode: Mode::from_index(self.mode)?,
                n: self.n,
            },
            MeasureKind::Sum => QuadratureSpec::Sum,
            MeasureKind::Difference => QuadratureSpec::Difference,
        })
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid {
            start: self.t_start,
            stop: self.t_stop,
            steps: self.steps,
        }
    }

    /// Engine request for one concrete (non-`both`) backend.
    pub fn request_for(&self, backend: BackendKind) -> Result<SeriesRequest, CouplerError> {
        let backend = match backend {
            BackendKind::Analytic => Backend::Analytic,
            BackendKind::Fock => Backend::Fock {
                cutoff: match self.cutoff {
                    CutoffKind::Auto => CutoffChoice::Auto,
                    CutoffKind::Fixed(n) => CutoffChoice::Fixed(n),
                },
                tail_tolerance: self.tail_tolerance,
            },
            BackendKind::Both => {
                return Err(CouplerError::InvalidParameter(
                    "request_for needs a concrete backend, not `both`".into(),
                ))
            }
        };
        Ok(SeriesRequest {
            params: self.params()?,
            init: self.initial_amplitudes()?,
            spec: self.quadrature_spec()?,
            grid: self.grid(),
            backend,
            normalization_tolerance: self.normalization_tolerance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_fields_match_figures() {
        assert_eq!(preset("fig1a_n2").unwrap().delta, 0.0);
        assert_eq!(preset("fig1a_n2").unwrap().n, 2);
        assert_eq!(preset("fig1c").unwrap().n, 3);
        assert_eq!(preset("fig1c").unwrap().delta, 50.0);
        assert_eq!(preset("fig3b").unwrap().alpha2_re, 0.6);
        assert_eq!(preset("fig3b").unwrap().measure, MeasureKind::Sum);
        assert_eq!(preset("fig2a").unwrap().alpha1_re, 0.3);
        for name in PRESET_NAMES {
            let cfg = preset(name).unwrap();
            assert_eq!(cfg.kappa, 1.0);
            assert_eq!(cfg.chi, 0.5);
            cfg.validate().unwrap();
        }
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn round_trip_is_identity_for_every_preset() {
        for name in PRESET_NAMES {
            let cfg = preset(name).unwrap();
            let text = cfg.serialize();
            let back = ScenarioConfig::parse(&text).unwrap();
            assert_eq!(cfg, back, "{name}");
            assert_eq!(text, back.serialize());
        }
    }

    #[test]
    fn parse_handles_comments_and_errors() {
        let cfg = ScenarioConfig::parse("# comment\n\nkappa=2\n chi = 0.25 \n").unwrap();
        assert_eq!(cfg.kappa, 2.0);
        assert_eq!(cfg.chi, 0.25);
        assert!(ScenarioConfig::parse("kappa").is_err());
        assert!(ScenarioConfig::parse("mystery=1").is_err());
        assert!(ScenarioConfig::parse("kappa=abc").is_err());
        assert!(ScenarioConfig::parse("measure=triple").is_err());
    }

    #[test]
    fn validate_rejects_bad_scenarios() {
        let bad = [
            ScenarioConfig { steps: 1, ..Default::default() },
            ScenarioConfig { mode: 3, ..Default::default() },
            // 2n exceeds the exponent cap
            ScenarioConfig { n: 5, ..Default::default() },
            ScenarioConfig { tail_tolerance: 0.0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }
}
