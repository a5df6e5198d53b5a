//! Closed-form engine: classical exchange trajectories, the Kerr phase base
//! and the general normally ordered moment formula.
//!
//! Every moment of the evolved two-mode coherent state factorizes into an
//! envelope `exp[eps (z^c - 1)]`, a monomial in the classical amplitudes and
//! a fixed power of the phase base `z = exp(-2i chi t)`, where
//! `c = (n2 + n4) - (n1 + n3)`. This module evaluates that factorization
//! directly; the Fock oracle recomputes the same quantities by brute force.

use num_complex::Complex64;

use crate::domain::{
    Convention, CouplerParams, InitialAmplitudes, Mode, MomentIndex, DEFAULT_MAX_ORDER,
};
use crate::error::CouplerError;
use crate::squeezing::MomentSource;

/// Classical amplitudes of the two modes at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    pub a1bar: Complex64,
    pub a2bar: Complex64,
}

impl Trajectory {
    /// `|a1bar|^2 + |a2bar|^2`; equals `epsilon` for all t under the unitary
    /// convention.
    pub fn total_intensity(&self) -> f64 {
        self.a1bar.norm_sqr() + self.a2bar.norm_sqr()
    }
}

/// Unit-modulus Kerr phase base `z = exp(-2i chi t)`, kept as an angle so
/// integer powers are computed from `angle * k` instead of repeated complex
/// multiplication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrPhaseBase {
    angle: f64,
}

impl KerrPhaseBase {
    pub fn new(chi: f64, t: f64) -> Self {
        Self { angle: -2.0 * chi * t }
    }

    pub fn z(&self) -> Complex64 {
        self.pow(1)
    }

    pub fn pow(&self, k: i64) -> Complex64 {
        Complex64::from_polar(1.0, self.angle * k as f64)
    }
}

pub fn kerr_phase_base(chi: f64, t: f64) -> KerrPhaseBase {
    KerrPhaseBase::new(chi, t)
}

/// Classical trajectories of the linear exchange.
///
/// With `lambda = sqrt(kappa^2 + delta^2/4)` and `sk = sin(lambda t)/lambda`:
///
/// ```text
/// a1bar = alpha1 cos(lambda t) - i (alpha1 delta/2 + alpha2 kappa) sk
/// a2bar = alpha2 cos(lambda t) - i (alpha2 delta/2 + alpha1 kappa) sk   (paper-exact)
/// a2bar = alpha2 cos(lambda t) + i (alpha2 delta/2 - alpha1 kappa) sk   (unitary)
/// ```
///
/// The two conventions coincide at `delta = 0`. The degenerate limit
/// `lambda -> 0` evaluates `sk` as `t`.
pub fn classical_trajectory(params: &CouplerParams, init: &InitialAmplitudes, t: f64) -> Trajectory {
    let lambda = params.lambda_rate();
    let (cos_lt, sk) = if (lambda * t).abs() < 1e-8 {
        ((lambda * t).cos(), t)
    } else {
        ((lambda * t).cos(), (lambda * t).sin() / lambda)
    };
    let i = Complex64::i();
    let half_delta = 0.5 * params.delta;
    let a1bar = init.alpha1 * cos_lt - i * (init.alpha1 * half_delta + init.alpha2 * params.kappa) * sk;
    let a2bar = match params.convention {
        Convention::PaperExact => {
            init.alpha2 * cos_lt - i * (init.alpha2 * half_delta + init.alpha1 * params.kappa) * sk
        }
        Convention::Unitary => {
            init.alpha2 * cos_lt + i * (init.alpha2 * half_delta - init.alpha1 * params.kappa) * sk
        }
    };
    Trajectory { a1bar, a2bar }
}

fn moment_from_parts(
    eps: f64,
    traj: &Trajectory,
    phase: &KerrPhaseBase,
    idx: MomentIndex,
) -> Complex64 {
    let envelope = (eps * (phase.pow(idx.net_lowering()) - 1.0)).exp();
    let monomial = traj.a1bar.powu(idx.n2)
        * traj.a2bar.powu(idx.n4)
        * traj.a1bar.conj().powu(idx.n1)
        * traj.a2bar.conj().powu(idx.n3);
    envelope * monomial * phase.pow(idx.phase_exponent())
}

/// General normally ordered moment `<A1^+^n1 A2^+^n3 A1^n2 A2^n4>` of the
/// evolved two-mode coherent state. Rejects indices above the default
/// exponent cap; use [`AnalyticSource::with_max_order`] to raise it.
pub fn normally_ordered_moment(
    params: &CouplerParams,
    init: &InitialAmplitudes,
    t: f64,
    idx: MomentIndex,
) -> Result<Complex64, CouplerError> {
    idx.check_order(DEFAULT_MAX_ORDER)?;
    let traj = classical_trajectory(params, init, t);
    let phase = KerrPhaseBase::new(params.chi, t);
    Ok(moment_from_parts(init.epsilon(), &traj, &phase, idx))
}

/// Mean photon number `<N_mode>(t) = |a_mode(t)|^2`.
pub fn mean_photon(params: &CouplerParams, init: &InitialAmplitudes, t: f64, mode: Mode) -> f64 {
    let traj = classical_trajectory(params, init, t);
    match mode {
        Mode::One => traj.a1bar.norm_sqr(),
        Mode::Two => traj.a2bar.norm_sqr(),
    }
}

/// Moment source bound to one `(params, init, t)`, with the trajectory and
/// phase base cached.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticSource {
    eps: f64,
    traj: Trajectory,
    phase: KerrPhaseBase,
    t: f64,
    max_order: u32,
}

impl AnalyticSource {
    pub fn new(params: &CouplerParams, init: &InitialAmplitudes, t: f64) -> Result<Self, CouplerError> {
        params.validate()?;
        if !t.is_finite() {
            return Err(CouplerError::InvalidParameter("time must be finite".into()));
        }
        Ok(Self {
            eps: init.epsilon(),
            traj: classical_trajectory(params, init, t),
            phase: KerrPhaseBase::new(params.chi, t),
            t,
            max_order: DEFAULT_MAX_ORDER,
        })
    }

    pub fn with_max_order(mut self, cap: u32) -> Self {
        self.max_order = cap;
        self
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.traj
    }
}

impl MomentSource for AnalyticSource {
    fn normally_ordered_moment(&self, idx: MomentIndex) -> Result<Complex64, CouplerError> {
        idx.check_order(self.max_order)?;
        Ok(moment_from_parts(self.eps, &self.traj, &self.phase, idx))
    }

    fn mean_photon(&self, mode: Mode) -> Result<f64, CouplerError> {
        Ok(match mode {
            Mode::One => self.traj.a1bar.norm_sqr(),
            Mode::Two => self.traj.a2bar.norm_sqr(),
        })
    }

    fn time(&self) -> f64 {
        self.t
    }
}
