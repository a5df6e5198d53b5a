//! Shared domain types: coupler rates, input amplitudes, moment indices and
//! squeezing samples.

use num_complex::Complex64;

use crate::error::CouplerError;

/// Sign convention for the mode-2 detuning term in the classical trajectories.
///
/// `Unitary` keeps the linear exchange matrix unitary, so the total mean
/// photon number is conserved for every input. `PaperExact` reproduces the
/// commonly printed trajectory formulas verbatim; it differs from `Unitary`
/// only when `delta != 0` and both input amplitudes are nonzero, and it then
/// violates photon-number conservation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    Unitary,
    PaperExact,
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Convention::Unitary => write!(f, "unitary"),
            Convention::PaperExact => write!(f, "paper-exact"),
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = CouplerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unitary" => Ok(Convention::Unitary),
            "paper-exact" => Ok(Convention::PaperExact),
            other => Err(CouplerError::InvalidParameter(format!(
                "unknown convention `{other}` (expected unitary or paper-exact)"
            ))),
        }
    }
}

/// Physical rates of the coupler, all in one common inverse-time unit.
///
/// The cross-Kerr rate is fixed at twice the self-Kerr rate `chi` and is not
/// an independent field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerParams {
    /// Linear exchange rate between the waveguides (>= 0).
    pub kappa: f64,
    /// Self-Kerr rate; the cross-Kerr rate is `2 * chi`.
    pub chi: f64,
    /// Frequency mismatch between the two modes.
    pub delta: f64,
    /// Mode-2 detuning sign convention used by the trajectories.
    pub convention: Convention,
}

impl CouplerParams {
    pub fn new(kappa: f64, chi: f64, delta: f64) -> Result<Self, CouplerError> {
        Self::with_convention(kappa, chi, delta, Convention::Unitary)
    }

    pub fn with_convention(
        kappa: f64,
        chi: f64,
        delta: f64,
        convention: Convention,
    ) -> Result<Self, CouplerError> {
        let params = Self {
            kappa,
            chi,
            delta,
            convention,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), CouplerError> {
        if !(self.kappa.is_finite() && self.chi.is_finite() && self.delta.is_finite()) {
            return Err(CouplerError::InvalidParameter(
                "coupler rates must be finite".into(),
            ));
        }
        if self.kappa < 0.0 {
            return Err(CouplerError::InvalidParameter(format!(
                "kappa must be >= 0, got {}",
                self.kappa
            )));
        }
        Ok(())
    }

    /// Exchange rate `lambda = sqrt(kappa^2 + delta^2 / 4)`.
    pub fn lambda_rate(&self) -> f64 {
        (self.kappa * self.kappa + 0.25 * self.delta * self.delta).sqrt()
    }

    /// Cross-Kerr rate, fixed at `2 * chi`.
    pub fn cross_kerr(&self) -> f64 {
        2.0 * self.chi
    }
}

/// Coherent amplitudes of the two input modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialAmplitudes {
    pub alpha1: Complex64,
    pub alpha2: Complex64,
}

impl InitialAmplitudes {
    pub fn new(alpha1: Complex64, alpha2: Complex64) -> Result<Self, CouplerError> {
        if !(alpha1.re.is_finite()
            && alpha1.im.is_finite()
            && alpha2.re.is_finite()
            && alpha2.im.is_finite())
        {
            return Err(CouplerError::InvalidParameter(
                "input amplitudes must be finite".into(),
            ));
        }
        Ok(Self { alpha1, alpha2 })
    }

    /// Real input amplitudes, the case every figure of merit is sampled on.
    pub fn real(alpha1: f64, alpha2: f64) -> Result<Self, CouplerError> {
        Self::new(Complex64::new(alpha1, 0.0), Complex64::new(alpha2, 0.0))
    }

    /// Total mean photon number `epsilon = |alpha1|^2 + |alpha2|^2`.
    pub fn epsilon(&self) -> f64 {
        self.alpha1.norm_sqr() + self.alpha2.norm_sqr()
    }
}

/// One of the two waveguide modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    One,
    Two,
}

impl Mode {
    pub fn index(self) -> u8 {
        match self {
            Mode::One => 1,
            Mode::Two => 2,
        }
    }

    pub fn from_index(index: u8) -> Result<Self, CouplerError> {
        match index {
            1 => Ok(Mode::One),
            2 => Ok(Mode::Two),
            other => Err(CouplerError::InvalidParameter(format!(
                "mode must be 1 or 2, got {other}"
            ))),
        }
    }
}

/// Default cap on moment exponents. Binomial/factorial coefficients in the
/// commutator expansions stay exactly representable in f64 up to this order.
pub const DEFAULT_MAX_ORDER: u32 = 8;

/// Exponent quadruple addressing the normally ordered moment
/// `<A1^+^n1 A2^+^n3 A1^n2 A2^n4>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentIndex {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub n4: u32,
}

impl MomentIndex {
    pub fn new(n1: u32, n2: u32, n3: u32, n4: u32) -> Self {
        Self { n1, n2, n3, n4 }
    }

    pub fn max_component(&self) -> u32 {
        self.n1.max(self.n2).max(self.n3).max(self.n4)
    }

    pub fn check_order(&self, cap: u32) -> Result<(), CouplerError> {
        let order = self.max_component();
        if order > cap {
            return Err(CouplerError::MomentOrderTooLarge { order, cap });
        }
        Ok(())
    }

    /// Total number of annihilation operators, `n2 + n4`.
    pub fn lowering_order(&self) -> u32 {
        self.n2 + self.n4
    }

    /// Total number of creation operators, `n1 + n3`.
    pub fn raising_order(&self) -> u32 {
        self.n1 + self.n3
    }

    /// Net change of the total photon number seen by the Kerr phase,
    /// `(n2 + n4) - (n1 + n3)`.
    pub fn net_lowering(&self) -> i64 {
        self.lowering_order() as i64 - self.raising_order() as i64
    }

    /// Fixed power of the Kerr phase base attached to this moment:
    /// `n2*n4 + C(n2,2) + C(n4,2) - n1*n3 - C(n1,2) - C(n3,2)`.
    pub fn phase_exponent(&self) -> i64 {
        let c2 = |n: u32| (n as i64) * (n as i64 - 1) / 2;
        let (n1, n2, n3, n4) = (self.n1 as i64, self.n2, self.n3 as i64, self.n4);
        n2 as i64 * n4 as i64 + c2(n2) + c2(n4) - n1 * n3 - c2(self.n1) - c2(self.n3)
    }

    /// Index of the conjugate moment: swap creation and annihilation exponents.
    pub fn conjugate(&self) -> Self {
        Self::new(self.n2, self.n1, self.n4, self.n3)
    }
}

/// One time point of a squeezing series.
///
/// `raw_s`/`raw_q` are the unnormalized numerators `4*Var - |<C>|`. When
/// `|c_mean|` exceeds the normalization tolerance, `s`/`q` hold the normalized
/// factors `raw / |c_mean|` and `normalized` is true; otherwise `s`/`q` carry
/// the raw values and `normalized` is false. Negative `s` (or `q`) signals
/// squeezing in that quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingSample {
    pub t: f64,
    pub s: f64,
    pub q: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub c_mean: f64,
    pub raw_s: f64,
    pub raw_q: f64,
    pub normalized: bool,
}
