//! Simulator and analysis toolkit for the codirectional Kerr nonlinear
//! coupler: two waveguide modes exchanging energy at rate `kappa` under
//! self- and cross-Kerr phase modulation (`chi`, `2 chi`) and a frequency
//! mismatch `delta`, prepared in a two-mode coherent state.
//!
//! Every observable is computable through two independent engines:
//!
//! * [`analytic`] — closed-form trajectories and the factorized normally
//!   ordered moment formula; fast enough for dense time grids and sweeps.
//! * [`fock`] — brute-force evolution in a truncated total-photon-number
//!   block basis with cached spectral decompositions; the verification
//!   oracle for everything the analytic engine produces.
//!
//! [`squeezing`] assembles nth-order single-mode, sum- and
//! difference-squeezing factors from either engine through one
//! [`squeezing::MomentSource`] contract, and [`analysis`] layers series
//! generation, envelope evaluation, revival-collapse detection and parameter
//! sweeps on top.

pub mod analysis;
pub mod analytic;
pub mod domain;
pub mod error;
pub mod fock;
pub mod squeezing;

pub use domain::{
    Convention, CouplerParams, InitialAmplitudes, Mode, MomentIndex, SqueezingSample,
    DEFAULT_MAX_ORDER,
};
pub use error::CouplerError;
