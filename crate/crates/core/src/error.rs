use thiserror::Error;

/// Errors shared by every engine and the analysis layer.
#[derive(Debug, Clone, Error)]
pub enum CouplerError {
    /// A domain value failed validation (non-finite field, negative rate, bad grid, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A moment index component exceeds the configured exponent cap.
    #[error("moment order {order} exceeds the exponent cap {cap}")]
    MomentOrderTooLarge { order: u32, cap: u32 },

    /// The Fock cutoff leaves too much probability mass near the levels a
    /// moment index would touch; the result would carry uncontrolled
    /// truncation bias.
    #[error(
        "fock cutoff {n_max} too small for moment index ({n1},{n2},{n3},{n4}): \
         tail mass {tail:.3e} above photon number {level} exceeds {limit:.1e}"
    )]
    CutoffTooSmall {
        n_max: usize,
        n1: u32,
        n2: u32,
        n3: u32,
        n4: u32,
        level: usize,
        tail: f64,
        limit: f64,
    },

    /// A Fock state and a block set were built with different cutoffs.
    #[error("dimension mismatch: state cutoff {state_n_max}, blocks cover {blocks_n_max}")]
    DimensionMismatch {
        state_n_max: usize,
        blocks_n_max: usize,
    },

    /// A quantity that must be real came out with a significant imaginary part,
    /// or a similar internal consistency check tripped.
    #[error("numeric guard: {0}")]
    NumericGuard(String),

    /// Unknown sweep axis name.
    #[error("unknown sweep axis: {0}")]
    UnknownAxis(String),
}
