//! Error type shared by all core operations.

/// Failure modes of the dynamics and diagnostics routines.
///
/// Configuration-shaped problems (bad parameters, out-of-range inputs) and
/// numerical problems (norm drift, identity violations) are distinguished so
/// that callers can map them onto different exit paths.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input or intermediate quantity was NaN or infinite.
    #[error("non-finite {quantity}: {value}")]
    NonFinite { quantity: &'static str, value: f64 },

    /// A parameter violated its documented range.
    #[error("parameter {name} = {value} out of range ({requirement})")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// Oscillator action below zero by more than the clamping tolerance.
    #[error("negative oscillator action {value} exceeds tolerance")]
    NegativeAction { value: f64 },

    /// A directly supplied stochasticity parameter disagrees with the value
    /// computed from the physical drive parameters.
    #[error("stochasticity given as {given} but drive parameters yield {computed}")]
    InconsistentStochasticity { given: f64, computed: f64 },

    /// The closed-form eigensystem path is derived for mixing angle pi/2 only.
    #[error("spectral construction requires mixing angle pi/2, got {alpha}")]
    NonResonantMixingAngle { alpha: f64 },

    /// State norm wandered away from unity during evolution.
    #[error("state norm drifted by {drift} (limit {limit})")]
    NormDrift { drift: f64, limit: f64 },

    /// An input state was not normalized to within the documented tolerance.
    #[error("state not normalized: |norm^2 - 1| = {deviation}")]
    NotNormalized { deviation: f64 },

    /// A density matrix failed hermiticity, trace, or positivity validation.
    #[error("invalid density matrix: {reason} (residual {residual})")]
    InvalidDensityMatrix {
        reason: &'static str,
        residual: f64,
    },

    /// An operation that needs data received an empty series.
    #[error("empty input series")]
    EmptySeries,

    /// Series whose lengths must match did not.
    #[error("mismatched series lengths {left} and {right}")]
    MismatchedLengths { left: usize, right: usize },

    /// Requested correlation lag does not fit in the series.
    #[error("lag {lag} out of range for series of length {len}")]
    LagOutOfRange { lag: usize, len: usize },

    /// A cross-checked analytic identity failed beyond tolerance.
    #[error("identity check failed: residual {residual} exceeds {limit}")]
    IdentityViolation { residual: f64, limit: f64 },

    /// A quantity that must be real carried a spurious imaginary part.
    #[error("imaginary residual {value} exceeds {limit}")]
    ImaginaryResidual { value: f64, limit: f64 },

    /// Ensemble statistics need a minimum number of members.
    #[error("ensemble needs at least {min} trajectories, got {got}")]
    EnsembleTooSmall { got: usize, min: usize },

    /// One-kick drift/diffusion coefficients are defined over uniformly
    /// distributed initial angles.
    #[error("one-kick coefficients require uniformly distributed initial angles")]
    NonUniformEnsembleAngles,

    /// A statistic that divides by the series variance met a constant series.
    #[error("series is constant; statistic undefined")]
    ConstantSeries,
}

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn ensure_finite(quantity: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { quantity, value })
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::ParamOutOfRange {
            name,
            value,
            requirement: "finite and > 0",
        })
    }
}

