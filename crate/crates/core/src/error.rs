use alloc::string::String;

use thiserror::Error;

use crate::vec3::Vec3;

pub type Result<T> = core::result::Result<T, GaugeError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaugeError {
    /// A potential, generator or derivative evaluated to NaN or infinity.
    #[error("non-finite {quantity} at r = {r}, t = {t}")]
    NonFinite { quantity: &'static str, r: Vec3, t: f64 },

    /// A parameter violated its domain (e.g. a nonpositive mass).
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{0} requires at least one sample point")]
    EmptySamples(&'static str),

    #[error("grid axis `{axis}` has {points} points, at least {min} are required")]
    GridTooSmall {
        axis: &'static str,
        points: usize,
        min: usize,
    },

    #[error("operators are defined on different grids")]
    GridMismatch,

    #[error("operator of kind {0} cannot be inverted")]
    NotInvertible(&'static str),

    #[error("{method} is not supported: {reason}")]
    UnsupportedMethod { method: &'static str, reason: &'static str },

    #[error("integration needs {steps} steps, cap is {cap}")]
    StepCapExceeded { steps: u64, cap: u64 },

    #[error("t = {t} precedes the pulse onset t_on = {t_on}")]
    BeforePulseOnset { t: f64, t_on: f64 },

    /// The two potentials of a gauge comparison do not produce the same fields.
    #[error("potentials are not gauge equivalent: max |dE| = {max_de}, max |dB| = {max_db}")]
    FieldMismatch { max_de: f64, max_db: f64 },

    #[error("invariance report has no entries")]
    DegenerateReport,

    #[error("quadrature did not reach tolerance {tolerance} on [{a}, {b}] (estimate {estimate})")]
    QuadratureFailed {
        a: f64,
        b: f64,
        tolerance: f64,
        estimate: f64,
    },
}

impl GaugeError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        GaugeError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn finite(quantity: &'static str, value: f64, r: Vec3, t: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(GaugeError::NonFinite { quantity, r, t })
    }
}

pub(crate) fn finite_vec(quantity: &'static str, value: Vec3, r: Vec3, t: f64) -> Result<Vec3> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(GaugeError::NonFinite { quantity, r, t })
    }
}
