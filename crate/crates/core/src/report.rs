use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{GaugeError, Result};

/// Largest deviation of one named quantity between two gauges.
#[derive(Clone, Debug, PartialEq)]
pub struct Deviation {
    pub name: String,
    pub max_dev: f64,
}

impl Deviation {
    pub fn new(name: impl Into<String>, max_dev: f64) -> Self {
        Deviation {
            name: name.into(),
            max_dev,
        }
    }
}

/// Comparison of two gauges.
///
/// `matched` holds the quantities that must agree (fields, trajectory, kinetic
/// energy); `differed` holds the gauge-dependent ones (potential energy,
/// Hamiltonian, canonical momentum), reported for information. `pass` is true
/// iff every matched deviation is within `tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub matched: Vec<Deviation>,
    pub differed: Vec<Deviation>,
    pub tolerance: f64,
    pub pass: bool,
}

impl InvarianceReport {
    pub fn new(matched: Vec<Deviation>, differed: Vec<Deviation>, tolerance: f64) -> Result<Self> {
        if matched.is_empty() && differed.is_empty() {
            return Err(GaugeError::DegenerateReport);
        }
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(GaugeError::invalid("tolerance", "must be finite and nonnegative"));
        }
        if matched.iter().any(|m| differed.iter().any(|d| d.name == m.name)) {
            return Err(GaugeError::invalid(
                "report",
                "a quantity cannot be both matched and differed",
            ));
        }
        // NaN deviations never pass.
        let pass = matched.iter().all(|m| m.max_dev <= tolerance);
        Ok(InvarianceReport {
            matched,
            differed,
            tolerance,
            pass,
        })
    }

    pub fn matched_dev(&self, name: &str) -> Option<f64> {
        self.matched.iter().find(|d| d.name == name).map(|d| d.max_dev)
    }

    pub fn differed_dev(&self, name: &str) -> Option<f64> {
        self.differed.iter().find(|d| d.name == name).map(|d| d.max_dev)
    }
}
