//! Electric and magnetic fields derived from potentials.

use alloc::vec;

use crate::error::{GaugeError, Result};
use crate::potential::{PotentialConfiguration, SPEED_OF_LIGHT};
use crate::report::{Deviation, InvarianceReport};
use crate::vec3::Vec3;

/// Absolute tolerance for field comparisons when all derivatives are analytic.
pub const ANALYTIC_FIELD_TOLERANCE: f64 = 1e-8;

/// `E = -grad phi - (1/c) dA/dt` and `B = curl A` of a potential.
#[derive(Clone, Debug)]
pub struct EMFields {
    potential: PotentialConfiguration,
}

impl EMFields {
    pub fn electric(&self, r: Vec3, t: f64) -> Result<Vec3> {
        let grad = self.potential.grad_phi(r, t)?;
        let dt_a = self.potential.dt_vector(r, t)?;
        Ok(-grad - dt_a / SPEED_OF_LIGHT)
    }

    pub fn magnetic(&self, r: Vec3, t: f64) -> Result<Vec3> {
        Ok(self.potential.vector_jacobian(r, t)?.curl())
    }

    pub fn potential(&self) -> &PotentialConfiguration {
        &self.potential
    }
}

pub fn derive_fields(pot: &PotentialConfiguration) -> EMFields {
    EMFields { potential: pot.clone() }
}

/// Default tolerance when comparing the fields of two potentials: `1e-8` if
/// both are fully analytic, else `10 h^2` with the coarser of the two steps.
pub fn default_field_tolerance(pot1: &PotentialConfiguration, pot2: &PotentialConfiguration) -> f64 {
    if pot1.has_analytic_derivatives() && pot2.has_analytic_derivatives() {
        ANALYTIC_FIELD_TOLERANCE
    } else {
        let h = pot1.fd_step().max(pot2.fd_step());
        10.0 * h * h
    }
}

/// Compare `E` and `B` of two potentials over sample points `(r, t)`.
///
/// `tolerance = None` uses [`default_field_tolerance`].
pub fn check_field_invariance(
    pot1: &PotentialConfiguration,
    pot2: &PotentialConfiguration,
    samples: &[(Vec3, f64)],
    tolerance: Option<f64>,
) -> Result<InvarianceReport> {
    if samples.is_empty() {
        return Err(GaugeError::EmptySamples("check_field_invariance"));
    }
    let tol = tolerance.unwrap_or_else(|| default_field_tolerance(pot1, pot2));
    let (f1, f2) = (derive_fields(pot1), derive_fields(pot2));
    let (mut de, mut db) = (0.0f64, 0.0f64);
    for &(r, t) in samples {
        de = de.max((f1.electric(r, t)? - f2.electric(r, t)?).norm());
        db = db.max((f1.magnetic(r, t)? - f2.magnetic(r, t)?).norm());
    }
    InvarianceReport::new(vec![Deviation::new("E", de), Deviation::new("B", db)], vec![], tol)
}
