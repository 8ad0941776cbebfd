//! Scalar/vector potential pairs and their derivatives.

use alloc::sync::Arc;

use crate::error::{finite, finite_vec, GaugeError, Result};
use crate::vec3::{Mat3, Vec3};

/// Speed of light in atomic units.
pub const SPEED_OF_LIGHT: f64 = 137.035999;

/// Default central-difference step (bohr or a.u. of time).
pub const DEFAULT_FD_STEP: f64 = 1e-4;

pub type ScalarField = Arc<dyn Fn(Vec3, f64) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(Vec3, f64) -> Vec3 + Send + Sync>;
pub type MatrixField = Arc<dyn Fn(Vec3, f64) -> Mat3 + Send + Sync>;

/// Central difference of a scalar field along each spatial axis.
pub(crate) fn fd_gradient(f: &ScalarField, r: Vec3, t: f64, h: f64) -> Vec3 {
    let d = |i: usize| {
        let e = Vec3::axis(i) * h;
        (f(r + e, t) - f(r - e, t)) / (2.0 * h)
    };
    Vec3::new(d(0), d(1), d(2))
}

/// Central difference of a vector field in time.
pub(crate) fn fd_time_vector(f: &VectorField, r: Vec3, t: f64, h: f64) -> Vec3 {
    (f(r, t + h) - f(r, t - h)) / (2.0 * h)
}

pub(crate) fn fd_time_scalar(f: &ScalarField, r: Vec3, t: f64, h: f64) -> f64 {
    (f(r, t + h) - f(r, t - h)) / (2.0 * h)
}

/// Jacobian `J[i][j] = d f_i / d x_j` of a vector field by central differences.
pub(crate) fn fd_jacobian(f: &VectorField, r: Vec3, t: f64, h: f64) -> Mat3 {
    let col = |j: usize| {
        let e = Vec3::axis(j) * h;
        (f(r + e, t) - f(r - e, t)) / (2.0 * h)
    };
    Mat3::from_columns([col(0), col(1), col(2)])
}

/// A scalar potential `phi(r, t)` and vector potential `A(r, t)` defining one gauge.
///
/// Analytic derivatives are optional; anything not supplied is taken by
/// central differences with step [`fd_step`](Self::fd_step).
#[derive(Clone)]
pub struct PotentialConfiguration {
    phi: ScalarField,
    vector: VectorField,
    grad_phi: Option<VectorField>,
    dt_vector: Option<VectorField>,
    vector_jacobian: Option<MatrixField>,
    vector_free: bool,
    fd_step: f64,
}

impl core::fmt::Debug for PotentialConfiguration {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("PotentialConfiguration")
            .field("analytic_derivatives", &self.has_analytic_derivatives())
            .field("vector_free", &self.vector_free)
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

impl PotentialConfiguration {
    pub fn new<P, A>(phi: P, vector: A) -> Self
    where
        P: Fn(Vec3, f64) -> f64 + Send + Sync + 'static,
        A: Fn(Vec3, f64) -> Vec3 + Send + Sync + 'static,
    {
        PotentialConfiguration {
            phi: Arc::new(phi),
            vector: Arc::new(vector),
            grad_phi: None,
            dt_vector: None,
            vector_jacobian: None,
            vector_free: false,
            fd_step: DEFAULT_FD_STEP,
        }
    }

    /// A purely scalar potential (`A = 0`). Its Hamiltonian is separable.
    pub fn scalar_only<P>(phi: P) -> Self
    where
        P: Fn(Vec3, f64) -> f64 + Send + Sync + 'static,
    {
        let mut pot = Self::new(phi, |_, _| Vec3::ZERO)
            .with_dt_vector(|_, _| Vec3::ZERO)
            .with_vector_jacobian(|_, _| Mat3::ZERO);
        pot.vector_free = true;
        pot
    }

    pub fn vacuum() -> Self {
        Self::scalar_only(|_, _| 0.0).with_grad_phi(|_, _| Vec3::ZERO)
    }

    /// `phi = -E0 x`, `A = 0`: a constant field `E0 e_x` held by a scalar potential.
    pub fn constant_field_scalar(e0: f64) -> Self {
        Self::scalar_only(move |r, _| -e0 * r.x).with_grad_phi(move |_, _| Vec3::new(-e0, 0.0, 0.0))
    }

    /// `phi = 0`, `A = -e_x c E0 t`: the same constant field held by a vector potential.
    pub fn constant_field_vector(e0: f64) -> Self {
        Self::new(|_, _| 0.0, move |_, t| Vec3::E_X * (-SPEED_OF_LIGHT * e0 * t))
            .with_grad_phi(|_, _| Vec3::ZERO)
            .with_dt_vector(move |_, _| Vec3::E_X * (-SPEED_OF_LIGHT * e0))
            .with_vector_jacobian(|_, _| Mat3::ZERO)
    }

    pub fn with_grad_phi<F>(mut self, f: F) -> Self
    where
        F: Fn(Vec3, f64) -> Vec3 + Send + Sync + 'static,
    {
        self.grad_phi = Some(Arc::new(f));
        self
    }

    pub fn with_dt_vector<F>(mut self, f: F) -> Self
    where
        F: Fn(Vec3, f64) -> Vec3 + Send + Sync + 'static,
    {
        self.dt_vector = Some(Arc::new(f));
        self
    }

    /// Jacobian `J[i][j] = d A_i / d x_j`.
    pub fn with_vector_jacobian<F>(mut self, f: F) -> Self
    where
        F: Fn(Vec3, f64) -> Mat3 + Send + Sync + 'static,
    {
        self.vector_jacobian = Some(Arc::new(f));
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(GaugeError::invalid("fd_step", "must be positive and finite"));
        }
        self.fd_step = h;
        Ok(self)
    }

    /// Drops all analytic derivative suppliers, forcing finite differences.
    pub fn without_analytic_derivatives(mut self) -> Self {
        self.grad_phi = None;
        self.dt_vector = None;
        self.vector_jacobian = None;
        self
    }

    pub(crate) fn from_parts(
        phi: ScalarField,
        vector: VectorField,
        grad_phi: Option<VectorField>,
        dt_vector: Option<VectorField>,
        vector_jacobian: Option<MatrixField>,
        vector_free: bool,
        fd_step: f64,
    ) -> Self {
        PotentialConfiguration {
            phi,
            vector,
            grad_phi,
            dt_vector,
            vector_jacobian,
            vector_free,
            fd_step,
        }
    }

    pub(crate) fn phi_field(&self) -> &ScalarField {
        &self.phi
    }

    pub(crate) fn vector_field(&self) -> &VectorField {
        &self.vector
    }

    pub(crate) fn grad_phi_supplier(&self) -> Option<&VectorField> {
        self.grad_phi.as_ref()
    }

    pub(crate) fn dt_vector_supplier(&self) -> Option<&VectorField> {
        self.dt_vector.as_ref()
    }

    pub(crate) fn jacobian_supplier(&self) -> Option<&MatrixField> {
        self.vector_jacobian.as_ref()
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    /// True when every derivative used by field derivation and Hamilton's
    /// equations is supplied analytically.
    pub fn has_analytic_derivatives(&self) -> bool {
        self.grad_phi.is_some() && self.dt_vector.is_some() && self.vector_jacobian.is_some()
    }

    /// False only for potentials built without a vector potential.
    pub fn has_vector_potential(&self) -> bool {
        !self.vector_free
    }

    pub fn phi(&self, r: Vec3, t: f64) -> Result<f64> {
        finite("scalar potential", (self.phi)(r, t), r, t)
    }

    pub fn vector(&self, r: Vec3, t: f64) -> Result<Vec3> {
        finite_vec("vector potential", (self.vector)(r, t), r, t)
    }

    pub fn grad_phi(&self, r: Vec3, t: f64) -> Result<Vec3> {
        let g = match &self.grad_phi {
            Some(f) => f(r, t),
            None => fd_gradient(&self.phi, r, t, self.fd_step),
        };
        finite_vec("gradient of scalar potential", g, r, t)
    }

    pub fn dt_vector(&self, r: Vec3, t: f64) -> Result<Vec3> {
        let d = match &self.dt_vector {
            Some(f) => f(r, t),
            None => fd_time_vector(&self.vector, r, t, self.fd_step),
        };
        finite_vec("time derivative of vector potential", d, r, t)
    }

    pub fn vector_jacobian(&self, r: Vec3, t: f64) -> Result<Mat3> {
        let j = match &self.vector_jacobian {
            Some(f) => f(r, t),
            None => fd_jacobian(&self.vector, r, t, self.fd_step),
        };
        if j.is_finite() {
            Ok(j)
        } else {
            Err(GaugeError::NonFinite {
                quantity: "jacobian of vector potential",
                r,
                t,
            })
        }
    }

    /// Largest disagreement between the supplied analytic derivatives and
    /// central differences over `samples`. Zero when nothing is supplied.
    pub fn derivative_consistency(&self, samples: &[(Vec3, f64)]) -> Result<f64> {
        let h = self.fd_step;
        let mut worst: f64 = 0.0;
        for &(r, t) in samples {
            if let Some(g) = &self.grad_phi {
                let d = g(r, t) - fd_gradient(&self.phi, r, t, h);
                worst = worst.max(finite("grad phi deviation", d.max_abs(), r, t)?);
            }
            if let Some(g) = &self.dt_vector {
                let d = g(r, t) - fd_time_vector(&self.vector, r, t, h);
                worst = worst.max(finite("dA/dt deviation", d.max_abs(), r, t)?);
            }
            if let Some(g) = &self.vector_jacobian {
                let a = g(r, t);
                let b = fd_jacobian(&self.vector, r, t, h);
                for i in 0..3 {
                    let d = (a.rows[i] - b.rows[i]).max_abs();
                    worst = worst.max(finite("jacobian deviation", d, r, t)?);
                }
            }
        }
        Ok(worst)
    }
}
