//! Gauge generators and the transformation they induce on potentials.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{finite, finite_vec, GaugeError, Result};
use crate::potential::{
    fd_gradient, fd_jacobian, fd_time_scalar, MatrixField, PotentialConfiguration, ScalarField, VectorField,
    DEFAULT_FD_STEP, SPEED_OF_LIGHT,
};
use crate::vec3::{Mat3, Vec3};

/// Generating function `Lambda(r, t)` of a gauge transformation, with its
/// first derivatives and optionally the second derivatives that keep the
/// transformed potential analytic.
#[derive(Clone)]
pub struct GaugeGenerator {
    lambda: ScalarField,
    grad_lambda: VectorField,
    dt_lambda: ScalarField,
    hessian: Option<MatrixField>,
    grad_dt_lambda: Option<VectorField>,
    spatially_constant: bool,
    fd_step: f64,
}

impl core::fmt::Debug for GaugeGenerator {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("GaugeGenerator")
            .field("second_derivatives", &self.has_second_derivatives())
            .field("spatially_constant", &self.spatially_constant)
            .finish()
    }
}

impl GaugeGenerator {
    pub fn new<L, G, D>(lambda: L, grad_lambda: G, dt_lambda: D) -> Self
    where
        L: Fn(Vec3, f64) -> f64 + Send + Sync + 'static,
        G: Fn(Vec3, f64) -> Vec3 + Send + Sync + 'static,
        D: Fn(Vec3, f64) -> f64 + Send + Sync + 'static,
    {
        GaugeGenerator {
            lambda: Arc::new(lambda),
            grad_lambda: Arc::new(grad_lambda),
            dt_lambda: Arc::new(dt_lambda),
            hessian: None,
            grad_dt_lambda: None,
            spatially_constant: false,
            fd_step: DEFAULT_FD_STEP,
        }
    }

    /// Generator given only by `Lambda`; both derivatives come from central differences.
    pub fn from_fn<L>(lambda: L) -> Self
    where
        L: Fn(Vec3, f64) -> f64 + Send + Sync + 'static,
    {
        let lambda: ScalarField = Arc::new(lambda);
        let h = DEFAULT_FD_STEP;
        let (l1, l2) = (lambda.clone(), lambda.clone());
        GaugeGenerator {
            lambda,
            grad_lambda: Arc::new(move |r, t| fd_gradient(&l1, r, t, h)),
            dt_lambda: Arc::new(move |r, t| fd_time_scalar(&l2, r, t, h)),
            hessian: None,
            grad_dt_lambda: None,
            spatially_constant: false,
            fd_step: h,
        }
    }

    /// `Hess[i][j] = d^2 Lambda / dx_i dx_j`.
    pub fn with_hessian<F>(mut self, f: F) -> Self
    where
        F: Fn(Vec3, f64) -> Mat3 + Send + Sync + 'static,
    {
        self.hessian = Some(Arc::new(f));
        self
    }

    /// `grad(d Lambda / dt)`.
    pub fn with_grad_dt<F>(mut self, f: F) -> Self
    where
        F: Fn(Vec3, f64) -> Vec3 + Send + Sync + 'static,
    {
        self.grad_dt_lambda = Some(Arc::new(f));
        self
    }

    /// `Lambda = value` everywhere: leaves every potential unchanged.
    pub fn constant(value: f64) -> Self {
        let mut g = Self::new(move |_, _| value, |_, _| Vec3::ZERO, |_, _| 0.0)
            .with_hessian(|_, _| Mat3::ZERO)
            .with_grad_dt(|_, _| Vec3::ZERO);
        g.spatially_constant = true;
        g
    }

    /// `Lambda = a x t`. With `a = -c E0` this maps the scalar constant-field
    /// gauge onto the vector one.
    pub fn product(a: f64) -> Self {
        Self::new(
            move |r, t| a * r.x * t,
            move |_, t| Vec3::new(a * t, 0.0, 0.0),
            move |r, _| a * r.x,
        )
        .with_hessian(|_, _| Mat3::ZERO)
        .with_grad_dt(move |_, _| Vec3::new(a, 0.0, 0.0))
    }

    /// `Lambda = (sum_k c_k x^k) t^n`. `n = 0` gives a time-independent generator.
    pub fn polynomial(x_coeffs: Vec<f64>, t_power: u32) -> Self {
        let coeffs: Arc<[f64]> = x_coeffs.into();
        let (c0, c1, c2, c3, c4) = (
            coeffs.clone(),
            coeffs.clone(),
            coeffs.clone(),
            coeffs.clone(),
            coeffs.clone(),
        );
        let n = t_power as i32;
        let tp = move |t: f64, k: i32| -> f64 {
            if k < 0 {
                0.0
            } else {
                libm::pow(t, k as f64)
            }
        };
        let poly = |c: &[f64], x: f64| c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck);
        let dpoly = |c: &[f64], x: f64| {
            c.iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &ck)| acc * x + k as f64 * ck)
        };
        let d2poly = |c: &[f64], x: f64| {
            c.iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (k, &ck)| acc * x + (k * (k - 1)) as f64 * ck)
        };
        let mut g = Self::new(
            move |r, t| poly(&c0, r.x) * tp(t, n),
            move |r, t| Vec3::new(dpoly(&c1, r.x) * tp(t, n), 0.0, 0.0),
            move |r, t| n as f64 * poly(&c2, r.x) * tp(t, n - 1),
        )
        .with_hessian(move |r, t| {
            let mut m = Mat3::ZERO;
            m.rows[0].x = d2poly(&c3, r.x) * tp(t, n);
            m
        })
        .with_grad_dt(move |r, t| Vec3::new(n as f64 * dpoly(&c4, r.x) * tp(t, n - 1), 0.0, 0.0));
        g.spatially_constant = coeffs.iter().skip(1).all(|&c| c == 0.0);
        g
    }

    /// `-Lambda`.
    pub fn negated(&self) -> Self {
        let (l, g, d) = (self.lambda.clone(), self.grad_lambda.clone(), self.dt_lambda.clone());
        GaugeGenerator {
            lambda: Arc::new(move |r, t| -l(r, t)),
            grad_lambda: Arc::new(move |r, t| -g(r, t)),
            dt_lambda: Arc::new(move |r, t| -d(r, t)),
            hessian: self.hessian.clone().map(|h| -> MatrixField {
                Arc::new(move |r, t| {
                    let m = h(r, t);
                    Mat3::from_rows([-m.rows[0], -m.rows[1], -m.rows[2]])
                })
            }),
            grad_dt_lambda: self
                .grad_dt_lambda
                .clone()
                .map(|f| -> VectorField { Arc::new(move |r, t| -f(r, t)) }),
            spatially_constant: self.spatially_constant,
            fd_step: self.fd_step,
        }
    }

    /// `Lambda_1 + Lambda_2`.
    pub fn plus(&self, other: &GaugeGenerator) -> Self {
        let (l1, l2) = (self.lambda.clone(), other.lambda.clone());
        let (g1, g2) = (self.grad_lambda.clone(), other.grad_lambda.clone());
        let (d1, d2) = (self.dt_lambda.clone(), other.dt_lambda.clone());
        let hessian = match (&self.hessian, &other.hessian) {
            (Some(a), Some(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Some(Arc::new(move |r, t| a(r, t) + b(r, t)) as MatrixField)
            }
            _ => None,
        };
        let grad_dt = match (&self.grad_dt_lambda, &other.grad_dt_lambda) {
            (Some(a), Some(b)) => {
                let (a, b) = (a.clone(), b.clone());
                Some(Arc::new(move |r, t| a(r, t) + b(r, t)) as VectorField)
            }
            _ => None,
        };
        GaugeGenerator {
            lambda: Arc::new(move |r, t| l1(r, t) + l2(r, t)),
            grad_lambda: Arc::new(move |r, t| g1(r, t) + g2(r, t)),
            dt_lambda: Arc::new(move |r, t| d1(r, t) + d2(r, t)),
            hessian,
            grad_dt_lambda: grad_dt,
            spatially_constant: self.spatially_constant && other.spatially_constant,
            fd_step: self.fd_step.min(other.fd_step),
        }
    }

    pub fn lambda(&self, r: Vec3, t: f64) -> Result<f64> {
        finite("gauge generator", (self.lambda)(r, t), r, t)
    }

    pub fn grad_lambda(&self, r: Vec3, t: f64) -> Result<Vec3> {
        finite_vec("gradient of gauge generator", (self.grad_lambda)(r, t), r, t)
    }

    pub fn dt_lambda(&self, r: Vec3, t: f64) -> Result<f64> {
        finite("time derivative of gauge generator", (self.dt_lambda)(r, t), r, t)
    }

    pub fn has_second_derivatives(&self) -> bool {
        self.hessian.is_some() && self.grad_dt_lambda.is_some()
    }

    /// True when `grad Lambda` vanishes identically, so the vector potential is untouched.
    pub fn is_spatially_constant(&self) -> bool {
        self.spatially_constant
    }

    /// Largest disagreement of `grad Lambda` and `dLambda/dt` with central
    /// differences of `Lambda` over `samples`.
    pub fn derivative_consistency(&self, samples: &[(Vec3, f64)]) -> Result<f64> {
        let h = self.fd_step;
        let mut worst: f64 = 0.0;
        for &(r, t) in samples {
            let dg = self.grad_lambda(r, t)? - fd_gradient(&self.lambda, r, t, h);
            let dt = self.dt_lambda(r, t)? - fd_time_scalar(&self.lambda, r, t, h);
            worst = worst.max(dg.max_abs()).max(libm::fabs(dt));
        }
        finite("generator derivative deviation", worst, Vec3::ZERO, 0.0)
    }

    fn hessian_or_fd(&self) -> MatrixField {
        match &self.hessian {
            Some(h) => h.clone(),
            None => {
                let g = self.grad_lambda.clone();
                let h = self.fd_step;
                Arc::new(move |r, t| fd_jacobian(&g, r, t, h))
            }
        }
    }

    fn grad_dt_or_fd(&self) -> VectorField {
        match &self.grad_dt_lambda {
            Some(f) => f.clone(),
            None => {
                let d = self.dt_lambda.clone();
                let h = self.fd_step;
                Arc::new(move |r, t| fd_gradient(&d, r, t, h))
            }
        }
    }
}

/// Transform potentials with generator `gen`:
/// `phi' = phi - (1/c) dLambda/dt`, `A' = A + grad Lambda`.
///
/// The result carries analytic derivatives only when `pot` does and `gen`
/// supplies its second derivatives; otherwise its derivatives fall back to
/// central differences.
pub fn apply_gauge(pot: &PotentialConfiguration, gen: &GaugeGenerator) -> PotentialConfiguration {
    let c = SPEED_OF_LIGHT;
    let (phi, dt_l) = (pot.phi_field().clone(), gen.dt_lambda.clone());
    let new_phi: ScalarField = Arc::new(move |r, t| phi(r, t) - dt_l(r, t) / c);
    let (a, grad_l) = (pot.vector_field().clone(), gen.grad_lambda.clone());
    let new_a: VectorField = Arc::new(move |r, t| a(r, t) + grad_l(r, t));

    let analytic = pot.has_analytic_derivatives() && gen.has_second_derivatives();
    let (grad_phi, dt_vector, jacobian) = if analytic {
        let grad_dt = gen.grad_dt_or_fd();
        let hess = gen.hessian_or_fd();
        let (gp, ga) = (pot.grad_phi_supplier().unwrap().clone(), grad_dt.clone());
        let grad_phi: VectorField = Arc::new(move |r, t| gp(r, t) - ga(r, t) / c);
        let da = pot.dt_vector_supplier().unwrap().clone();
        let dt_vector: VectorField = Arc::new(move |r, t| da(r, t) + grad_dt(r, t));
        let ja = pot.jacobian_supplier().unwrap().clone();
        let jacobian: MatrixField = Arc::new(move |r, t| ja(r, t) + hess(r, t));
        (Some(grad_phi), Some(dt_vector), Some(jacobian))
    } else {
        (None, None, None)
    };
    let vector_free = !pot.has_vector_potential() && gen.is_spatially_constant();
    PotentialConfiguration::from_parts(
        new_phi,
        new_a,
        grad_phi,
        dt_vector,
        jacobian,
        vector_free,
        pot.fd_step().min(gen.fd_step),
    )
}

/// Check that two potentials differ only by a gauge generator, pointwise on samples:
/// returns the largest component deviation of `(phi_2, A_2)` from `apply_gauge(pot_1, gen)`.
pub fn transformed_deviation(
    pot1: &PotentialConfiguration,
    gen: &GaugeGenerator,
    pot2: &PotentialConfiguration,
    samples: &[(Vec3, f64)],
) -> Result<f64> {
    if samples.is_empty() {
        return Err(GaugeError::EmptySamples("transformed_deviation"));
    }
    let moved = apply_gauge(pot1, gen);
    let mut worst: f64 = 0.0;
    for &(r, t) in samples {
        let dphi = libm::fabs(moved.phi(r, t)? - pot2.phi(r, t)?);
        let da = (moved.vector(r, t)? - pot2.vector(r, t)?).max_abs();
        worst = worst.max(dphi).max(da);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn grid() -> Vec<(Vec3, f64)> {
        let mut s = Vec::new();
        for i in 0..5 {
            for j in 0..4 {
                s.push((Vec3::new(-2.0 + i as f64, 0.5 * j as f64, 0.3), 0.7 * j as f64));
            }
        }
        s
    }

    #[test]
    fn product_generator_maps_scalar_to_vector_gauge() {
        let e0 = 1.0;
        let scalar = PotentialConfiguration::constant_field_scalar(e0);
        let gen = GaugeGenerator::product(-SPEED_OF_LIGHT * e0);
        let vector = PotentialConfiguration::constant_field_vector(e0);
        let dev = transformed_deviation(&scalar, &gen, &vector, &grid()).unwrap();
        assert!(dev < 1e-10, "deviation {dev}");
        let moved = apply_gauge(&scalar, &gen);
        assert!(moved.has_analytic_derivatives());
        assert!(moved.has_vector_potential());
        // phi' = 0 exactly would need c/c cancellation; it is zero to rounding.
        assert!(moved.phi(Vec3::new(3.0, 0.0, 0.0), 2.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn constant_generator_is_identity() {
        let pot = PotentialConfiguration::constant_field_scalar(0.8);
        let moved = apply_gauge(&pot, &GaugeGenerator::constant(4.2));
        for (r, t) in grid() {
            assert_eq!(moved.phi(r, t).unwrap(), pot.phi(r, t).unwrap());
            assert_eq!(moved.vector(r, t).unwrap(), pot.vector(r, t).unwrap());
        }
        assert!(!moved.has_vector_potential());
    }

    #[test]
    fn time_independent_generator_leaves_scalar_potential() {
        // Lambda = f(x) = 0.5 x^2 - x^3
        let pot = PotentialConfiguration::constant_field_scalar(1.0);
        let gen = GaugeGenerator::polynomial(vec![0.0, 0.0, 0.5, -1.0], 0);
        let moved = apply_gauge(&pot, &gen);
        for (r, t) in grid() {
            assert_eq!(moved.phi(r, t).unwrap(), pot.phi(r, t).unwrap());
            let fprime = r.x - 3.0 * r.x * r.x;
            assert!((moved.vector(r, t).unwrap() - Vec3::E_X * fprime).max_abs() < 1e-14);
        }
    }

    #[test]
    fn polynomial_derivatives_match_finite_differences() {
        let gen = GaugeGenerator::polynomial(vec![0.3, -1.0, 0.25, 0.1], 2);
        assert!(gen.derivative_consistency(&grid()).unwrap() < 1e-6);
        let p = PotentialConfiguration::vacuum();
        let moved = apply_gauge(&p, &gen);
        assert!(moved.has_analytic_derivatives());
        assert!(moved.derivative_consistency(&grid()).unwrap() < 1e-6);
    }

    #[test]
    fn numeric_generator_drops_to_finite_differences() {
        let gen = GaugeGenerator::from_fn(|r, t| libm::sin(r.x) * t);
        assert!(!gen.has_second_derivatives());
        let moved = apply_gauge(&PotentialConfiguration::vacuum(), &gen);
        assert!(!moved.has_analytic_derivatives());
        let g = gen.grad_lambda(Vec3::new(0.5, 0.0, 0.0), 2.0).unwrap();
        assert!((g.x - 2.0 * libm::cos(0.5)).abs() < 1e-7);
    }

    #[test]
    fn empty_samples_rejected() {
        let p = PotentialConfiguration::vacuum();
        let err = transformed_deviation(&p, &GaugeGenerator::constant(0.0), &p, &[]).unwrap_err();
        assert!(matches!(err, GaugeError::EmptySamples(_)));
    }
}
