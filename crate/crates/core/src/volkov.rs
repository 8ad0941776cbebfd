//! Dipole-approximation Volkov states of an electron (`q = -1`) in a pulse.
//!
//! Velocity gauge: `Psi_V = C exp(i p.r - i S(t))` with
//! `S(t) = 1/2 int_{t_on}^t (p + A/c)^2`. Length gauge:
//! `Psi_L = exp(i r.A(t)/c) Psi_V`, which can also be written with the
//! electric field alone (see [`psi_length_scalar_form`]).

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{GaugeError, Result};
use crate::potential::SPEED_OF_LIGHT;
use crate::pulse::PulseShape;
use crate::quadrature::{gauss_kronrod_15, integrate, DEFAULT_ABS_TOL};
use crate::vec3::Vec3;

/// Target accuracy of the tabulated field integral `W(t) = int E`. Kept an
/// order below the 1e-9 interpolation budget because the drift phase
/// accumulates the interpolation error over the whole pulse.
pub const FIELD_TABLE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gauge {
    Velocity,
    Length,
}

impl Gauge {
    pub fn name(self) -> &'static str {
        match self {
            Gauge::Velocity => "velocity",
            Gauge::Length => "length",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseIntegral {
    pub value: f64,
    pub abs_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolkovEvaluation {
    pub p: Vec3,
    pub r: Vec3,
    pub t: f64,
    pub gauge: Gauge,
    pub value: Complex64,
    pub normalization: Complex64,
    /// Bound on the error of the phase from quadrature and interpolation.
    pub phase_error: f64,
}

impl VolkovEvaluation {
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }

    pub fn phase(&self) -> f64 {
        self.value.arg()
    }
}

fn check_onset(pulse: &PulseShape, t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(GaugeError::invalid("t", "must be finite"));
    }
    if t < pulse.t_on() {
        return Err(GaugeError::BeforePulseOnset { t, t_on: pulse.t_on() });
    }
    Ok(())
}

/// `1/2 int_a^b (p + A/c)^2` for `t_on <= a <= b`, exact on the field-free tail.
fn phase_between(p: Vec3, pulse: &PulseShape, a: f64, b: f64, tol: f64) -> Result<PhaseIntegral> {
    let integrand = |tau: f64| 0.5 * (p + pulse.vector_potential(tau) / SPEED_OF_LIGHT).norm_sq();
    if pulse.is_zero() {
        return Ok(PhaseIntegral {
            value: 0.5 * p.norm_sq() * (b - a),
            abs_error: 0.0,
        });
    }
    let split = pulse.t_off();
    let mut value = 0.0;
    let mut abs_error = 0.0;
    if a < split {
        let q = integrate(integrand, a, b.min(split), tol)?;
        value += q.value;
        abs_error += q.abs_error;
    }
    if b > split {
        let residual = pulse.residual_vector_potential();
        value += 0.5 * (p + residual / SPEED_OF_LIGHT).norm_sq() * (b - a.max(split));
    }
    Ok(PhaseIntegral { value, abs_error })
}

/// `S(t) = 1/2 int_{t_on}^t (p + A(tau)/c)^2 dtau`.
pub fn volkov_phase_velocity(p: Vec3, pulse: &PulseShape, t: f64) -> Result<PhaseIntegral> {
    check_onset(pulse, t)?;
    phase_between(p, pulse, pulse.t_on(), t, DEFAULT_ABS_TOL)
}

/// `C exp(i p.r - i S(t))`.
pub fn psi_velocity(p: Vec3, pulse: &PulseShape, r: Vec3, t: f64, c: Complex64) -> Result<VolkovEvaluation> {
    let s = volkov_phase_velocity(p, pulse, t)?;
    Ok(VolkovEvaluation {
        p,
        r,
        t,
        gauge: Gauge::Velocity,
        value: c * Complex64::cis(p.dot(r) - s.value),
        normalization: c,
        phase_error: s.abs_error,
    })
}

/// `exp(i r.A(t)/c) psi_velocity`.
pub fn psi_length(p: Vec3, pulse: &PulseShape, r: Vec3, t: f64, c: Complex64) -> Result<VolkovEvaluation> {
    let v = psi_velocity(p, pulse, r, t, c)?;
    let prefactor = Complex64::cis(r.dot(pulse.vector_potential(t)) / SPEED_OF_LIGHT);
    Ok(VolkovEvaluation {
        gauge: Gauge::Length,
        value: prefactor * v.value,
        ..v
    })
}

/// Table of `W(tau) = int_{t_on}^tau E` on a uniform grid over the pulse
/// support, interpolated by cubic Hermite pieces (the nodal slopes are `E`).
#[derive(Clone, Debug)]
pub struct FieldIntegralTable {
    pulse: PulseShape,
    step: f64,
    nodes: Vec<Vec3>,
    /// Largest interpolation error observed at interval midpoints.
    interpolation_error: f64,
}

fn integrate_field(pulse: &PulseShape, a: f64, b: f64) -> Vec3 {
    let comp = |i: usize| gauss_kronrod_15(&|tau| pulse.electric_field(tau)[i], a, b).0;
    Vec3::new(comp(0), comp(1), comp(2))
}

impl FieldIntegralTable {
    pub fn new(pulse: &PulseShape) -> Result<Self> {
        let span = pulse.t_off() - pulse.t_on();
        // Start near 16 nodes per carrier period and double until the
        // midpoint interpolation error is below tolerance.
        let per_unit = (pulse.omega() * 16.0 / (2.0 * core::f64::consts::PI)).max(1.0);
        let mut n = (libm::ceil(span * per_unit) as usize).max(8);
        loop {
            let table = Self::build(pulse, n);
            if table.interpolation_error < FIELD_TABLE_TOLERANCE || pulse.is_zero() {
                return Ok(table);
            }
            if n > 1 << 22 {
                return Err(GaugeError::QuadratureFailed {
                    a: pulse.t_on(),
                    b: pulse.t_off(),
                    tolerance: FIELD_TABLE_TOLERANCE,
                    estimate: table.interpolation_error,
                });
            }
            n *= 2;
        }
    }

    fn build(pulse: &PulseShape, n: usize) -> Self {
        let step = (pulse.t_off() - pulse.t_on()) / n as f64;
        let mut nodes = Vec::with_capacity(n + 1);
        let mut acc = Vec3::ZERO;
        nodes.push(acc);
        for k in 0..n {
            let a = pulse.t_on() + k as f64 * step;
            acc += integrate_field(pulse, a, a + step);
            nodes.push(acc);
        }
        let mut table = FieldIntegralTable {
            pulse: *pulse,
            step,
            nodes,
            interpolation_error: 0.0,
        };
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let a = table.node_time(k);
            let mid = a + 0.5 * step;
            let exact = table.nodes[k] + integrate_field(pulse, a, mid);
            worst = worst.max((table.interpolate(mid) - exact).max_abs());
        }
        table.interpolation_error = worst;
        table
    }

    fn node_time(&self, k: usize) -> f64 {
        self.pulse.t_on() + k as f64 * self.step
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn interpolation_error(&self) -> f64 {
        self.interpolation_error
    }

    /// Interpolated `W(tau)`; constant before `t_on` (zero) and after `t_off`.
    pub fn interpolate(&self, tau: f64) -> Vec3 {
        let n = self.nodes.len() - 1;
        if tau <= self.pulse.t_on() {
            return Vec3::ZERO;
        }
        if tau >= self.pulse.t_off() {
            return self.nodes[n];
        }
        let u = (tau - self.pulse.t_on()) / self.step;
        let k = (libm::floor(u) as usize).min(n - 1);
        let s = u - k as f64;
        let (w0, w1) = (self.nodes[k], self.nodes[k + 1]);
        // Slopes are E at the nodes; evaluate just inside the interval so the
        // one-sided field is used at a switch-on discontinuity.
        let eps = 1e-12 * self.step;
        let t0 = self.node_time(k);
        let m0 = self.pulse.electric_field(t0 + eps) * self.step;
        let m1 = self.pulse.electric_field(t0 + self.step - eps) * self.step;
        let (s2, s3) = (s * s, s * s * s);
        w0 * (2.0 * s3 - 3.0 * s2 + 1.0) + m0 * (s3 - 2.0 * s2 + s) + w1 * (-2.0 * s3 + 3.0 * s2) + m1 * (s3 - s2)
    }

    /// `W(t)` by direct quadrature of `E` from the nearest node (no interpolation).
    pub fn exact(&self, t: f64) -> Vec3 {
        let n = self.nodes.len() - 1;
        if t <= self.pulse.t_on() {
            return Vec3::ZERO;
        }
        if t >= self.pulse.t_off() {
            return self.nodes[n];
        }
        let k = (libm::floor((t - self.pulse.t_on()) / self.step) as usize).min(n - 1);
        self.nodes[k] + integrate_field(&self.pulse, self.node_time(k), t)
    }

    /// `1/2 int_{t_on}^t (p - W(tau))^2 dtau` with the interpolated `W`,
    /// integrated piece by piece (the integrand is a polynomial on each piece).
    fn drift_phase(&self, p: Vec3, t: f64) -> f64 {
        let f = |tau: f64| 0.5 * (p - self.interpolate(tau)).norm_sq();
        let n = self.nodes.len() - 1;
        let end = t.min(self.pulse.t_off());
        let mut total = 0.0;
        for k in 0..n {
            let a = self.node_time(k);
            if a >= end {
                break;
            }
            let b = if k == n - 1 { self.pulse.t_off() } else { a + self.step };
            total += gauss_kronrod_15(&f, a, b.min(end)).0;
        }
        if t > self.pulse.t_off() {
            total += 0.5 * (p - self.nodes[n]).norm_sq() * (t - self.pulse.t_off());
        }
        total
    }
}

/// Length-gauge wavefunction written with the electric field only:
/// phase `p.r - int r.E - 1/2 int (p - int E)^2`, all lower limits `t_on`.
pub fn psi_length_scalar_form(p: Vec3, pulse: &PulseShape, r: Vec3, t: f64, c: Complex64) -> Result<VolkovEvaluation> {
    let table = FieldIntegralTable::new(pulse)?;
    psi_length_scalar_form_with(&table, p, r, t, c)
}

/// [`psi_length_scalar_form`] reusing a prepared table.
pub fn psi_length_scalar_form_with(
    table: &FieldIntegralTable,
    p: Vec3,
    r: Vec3,
    t: f64,
    c: Complex64,
) -> Result<VolkovEvaluation> {
    let pulse = &table.pulse;
    check_onset(pulse, t)?;
    let (phase, phase_error) = if pulse.is_zero() {
        (p.dot(r) - 0.5 * p.norm_sq() * (t - pulse.t_on()), 0.0)
    } else {
        let field_term = r.dot(table.exact(t));
        let drift = table.drift_phase(p, t);
        let w_max = table.nodes.iter().map(|w| w.norm()).fold(0.0, f64::max);
        let span = t.min(pulse.t_off()) - pulse.t_on();
        let err = table.interpolation_error * (p.norm() + w_max) * span * libm::sqrt(3.0);
        (p.dot(r) - field_term - drift, err)
    };
    Ok(VolkovEvaluation {
        p,
        r,
        t,
        gauge: Gauge::Length,
        value: c * Complex64::cis(phase),
        normalization: c,
        phase_error,
    })
}

/// Space-time grid for Schrödinger residuals: a line of points
/// `x in [-extent, extent]` (with `y = z = 0`) and `nt` time levels from `t_start`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualGrid {
    pub dx: f64,
    pub dt: f64,
    pub extent: f64,
    pub t_start: f64,
    pub nt: usize,
}

impl ResidualGrid {
    pub const DEFAULT_DX: f64 = 0.05;
    pub const DEFAULT_DT: f64 = 0.005;
    pub const DEFAULT_EXTENT: f64 = 10.0;
    pub const DEFAULT_NT: usize = 201;

    /// Default steps with the time window starting a quarter of the way into the pulse.
    pub fn default_for(pulse: &PulseShape) -> Self {
        let t_start = if pulse.is_zero() {
            pulse.t_on()
        } else {
            pulse.t_on() + 0.25 * (pulse.t_off() - pulse.t_on())
        };
        ResidualGrid {
            dx: Self::DEFAULT_DX,
            dt: Self::DEFAULT_DT,
            extent: Self::DEFAULT_EXTENT,
            t_start,
            nt: Self::DEFAULT_NT,
        }
    }

    /// Same window with both steps halved.
    pub fn halved(&self) -> Self {
        ResidualGrid {
            dx: 0.5 * self.dx,
            dt: 0.5 * self.dt,
            nt: 2 * self.nt - 1,
            ..*self
        }
    }

    pub fn nx(&self) -> usize {
        libm::round(2.0 * self.extent / self.dx) as usize + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualReport {
    pub gauge: Gauge,
    pub max_residual: f64,
    pub rms_residual: f64,
    pub grid: ResidualGrid,
}

struct TimeLevel {
    phase: f64,
    a_over_c: Vec3,
    field: Vec3,
}

/// Residual `i dPsi/dt - H Psi` of the exact wavefunction of `gauge`, with
/// second-order central differences in time and space (7-point Laplacian),
/// over the interior of `grid`. `C = 1`.
pub fn schrodinger_residual(gauge: Gauge, p: Vec3, pulse: &PulseShape, grid: &ResidualGrid) -> Result<ResidualReport> {
    if !(grid.dx > 0.0 && grid.dt > 0.0 && grid.extent > 0.0) || !grid.t_start.is_finite() {
        return Err(GaugeError::invalid("grid", "steps and extent must be positive"));
    }
    let nx = grid.nx();
    if nx < 3 {
        return Err(GaugeError::GridTooSmall {
            axis: "x",
            points: nx,
            min: 3,
        });
    }
    if grid.nt < 3 {
        return Err(GaugeError::GridTooSmall {
            axis: "t",
            points: grid.nt,
            min: 3,
        });
    }
    check_onset(pulse, grid.t_start)?;

    let mut levels = Vec::with_capacity(grid.nt);
    let mut phase = volkov_phase_velocity(p, pulse, grid.t_start)?.value;
    for k in 0..grid.nt {
        let t = grid.t_start + k as f64 * grid.dt;
        if k > 0 {
            let prev = grid.t_start + (k - 1) as f64 * grid.dt;
            phase += phase_between(p, pulse, prev, t, 1e-13)?.value;
        }
        levels.push(TimeLevel {
            phase,
            a_over_c: pulse.vector_potential(t) / SPEED_OF_LIGHT,
            field: pulse.electric_field(t),
        });
    }

    let psi = |r: Vec3, lvl: &TimeLevel| -> Complex64 {
        let extra = match gauge {
            Gauge::Velocity => 0.0,
            Gauge::Length => r.dot(lvl.a_over_c),
        };
        Complex64::cis(p.dot(r) - lvl.phase + extra)
    };

    let i = Complex64::new(0.0, 1.0);
    let (h, dt) = (grid.dx, grid.dt);
    let mut max_res: f64 = 0.0;
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for k in 1..grid.nt - 1 {
        let (before, now, after) = (&levels[k - 1], &levels[k], &levels[k + 1]);
        for j in 1..nx - 1 {
            let r = Vec3::new(-grid.extent + j as f64 * h, 0.0, 0.0);
            let centre = psi(r, now);
            let mut lap = Complex64::new(0.0, 0.0);
            let mut grad = [Complex64::new(0.0, 0.0); 3];
            for (axis, g) in grad.iter_mut().enumerate() {
                let e = Vec3::axis(axis) * h;
                let (fp, fm) = (psi(r + e, now), psi(r - e, now));
                lap += (fp + fm - centre * 2.0) / (h * h);
                *g = (fp - fm) / (2.0 * h);
            }
            let h_psi = match gauge {
                Gauge::Velocity => {
                    let a = now.a_over_c;
                    let a_dot_grad = grad[0] * a.x + grad[1] * a.y + grad[2] * a.z;
                    -lap * 0.5 - i * a_dot_grad + centre * (0.5 * a.norm_sq())
                }
                Gauge::Length => -lap * 0.5 + centre * r.dot(now.field),
            };
            let dt_psi = (psi(r, after) - psi(r, before)) / (2.0 * dt);
            let res = (i * dt_psi - h_psi).norm();
            max_res = max_res.max(res);
            sum_sq += res * res;
            count += 1;
        }
    }
    Ok(ResidualReport {
        gauge,
        max_residual: max_res,
        rms_residual: libm::sqrt(sum_sq / count as f64),
        grid: *grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::PulseFamily;
    use core::f64::consts::PI;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn rect() -> PulseShape {
        PulseShape::new(
            PulseFamily::RectangularSinusoid,
            SPEED_OF_LIGHT,
            1.0,
            Vec3::E_X,
            0.0,
            4.0 * PI,
        )
        .unwrap()
    }

    #[test]
    fn free_action() {
        let s = volkov_phase_velocity(Vec3::E_Y, &PulseShape::zero(1.0), 3.0).unwrap();
        assert_eq!(s.value, 1.0);
        let s = volkov_phase_velocity(Vec3::ZERO, &PulseShape::zero(0.0), 3.0).unwrap();
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn before_onset_is_domain_error() {
        let err = volkov_phase_velocity(Vec3::ZERO, &rect(), -0.5).unwrap_err();
        assert_eq!(err, GaugeError::BeforePulseOnset { t: -0.5, t_on: 0.0 });
        assert!(psi_length(Vec3::ZERO, &rect(), Vec3::ZERO, -0.5, one()).is_err());
    }

    #[test]
    fn free_plane_wave_value() {
        // p.r = pi, S = 1  => phase pi - 1
        let p = Vec3::E_X;
        let pulse = PulseShape::zero(0.0);
        let v = psi_velocity(p, &pulse, Vec3::new(PI, 0.0, 0.0), 2.0, one()).unwrap();
        let expected = Complex64::cis(PI - 1.0);
        assert!((v.value - expected).norm() < 1e-15);
        let v = psi_velocity(
            Vec3::ZERO,
            &pulse,
            Vec3::new(1.0, 2.0, 3.0),
            7.0,
            Complex64::new(0.5, -2.0),
        )
        .unwrap();
        assert_eq!(v.value, Complex64::new(0.5, -2.0));
    }

    #[test]
    fn length_equals_velocity_without_field() {
        let pulse = PulseShape::zero(0.0);
        let p = Vec3::new(0.3, -0.2, 0.9);
        let r = Vec3::new(1.0, 2.0, -3.0);
        let v = psi_velocity(p, &pulse, r, 4.0, one()).unwrap();
        let l = psi_length(p, &pulse, r, 4.0, one()).unwrap();
        assert_eq!(v.value, l.value);
        let s = psi_length_scalar_form(p, &pulse, r, 4.0, one()).unwrap();
        let free = Complex64::cis(p.dot(r) - 0.5 * p.norm_sq() * 4.0);
        assert!((s.value - free).norm() < 1e-15);
    }

    #[test]
    fn table_meets_interpolation_target() {
        let table = FieldIntegralTable::new(&rect()).unwrap();
        assert!(table.interpolation_error() < FIELD_TABLE_TOLERANCE);
        // W = -A/c
        for t in [0.5, 3.3, 9.0, 12.5, 20.0] {
            let w = table.interpolate(t);
            let expected = -rect().vector_potential(t) / SPEED_OF_LIGHT;
            assert!((w - expected).max_abs() < 2.0 * FIELD_TABLE_TOLERANCE, "t={t}");
            assert!((table.exact(t) - expected).max_abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn residual_grid_validation() {
        let pulse = PulseShape::zero(0.0);
        let mut g = ResidualGrid::default_for(&pulse);
        g.nt = 2;
        assert!(matches!(
            schrodinger_residual(Gauge::Velocity, Vec3::ZERO, &pulse, &g),
            Err(GaugeError::GridTooSmall { axis: "t", .. })
        ));
        let g = ResidualGrid {
            extent: 0.01,
            ..ResidualGrid::default_for(&pulse)
        };
        assert!(matches!(
            schrodinger_residual(Gauge::Velocity, Vec3::ZERO, &pulse, &g),
            Err(GaugeError::GridTooSmall { axis: "x", .. })
        ));
    }

    #[test]
    fn zero_momentum_free_residual_vanishes() {
        let pulse = PulseShape::zero(0.0);
        let rep =
            schrodinger_residual(Gauge::Velocity, Vec3::ZERO, &pulse, &ResidualGrid::default_for(&pulse)).unwrap();
        assert!(rep.max_residual <= 1e-10);
    }
}
