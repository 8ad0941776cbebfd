//! Spatially uniform (dipole-approximation) laser pulses.

use core::f64::consts::PI;

use crate::error::{GaugeError, Result};
use crate::gauge::GaugeGenerator;
use crate::potential::{PotentialConfiguration, SPEED_OF_LIGHT};
use crate::vec3::{Mat3, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PulseFamily {
    Zero,
    /// `A0 sin(w (t - t_on))` switched on abruptly at `t_on`.
    RectangularSinusoid,
    /// `A0 sin^2(pi (t - t_on) / (t_off - t_on)) sin(w (t - t_on))`.
    Sin2EnvelopeSinusoid,
}

impl PulseFamily {
    pub fn name(self) -> &'static str {
        match self {
            PulseFamily::Zero => "zero",
            PulseFamily::RectangularSinusoid => "rectangular-sinusoid",
            PulseFamily::Sin2EnvelopeSinusoid => "sin2-envelope-sinusoid",
        }
    }
}

/// Vector potential `A(t)` of a pulse.
///
/// `A` vanishes for `t <= t_on`. After `t_off` the field is off and `A` holds
/// its final value `A(t_off)`, which is zero whenever the pulse has no net
/// field area (always for the sin^2 envelope, for the rectangular family when
/// the support holds a whole number of half cycles).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseShape {
    family: PulseFamily,
    a0: f64,
    omega: f64,
    polarization: Vec3,
    t_on: f64,
    t_off: f64,
}

impl PulseShape {
    pub fn new(family: PulseFamily, a0: f64, omega: f64, polarization: Vec3, t_on: f64, t_off: f64) -> Result<Self> {
        if !a0.is_finite() {
            return Err(GaugeError::invalid("pulse.a0", "must be finite"));
        }
        if family != PulseFamily::Zero && !(omega.is_finite() && omega > 0.0) {
            return Err(GaugeError::invalid(
                "pulse.omega",
                "must be positive for oscillatory pulses",
            ));
        }
        if !polarization.is_finite() || libm::fabs(polarization.norm() - 1.0) > 1e-12 {
            return Err(GaugeError::invalid("pulse.polarization", "must be a unit vector"));
        }
        if !(t_on.is_finite() && t_off.is_finite() && t_off > t_on) {
            return Err(GaugeError::invalid("pulse.t_off", "support must satisfy t_on < t_off"));
        }
        Ok(PulseShape {
            family,
            a0,
            omega,
            polarization,
            t_on,
            t_off,
        })
    }

    /// No field at all; `t_on` still fixes the lower limit of phase integrals.
    pub fn zero(t_on: f64) -> Self {
        PulseShape {
            family: PulseFamily::Zero,
            a0: 0.0,
            omega: 0.0,
            polarization: Vec3::E_X,
            t_on,
            t_off: t_on + 1.0,
        }
    }

    pub fn family(&self) -> PulseFamily {
        self.family
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn polarization(&self) -> Vec3 {
        self.polarization
    }

    pub fn t_on(&self) -> f64 {
        self.t_on
    }

    pub fn t_off(&self) -> f64 {
        self.t_off
    }

    pub fn is_zero(&self) -> bool {
        self.family == PulseFamily::Zero || self.a0 == 0.0
    }

    /// Scalar profile `a(t)` with `A(t) = a(t) * polarization`, and `da/dt`.
    fn profile(&self, t: f64) -> (f64, f64) {
        if self.is_zero() || t <= self.t_on {
            return (0.0, 0.0);
        }
        let tau = t.min(self.t_off) - self.t_on;
        let inside = t < self.t_off;
        let w = self.omega;
        let (a, da) = match self.family {
            PulseFamily::Zero => (0.0, 0.0),
            PulseFamily::RectangularSinusoid => (self.a0 * libm::sin(w * tau), self.a0 * w * libm::cos(w * tau)),
            PulseFamily::Sin2EnvelopeSinusoid => {
                let k = PI / (self.t_off - self.t_on);
                let env = libm::sin(k * tau);
                let (s, c) = (libm::sin(w * tau), libm::cos(w * tau));
                (
                    self.a0 * env * env * s,
                    self.a0 * (k * libm::sin(2.0 * k * tau) * s + w * env * env * c),
                )
            }
        };
        (a, if inside { da } else { 0.0 })
    }

    pub fn vector_potential(&self, t: f64) -> Vec3 {
        self.polarization * self.profile(t).0
    }

    /// `dA/dt`.
    pub fn dt_vector_potential(&self, t: f64) -> Vec3 {
        self.polarization * self.profile(t).1
    }

    /// `E(t) = -(1/c) dA/dt`.
    pub fn electric_field(&self, t: f64) -> Vec3 {
        self.polarization * (-self.profile(t).1 / SPEED_OF_LIGHT)
    }

    /// `A(t_off)`, the vector potential left once the field is off.
    pub fn residual_vector_potential(&self) -> Vec3 {
        self.vector_potential(self.t_off)
    }

    /// Velocity gauge: `phi = 0`, `A = A(t)`.
    pub fn velocity_gauge_potential(&self) -> PotentialConfiguration {
        let (p1, p2) = (*self, *self);
        PotentialConfiguration::new(|_, _| 0.0, move |_, t| p1.vector_potential(t))
            .with_grad_phi(|_, _| Vec3::ZERO)
            .with_dt_vector(move |_, t| p2.dt_vector_potential(t))
            .with_vector_jacobian(|_, _| Mat3::ZERO)
    }

    /// Length gauge for an electron: `phi = -r . E(t)`, `A = 0`, so that the
    /// electron's potential energy is `r . E(t)`.
    pub fn length_gauge_potential(&self) -> PotentialConfiguration {
        let (p1, p2) = (*self, *self);
        PotentialConfiguration::scalar_only(move |r, t| -r.dot(p1.electric_field(t)))
            .with_grad_phi(move |_, t| -p2.electric_field(t))
    }

    /// `Lambda = -r . A(t)`, which takes the velocity gauge to the length gauge.
    pub fn length_gauge_generator(&self) -> GaugeGenerator {
        let (p1, p2, p3, p4) = (*self, *self, *self, *self);
        GaugeGenerator::new(
            move |r, t| -r.dot(p1.vector_potential(t)),
            move |_, t| -p2.vector_potential(t),
            move |r, t| -r.dot(p3.dt_vector_potential(t)),
        )
        .with_hessian(|_, _| Mat3::ZERO)
        .with_grad_dt(move |_, t| -p4.dt_vector_potential(t))
    }
}
