//! Hamiltonian dynamics of a charged particle under minimal coupling.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{GaugeError, Result};
use crate::fields::{check_field_invariance, derive_fields};
use crate::potential::{PotentialConfiguration, SPEED_OF_LIGHT};
use crate::report::{Deviation, InvarianceReport};
use crate::vec3::Vec3;

/// Default cap on the number of integration steps.
pub const DEFAULT_STEP_CAP: u64 = 10_000_000;
pub const DEFAULT_DT: f64 = 1e-3;
/// Default tolerance for trajectory comparisons between gauges.
pub const DEFAULT_TRAJECTORY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChargedParticle {
    q: f64,
    m: f64,
}

impl ChargedParticle {
    pub fn new(q: f64, m: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(GaugeError::invalid("particle.q", "must be finite"));
        }
        if !(m.is_finite() && m > 0.0) {
            return Err(GaugeError::invalid("particle.m", "must be positive and finite"));
        }
        Ok(ChargedParticle { q, m })
    }

    /// Unit charge and mass.
    pub fn unit() -> Self {
        ChargedParticle { q: 1.0, m: 1.0 }
    }

    /// Electron: `q = -1`, `m = 1`.
    pub fn electron() -> Self {
        ChargedParticle { q: -1.0, m: 1.0 }
    }

    pub fn charge(&self) -> f64 {
        self.q
    }

    pub fn mass(&self) -> f64 {
        self.m
    }
}

/// Position, canonical momentum and time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSpaceState {
    pub r: Vec3,
    pub p: Vec3,
    pub t: f64,
}

impl PhaseSpaceState {
    pub fn new(r: Vec3, p: Vec3, t: f64) -> Self {
        PhaseSpaceState { r, p, t }
    }

    /// State with kinetic initial data: `p = m v + q A(r, t) / c` in the gauge of `pot`.
    pub fn from_velocity(
        particle: &ChargedParticle,
        pot: &PotentialConfiguration,
        r: Vec3,
        v: Vec3,
        t: f64,
    ) -> Result<Self> {
        let a = pot.vector(r, t)?;
        Ok(PhaseSpaceState {
            r,
            p: v * particle.m + a * (particle.q / SPEED_OF_LIGHT),
            t,
        })
    }

    fn check(&self) -> Result<()> {
        if self.r.is_finite() && self.p.is_finite() && self.t.is_finite() {
            Ok(())
        } else {
            Err(GaugeError::NonFinite {
                quantity: "phase-space state",
                r: self.r,
                t: self.t,
            })
        }
    }
}

/// One trajectory record. `potential` is `U = H - T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub r: Vec3,
    pub p: Vec3,
    pub v: Vec3,
    pub kinetic: f64,
    pub potential: f64,
    pub hamiltonian: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&TrajectorySample> {
        self.samples.last()
    }

    /// Largest value of `f(a_i, b_i)` over paired samples. Errors when the
    /// time grids differ.
    pub fn max_paired<F>(&self, other: &Trajectory, mut f: F) -> Result<f64>
    where
        F: FnMut(&TrajectorySample, &TrajectorySample) -> f64,
    {
        if self.len() != other.len() || self.samples.iter().zip(&other.samples).any(|(a, b)| a.t != b.t) {
            return Err(GaugeError::invalid("trajectory", "time grids differ"));
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| f(a, b))
            .fold(0.0, f64::max))
    }
}

/// Kinetic momentum `p - q A / c`.
fn kinetic_momentum(particle: &ChargedParticle, pot: &PotentialConfiguration, s: &PhaseSpaceState) -> Result<Vec3> {
    Ok(s.p - pot.vector(s.r, s.t)? * (particle.q / SPEED_OF_LIGHT))
}

/// `H = (p - qA/c)^2 / 2m + q phi`.
pub fn hamiltonian_value(
    particle: &ChargedParticle,
    pot: &PotentialConfiguration,
    state: &PhaseSpaceState,
) -> Result<f64> {
    let k = kinetic_momentum(particle, pot, state)?;
    Ok(k.norm_sq() / (2.0 * particle.m) + particle.q * pot.phi(state.r, state.t)?)
}

/// `(dr/dt, dp/dt) = (dH/dp, -dH/dr)` for the minimal-coupling Hamiltonian.
pub fn hamilton_rhs(
    particle: &ChargedParticle,
    pot: &PotentialConfiguration,
    state: &PhaseSpaceState,
) -> Result<(Vec3, Vec3)> {
    let (q, m) = (particle.q, particle.m);
    let v = kinetic_momentum(particle, pot, state)? / m;
    let grad_phi = pot.grad_phi(state.r, state.t)?;
    // dH/dx_j = -(q/c) sum_i v_i dA_i/dx_j + q dphi/dx_j
    let dp = if pot.has_vector_potential() {
        let jac = pot.vector_jacobian(state.r, state.t)?;
        jac.transpose_mul(v) * (q / SPEED_OF_LIGHT) - grad_phi * q
    } else {
        -grad_phi * q
    };
    Ok((v, dp))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Rk4,
    /// Kick-drift-kick; only for `A = 0`.
    Leapfrog,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rk4 => "rk4",
            Method::Leapfrog => "leapfrog",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub method: Method,
    pub step_cap: u64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            method: Method::Rk4,
            step_cap: DEFAULT_STEP_CAP,
        }
    }
}

impl IntegratorOptions {
    pub fn with_method(method: Method) -> Self {
        IntegratorOptions {
            method,
            ..Default::default()
        }
    }
}

fn sample_at(
    particle: &ChargedParticle,
    pot: &PotentialConfiguration,
    s: &PhaseSpaceState,
) -> Result<TrajectorySample> {
    s.check()?;
    let k = kinetic_momentum(particle, pot, s)?;
    let kinetic = k.norm_sq() / (2.0 * particle.m);
    let hamiltonian = kinetic + particle.q * pot.phi(s.r, s.t)?;
    Ok(TrajectorySample {
        t: s.t,
        r: s.r,
        p: s.p,
        v: k / particle.m,
        kinetic,
        potential: hamiltonian - kinetic,
        hamiltonian,
    })
}

fn rk4_step(
    particle: &ChargedParticle,
    pot: &PotentialConfiguration,
    s: &PhaseSpaceState,
    h: f64,
) -> Result<PhaseSpaceState> {
    let at = |dr: Vec3, dp: Vec3, dt: f64| PhaseSpaceState::new(s.r + dr, s.p + dp, s.t + dt);
    let (k1r, k1p) = hamilton_rhs(particle, pot, s)?;
    let (k2r, k2p) = hamilton_rhs(particle, pot, &at(k1r * (h / 2.0), k1p * (h / 2.0), h / 2.0))?;
    let (k3r, k3p) = hamilton_rhs(particle, pot, &at(k2r * (h / 2.0), k2p * (h / 2.0), h / 2.0))?;
    let (k4r, k4p) = hamilton_rhs(particle, pot, &at(k3r * h, k3p * h, h))?;
    Ok(PhaseSpaceState::new(
        s.r + (k1r + k2r * 2.0 + k3r * 2.0 + k4r) * (h / 6.0),
        s.p + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0),
        s.t + h,
    ))
}

fn leapfrog_step(
    particle: &ChargedParticle,
    pot: &PotentialConfiguration,
    s: &PhaseSpaceState,
    h: f64,
) -> Result<PhaseSpaceState> {
    let force = |r: Vec3, t: f64| -> Result<Vec3> { Ok(-pot.grad_phi(r, t)? * particle.q) };
    let p_half = s.p + force(s.r, s.t)? * (h / 2.0);
    let r = s.r + p_half * (h / particle.m);
    let p = p_half + force(r, s.t + h)? * (h / 2.0);
    Ok(PhaseSpaceState::new(r, p, s.t + h))
}

/// Integrate Hamilton's equations from `state0` to `t_end`, sampling every
/// `dt`; the last step is shortened to land on `t_end`.
pub fn integrate(
    particle: &ChargedParticle,
    pot: &PotentialConfiguration,
    state0: PhaseSpaceState,
    t_end: f64,
    dt: f64,
    options: IntegratorOptions,
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(GaugeError::invalid("dt", "must be positive and finite"));
    }
    if !(t_end.is_finite() && t_end > state0.t) {
        return Err(GaugeError::invalid(
            "t_end",
            "must be finite and after the initial time",
        ));
    }
    if options.method == Method::Leapfrog && pot.has_vector_potential() {
        return Err(GaugeError::UnsupportedMethod {
            method: "leapfrog",
            reason: "the Hamiltonian is not separable when A is nonzero",
        });
    }
    let span = t_end - state0.t;
    // Tolerate rounding in span/dt so an exact multiple does not add a sliver step.
    let ratio = span / dt;
    let steps_f = libm::ceil(ratio - 1e-9 * ratio.max(1.0));
    if steps_f > options.step_cap as f64 {
        return Err(GaugeError::StepCapExceeded {
            steps: steps_f as u64,
            cap: options.step_cap,
        });
    }
    let steps = (steps_f as u64).max(1);

    let mut samples = Vec::with_capacity(steps as usize + 1);
    let mut state = state0;
    samples.push(sample_at(particle, pot, &state)?);
    for k in 1..=steps {
        let target = if k == steps { t_end } else { state0.t + k as f64 * dt };
        let h = target - state.t;
        state = match options.method {
            Method::Rk4 => rk4_step(particle, pot, &state, h)?,
            Method::Leapfrog => leapfrog_step(particle, pot, &state, h)?,
        };
        state.t = target;
        samples.push(sample_at(particle, pot, &state)?);
    }
    Ok(Trajectory { samples })
}

/// Closed-form motion in a constant field `E0` along x:
/// `x = (q E0 / 2m) t^2 + v0 t + x0`, `v = (q E0 / m) t + v0`.
pub fn analytic_constant_field(particle: &ChargedParticle, e0: f64, x0: f64, v0: f64, t: f64) -> (f64, f64) {
    let acc = particle.q * e0 / particle.m;
    (0.5 * acc * t * t + v0 * t + x0, acc * t + v0)
}

/// Recompute velocity, `T`, `U = H - T` and `H` for every sample from its
/// position, canonical momentum and time.
pub fn energy_decomposition(
    particle: &ChargedParticle,
    pot: &PotentialConfiguration,
    trajectory: &Trajectory,
) -> Result<Trajectory> {
    let samples = trajectory
        .samples
        .iter()
        .map(|s| sample_at(particle, pot, &PhaseSpaceState::new(s.r, s.p, s.t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { samples })
}

/// `q * integral E . v dt` along a trajectory by the trapezoid rule; the
/// gauge-invariant counterpart of `T(t) - T(0)`.
pub fn work_done(
    particle: &ChargedParticle,
    pot: &PotentialConfiguration,
    trajectory: &Trajectory,
) -> Result<Vec<f64>> {
    let fields = derive_fields(pot);
    let mut power = Vec::with_capacity(trajectory.len());
    for s in &trajectory.samples {
        power.push(particle.q * fields.electric(s.r, s.t)?.dot(s.v));
    }
    let mut work = vec![0.0; trajectory.len()];
    for i in 1..trajectory.len() {
        let h = trajectory.samples[i].t - trajectory.samples[i - 1].t;
        work[i] = work[i - 1] + 0.5 * h * (power[i] + power[i - 1]);
    }
    Ok(work)
}

/// Kinetic initial data shared by both gauges in a comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KineticStart {
    pub r: Vec3,
    pub v: Vec3,
    pub t: f64,
}

#[derive(Clone, Debug)]
pub struct GaugeComparison {
    pub report: InvarianceReport,
    pub first: Trajectory,
    pub second: Trajectory,
}

/// Points around the start used to verify that two potentials are gauge equivalent.
fn equivalence_samples(start: &KineticStart, t_end: f64) -> Vec<(Vec3, f64)> {
    let mut s = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            let off = -2.0 + i as f64;
            let t = start.t + (t_end - start.t) * j as f64 / 4.0;
            s.push((start.r + Vec3::new(off, 0.5 * off, -0.25 * off), t));
        }
    }
    s
}

/// Integrate the same physical start in two gauges and compare.
///
/// Matched (must agree within `tolerance`): `r`, `v`, `T`. Differed
/// (reported): `U`, `H`, canonical `p`.
#[allow(clippy::too_many_arguments)]
pub fn compare_gauges(
    particle: &ChargedParticle,
    pot1: &PotentialConfiguration,
    pot2: &PotentialConfiguration,
    start: KineticStart,
    t_end: f64,
    dt: f64,
    options: IntegratorOptions,
    tolerance: f64,
) -> Result<GaugeComparison> {
    let fields = check_field_invariance(pot1, pot2, &equivalence_samples(&start, t_end), None)?;
    if !fields.pass {
        return Err(GaugeError::FieldMismatch {
            max_de: fields.matched_dev("E").unwrap_or(f64::NAN),
            max_db: fields.matched_dev("B").unwrap_or(f64::NAN),
        });
    }
    let s1 = PhaseSpaceState::from_velocity(particle, pot1, start.r, start.v, start.t)?;
    let s2 = PhaseSpaceState::from_velocity(particle, pot2, start.r, start.v, start.t)?;
    let first = integrate(particle, pot1, s1, t_end, dt, options)?;
    let second = integrate(particle, pot2, s2, t_end, dt, options)?;

    let matched = vec![
        Deviation::new("r", first.max_paired(&second, |a, b| (a.r - b.r).norm())?),
        Deviation::new("v", first.max_paired(&second, |a, b| (a.v - b.v).norm())?),
        Deviation::new(
            "T",
            first.max_paired(&second, |a, b| libm::fabs(a.kinetic - b.kinetic))?,
        ),
    ];
    let differed = vec![
        Deviation::new(
            "U",
            first.max_paired(&second, |a, b| libm::fabs(a.potential - b.potential))?,
        ),
        Deviation::new(
            "H",
            first.max_paired(&second, |a, b| libm::fabs(a.hamiltonian - b.hamiltonian))?,
        ),
        Deviation::new("p", first.max_paired(&second, |a, b| (a.p - b.p).norm())?),
    ];
    Ok(GaugeComparison {
        report: InvarianceReport::new(matched, differed, tolerance)?,
        first,
        second,
    })
}
