//! Volkov phases against closed-form antiderivatives, and Schrödinger
//! residual convergence.

use std::f64::consts::PI;

use gaugelab_core::pulse::{PulseFamily, PulseShape};
use gaugelab_core::quadrature::{integrate, integrate_on_partition};
use gaugelab_core::volkov::{
    psi_length, psi_length_scalar_form, psi_velocity, schrodinger_residual, volkov_phase_velocity, Gauge, ResidualGrid,
};
use gaugelab_core::{Complex64, Vec3, SPEED_OF_LIGHT};

fn rect(a0: f64, omega: f64, t_on: f64, t_off: f64) -> PulseShape {
    PulseShape::new(PulseFamily::RectangularSinusoid, a0, omega, Vec3::E_X, t_on, t_off).unwrap()
}

/// `1/2 int_0^tau (p + a sin(w s))^2 ds` in closed form.
fn rect_action(p: f64, a: f64, w: f64, tau: f64) -> f64 {
    0.5 * (p * p * tau
        + 2.0 * p * a * (1.0 - (w * tau).cos()) / w
        + a * a * (0.5 * tau - (2.0 * w * tau).sin() / (4.0 * w)))
}

#[test]
fn phase_matches_closed_form_antiderivative() {
    let a0 = 0.8 * SPEED_OF_LIGHT;
    let pulse = rect(a0, 1.3, 2.0, 2.0 + 6.0 * PI / 1.3);
    for (p, t) in [(0.5, 3.0), (-1.2, 7.5), (2.0, 15.0), (0.0, 2.0 + 6.0 * PI / 1.3)] {
        let s = volkov_phase_velocity(Vec3::E_X * p, &pulse, t).unwrap();
        let expected = rect_action(p, 0.8, 1.3, t - 2.0);
        assert!(
            (s.value - expected).abs() < 1e-10,
            "p={p} t={t}: {} vs {expected}",
            s.value
        );
    }
}

#[test]
fn phase_grows_linearly_after_pulse() {
    // Three and a half cycles leave a residual A(t_off) = 0 only for whole half cycles;
    // use 3.25 cycles so the residual is nonzero.
    let pulse = rect(SPEED_OF_LIGHT, 1.0, 0.0, 3.25 * 2.0 * PI);
    let p = Vec3::new(0.4, 0.1, 0.0);
    let a_res = pulse.residual_vector_potential();
    assert!(a_res.norm() > 0.5);
    let slope = 0.5 * (p + a_res / SPEED_OF_LIGHT).norm_sq();
    let s1 = volkov_phase_velocity(p, &pulse, 30.0).unwrap().value;
    let s2 = volkov_phase_velocity(p, &pulse, 40.0).unwrap().value;
    assert!(((s2 - s1) / 10.0 - slope).abs() < 1e-12);

    let closed = PulseShape::new(PulseFamily::Sin2EnvelopeSinusoid, 60.0, 0.8, Vec3::E_Z, 0.0, 25.0).unwrap();
    let s1 = volkov_phase_velocity(p, &closed, 30.0).unwrap().value;
    let s2 = volkov_phase_velocity(p, &closed, 40.0).unwrap().value;
    assert!(((s2 - s1) / 10.0 - 0.5 * p.norm_sq()).abs() < 1e-12);
}

#[test]
fn doubling_quadrature_nodes_stays_within_estimate() {
    let pulse = PulseShape::new(PulseFamily::Sin2EnvelopeSinusoid, 90.0, 1.1, Vec3::E_X, 0.0, 30.0).unwrap();
    let p = Vec3::new(0.3, 0.0, -0.2);
    let f = |tau: f64| 0.5 * (p + pulse.vector_potential(tau) / SPEED_OF_LIGHT).norm_sq();
    let q = integrate(f, 0.0, 22.0, 1e-10).unwrap();
    let mut doubled = Vec::new();
    for w in q.partition.windows(2) {
        doubled.push(w[0]);
        doubled.push(0.5 * (w[0] + w[1]));
    }
    doubled.push(22.0);
    let refined = integrate_on_partition(f, &doubled);
    assert!((refined - q.value).abs() <= q.abs_error);
    assert_eq!(q.value, volkov_phase_velocity(p, &pulse, 22.0).unwrap().value);
}

#[test]
fn length_phase_differs_by_r_dot_a() {
    let pulse = rect(SPEED_OF_LIGHT, 1.0, 0.0, 4.0 * PI);
    let one = Complex64::new(1.0, 0.0);
    for k in 0..25 {
        let r = Vec3::new(-3.0 + 0.25 * k as f64, 1.0, 0.5);
        let t = 0.4 * k as f64;
        let p = Vec3::new(0.2, -0.1 * k as f64, 0.3);
        let v = psi_velocity(p, &pulse, r, t, one).unwrap();
        let l = psi_length(p, &pulse, r, t, one).unwrap();
        let ratio = l.value / v.value;
        let expected = r.dot(pulse.vector_potential(t)) / SPEED_OF_LIGHT;
        let diff = (ratio.arg() - expected).rem_euclid(2.0 * PI);
        assert!(diff.min(2.0 * PI - diff) < 1e-10);
        assert!((l.modulus() - v.modulus()).abs() < 1e-12);
    }
}

#[test]
fn scalar_form_matches_length_gauge() {
    let pulse = rect(SPEED_OF_LIGHT, 1.0, 0.0, 4.0 * PI);
    let c = Complex64::new(0.6, 0.8);
    for k in 0..20 {
        let r = Vec3::new(4.0 - 0.4 * k as f64, 0.5, -1.0);
        let t = 1.1 * k as f64;
        let p = Vec3::new(0.5 - 0.05 * k as f64, 0.2, 0.0);
        let a = psi_length(p, &pulse, r, t, c).unwrap();
        let b = psi_length_scalar_form(p, &pulse, r, t, c).unwrap();
        assert!((a.value - b.value).norm() <= 1e-8, "k={k}");
        assert!((b.modulus() - 1.0).abs() < 1e-14);
        assert!(b.phase_error < 1e-8);
    }
}

#[test]
fn residual_converges_at_second_order_in_both_gauges() {
    let pulse = rect(SPEED_OF_LIGHT, 1.0, 0.0, 4.0 * PI);
    let p = Vec3::new(1.0, 0.0, 0.0);
    let grid = ResidualGrid::default_for(&pulse);
    for gauge in [Gauge::Velocity, Gauge::Length] {
        let coarse = schrodinger_residual(gauge, p, &pulse, &grid).unwrap();
        let fine = schrodinger_residual(gauge, p, &pulse, &grid.halved()).unwrap();
        let ratio = coarse.max_residual / fine.max_residual;
        assert!((3.0..=5.0).contains(&ratio), "{gauge:?} ratio {ratio}");
        assert!(coarse.rms_residual <= coarse.max_residual);
    }
}

#[test]
fn free_residual_is_pure_truncation() {
    let pulse = PulseShape::zero(0.0);
    let grid = ResidualGrid::default_for(&pulse);
    let rep = schrodinger_residual(Gauge::Velocity, Vec3::ZERO, &pulse, &grid).unwrap();
    assert!(rep.max_residual <= 1e-10);
    // |p| = 1: the Laplacian overshoots by p^4 dx^2 / 24 while the centred
    // time difference undershoots by (p^2/2)^3 dt^2 / 6 (leading orders).
    let rep = schrodinger_residual(Gauge::Velocity, Vec3::E_X, &pulse, &grid).unwrap();
    let predicted = grid.dx.powi(2) / 24.0 - 0.125 * grid.dt.powi(2) / 6.0;
    assert!(
        (rep.max_residual - predicted).abs() < 1e-3 * predicted,
        "{} vs {predicted}",
        rep.max_residual
    );
}
