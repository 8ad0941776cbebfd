//! Trajectories and energies of the constant-field problem checked against
//! the closed-form motion in both gauges.

use gaugelab_core::classical::{
    analytic_constant_field, compare_gauges, energy_decomposition, integrate, work_done, ChargedParticle,
    IntegratorOptions, KineticStart, Method, PhaseSpaceState,
};
use gaugelab_core::gauge::{apply_gauge, GaugeGenerator};
use gaugelab_core::{PotentialConfiguration, Vec3, SPEED_OF_LIGHT};

fn rest_start() -> KineticStart {
    KineticStart {
        r: Vec3::ZERO,
        v: Vec3::ZERO,
        t: 0.0,
    }
}

fn run(pot: &PotentialConfiguration, x0: f64, v0: f64, t_end: f64, dt: f64) -> gaugelab_core::classical::Trajectory {
    let unit = ChargedParticle::unit();
    let s0 = PhaseSpaceState::from_velocity(&unit, pot, Vec3::new(x0, 0.0, 0.0), Vec3::new(v0, 0.0, 0.0), 0.0).unwrap();
    integrate(&unit, pot, s0, t_end, dt, IntegratorOptions::default()).unwrap()
}

fn max_position_error(traj: &gaugelab_core::classical::Trajectory, x0: f64, v0: f64) -> f64 {
    let unit = ChargedParticle::unit();
    traj.samples
        .iter()
        .map(|s| (s.r.x - analytic_constant_field(&unit, 1.0, x0, v0, s.t).0).abs())
        .fold(0.0, f64::max)
}

#[test]
fn scalar_gauge_matches_closed_form() {
    let traj = run(&PotentialConfiguration::constant_field_scalar(1.0), 0.0, 0.0, 2.0, 1e-3);
    let last = traj.last().unwrap();
    assert!((last.r.x - 2.0).abs() < 1e-9);
    assert!(max_position_error(&traj, 0.0, 0.0) < 1e-9);
}

#[test]
fn vector_gauge_reproduces_scalar_positions() {
    let a = run(&PotentialConfiguration::constant_field_scalar(1.0), 0.0, 0.0, 2.0, 1e-3);
    let b = run(&PotentialConfiguration::constant_field_vector(1.0), 0.0, 0.0, 2.0, 1e-3);
    let dev = a.max_paired(&b, |x, y| (x.r - y.r).norm()).unwrap();
    assert!(dev < 1e-8, "{dev}");
}

#[test]
fn energies_in_both_gauges() {
    let scalar = run(&PotentialConfiguration::constant_field_scalar(1.0), 0.0, 0.0, 3.0, 1e-3);
    let vector = run(&PotentialConfiguration::constant_field_vector(1.0), 0.0, 0.0, 3.0, 1e-3);
    for (s, v) in scalar.samples.iter().zip(&vector.samples) {
        let half_t2 = 0.5 * s.t * s.t;
        assert!((s.kinetic - half_t2).abs() < 1e-9);
        assert!((s.potential + half_t2).abs() < 1e-9);
        assert!(s.hamiltonian.abs() < 1e-9);
        assert!((v.kinetic - s.kinetic).abs() < 1e-9);
        assert_eq!(v.potential, 0.0);
        assert_eq!(v.hamiltonian, v.kinetic);
    }
}

#[test]
fn free_energies_are_constant() {
    let traj = run(&PotentialConfiguration::vacuum(), 1.0, 0.7, 4.0, 0.01);
    for s in &traj.samples {
        assert_eq!(s.kinetic, traj.samples[0].kinetic);
        assert_eq!(s.potential, traj.samples[0].potential);
    }
}

#[test]
fn compare_gauges_reports_potential_energy_gap() {
    let unit = ChargedParticle::unit();
    let cmp = compare_gauges(
        &unit,
        &PotentialConfiguration::constant_field_scalar(1.0),
        &PotentialConfiguration::constant_field_vector(1.0),
        rest_start(),
        2.0,
        1e-3,
        IntegratorOptions::default(),
        1e-8,
    )
    .unwrap();
    assert!(cmp.report.pass);
    assert!(cmp.report.matched_dev("r").unwrap() <= 1e-8);
    assert!((cmp.report.differed_dev("U").unwrap() - 2.0).abs() < 1e-9);
    // canonical momenta differ by q E0 t
    for (a, b) in cmp.first.samples.iter().zip(&cmp.second.samples) {
        assert!((a.p.x - b.p.x - a.t).abs() < 1e-8);
    }
}

#[test]
fn compare_gauges_with_itself() {
    let unit = ChargedParticle::unit();
    let pot = PotentialConfiguration::constant_field_scalar(1.0);
    let cmp = compare_gauges(
        &unit,
        &pot,
        &pot,
        rest_start(),
        1.0,
        1e-2,
        IntegratorOptions::default(),
        1e-8,
    )
    .unwrap();
    assert!(cmp.report.pass);
    for d in cmp.report.matched.iter().chain(&cmp.report.differed) {
        assert_eq!(d.max_dev, 0.0, "{}", d.name);
    }
}

#[test]
fn generated_vector_gauge_compares_equal() {
    // Vector gauge obtained from the generator Lambda = -c E0 x t rather than by hand.
    let unit = ChargedParticle::new(-2.0, 3.0).unwrap();
    let scalar = PotentialConfiguration::constant_field_scalar(0.4);
    let moved = apply_gauge(&scalar, &GaugeGenerator::product(-SPEED_OF_LIGHT * 0.4));
    let start = KineticStart {
        r: Vec3::new(1.0, -2.0, 0.5),
        v: Vec3::new(0.2, 0.1, -0.3),
        t: 0.5,
    };
    let cmp = compare_gauges(
        &unit,
        &scalar,
        &moved,
        start,
        5.0,
        1e-3,
        IntegratorOptions::default(),
        1e-8,
    )
    .unwrap();
    assert!(cmp.report.pass, "{:?}", cmp.report);
}

/// Gauge with nonlinear canonical equations for the same constant field.
fn cubic_gauge() -> PotentialConfiguration {
    let gen = GaugeGenerator::product(-SPEED_OF_LIGHT).plus(&GaugeGenerator::polynomial(
        vec![0.0, 0.0, 0.0, 0.1 * SPEED_OF_LIGHT],
        1,
    ));
    apply_gauge(&PotentialConfiguration::constant_field_scalar(1.0), &gen)
}

#[test]
fn rk4_is_fourth_order_against_closed_form() {
    let pot = cubic_gauge();
    let coarse = max_position_error(&run(&pot, 0.5, 0.3, 2.0, 1e-2), 0.5, 0.3);
    let fine = max_position_error(&run(&pot, 0.5, 0.3, 2.0, 5e-3), 0.5, 0.3);
    let ratio = coarse / fine;
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    assert!(max_position_error(&run(&pot, 0.5, 0.3, 2.0, 1e-3), 0.5, 0.3) < 1e-9);
}

#[test]
fn leapfrog_is_second_order_in_time_dependent_well() {
    let unit = ChargedParticle::unit();
    // phi = x^2/2 (1 + 0.2 sin t): no closed form, so compare against a fine rk4 run.
    let pot = PotentialConfiguration::scalar_only(|r, t| 0.5 * r.x * r.x * (1.0 + 0.2 * t.sin()))
        .with_grad_phi(|r, t| Vec3::new(r.x * (1.0 + 0.2 * t.sin()), 0.0, 0.0));
    let s0 = PhaseSpaceState::new(Vec3::E_X, Vec3::ZERO, 0.0);
    let reference = integrate(&unit, &pot, s0, 4.0, 1e-3, IntegratorOptions::default()).unwrap();
    let end = reference.last().unwrap().r.x;
    let err = |dt: f64| {
        let t = integrate(
            &unit,
            &pot,
            s0,
            4.0,
            dt,
            IntegratorOptions::with_method(Method::Leapfrog),
        )
        .unwrap();
        (t.last().unwrap().r.x - end).abs()
    };
    let ratio = err(0.02) / err(0.01);
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn work_energy_theorem_in_every_gauge() {
    let unit = ChargedParticle::unit();
    for pot in [
        PotentialConfiguration::constant_field_scalar(1.0),
        PotentialConfiguration::constant_field_vector(1.0),
        cubic_gauge(),
    ] {
        let traj = run(&pot, 0.5, 0.3, 2.0, 1e-3);
        let work = work_done(&unit, &pot, &traj).unwrap();
        let t0 = traj.samples[0].kinetic;
        for (s, w) in traj.samples.iter().zip(&work) {
            assert!(
                (s.kinetic - t0 - w).abs() < 1e-6,
                "t={} dT={} W={}",
                s.t,
                s.kinetic - t0,
                w
            );
        }
    }
}

#[test]
fn energy_decomposition_in_generated_gauge() {
    let unit = ChargedParticle::unit();
    let pot = cubic_gauge();
    let traj = run(&pot, 0.5, 0.3, 1.0, 1e-3);
    let again = energy_decomposition(&unit, &pot, &traj).unwrap();
    assert_eq!(again, traj);
    for s in &traj.samples {
        assert!((s.v.x - analytic_constant_field(&unit, 1.0, 0.5, 0.3, s.t).1).abs() < 1e-9);
        assert!(s.kinetic >= 0.0);
    }
}
