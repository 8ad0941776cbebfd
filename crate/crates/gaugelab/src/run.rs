//! Scenario execution: compute, check, write artifacts.

use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use gaugelab_core::classical::{analytic_constant_field, compare_gauges, IntegratorOptions, KineticStart, Trajectory};
use gaugelab_core::fields::{check_field_invariance, derive_fields};
use gaugelab_core::gauge::{apply_gauge, transformed_deviation, GaugeGenerator};
use gaugelab_core::keldysh::{keldysh_gamma, ponderomotive, regime_scan, GeometricGrid};
use gaugelab_core::unitarity::{defect_convergence, DefectStudy, GridSpec};
use gaugelab_core::volkov::{
    psi_length, psi_length_scalar_form_with, psi_velocity, schrodinger_residual, FieldIntegralTable, Gauge,
    ResidualGrid, ResidualReport, VolkovEvaluation, FIELD_TABLE_TOLERANCE,
};
use gaugelab_core::{Complex64, Deviation, InvarianceReport, Vec3, SPEED_OF_LIGHT};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{
    ClassicalDemo, GaugeTransform, KeldyshMap, Scenario, UnitarityCheck, Volkov, ATOMIC_UNIT_INTENSITY_W_CM2,
};
use crate::output::{csv_num, num, object, vec_json, Cell, CsvTable, Formats, OutputDir};

/// Accepted range of coarse/fine error ratios for second-order convergence.
pub const CONVERGENCE_RANGE: (f64, f64) = (3.0, 5.0);

/// Below this the defect discrepancy is rounding noise and has no order.
pub const DISCREPANCY_FLOOR: f64 = 1e-9;

/// Allowed error of the potential-energy gap in the classical demo.
pub const ENERGY_GAP_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    pub formats: Formats,
    pub tolerance: Option<f64>,
    /// Worker threads for parallel scans; `None` lets rayon decide.
    pub threads: Option<usize>,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        RunOptions {
            out: out.into(),
            formats: Formats::default(),
            tolerance: None,
            threads: None,
        }
    }
}

/// One physics check and its outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance condition, e.g. `<= 1e-8`.
    pub bound: String,
    pub pass: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound: format!("<= {limit:e}"),
            pass: value <= limit,
        }
    }

    fn within(name: impl Into<String>, value: f64, (lo, hi): (f64, f64)) -> Self {
        Check {
            name: name.into(),
            value,
            bound: format!("in [{lo}, {hi}]"),
            pass: (lo..=hi).contains(&value),
        }
    }

    fn holds(name: impl Into<String>, value: f64, bound: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            value,
            bound: bound.into(),
            pass,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {} ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            csv_num(self.value),
            self.bound
        )
    }

    fn json(&self) -> Value {
        json!({ "name": self.name, "value": num(self.value), "bound": self.bound, "pass": self.pass })
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub kind: &'static str,
    pub checks: Vec<Check>,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// 0 if every check passed, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            2
        }
    }
}

/// Run a validated scenario, writing its artifacts under `opts.out`.
pub fn run_scenario(scenario: &Scenario, opts: &RunOptions) -> Result<RunOutcome> {
    let mut scenario = scenario.clone();
    if let Some(tol) = opts.tolerance {
        scenario.set_tolerance(tol)?;
    }
    scenario.validate()?;
    let mut out = OutputDir::create(&opts.out, opts.formats)?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("cannot start worker pool")?;

    let (checks, meta) = pool.install(|| match &scenario {
        Scenario::ClassicalDemo(c) => classical_demo(c, &mut out),
        Scenario::GaugeTransform(c) => gauge_transform(c, &mut out),
        Scenario::Volkov(c) => volkov(c, &mut out),
        Scenario::UnitarityCheck(c) => unitarity_check(c, &mut out),
        Scenario::KeldyshMap(c) => keldysh_map(c, &mut out),
    })?;

    let kind = scenario.kind().name();
    let files: Vec<Value> = out
        .written()
        .iter()
        .filter_map(|p| p.file_name())
        .map(|n| Value::String(n.to_string_lossy().into_owned()))
        .collect();
    let summary = object([
        ("kind", json!(kind)),
        ("relations", json!(relations(&scenario))),
        ("checks", Value::Array(checks.iter().map(Check::json).collect())),
        ("pass", json!(checks.iter().all(|c| c.pass))),
        ("files", Value::Array(files)),
        ("metadata", meta),
    ]);
    out.json("summary.json", &summary)?;
    Ok(RunOutcome {
        kind,
        checks,
        files: out.written().to_vec(),
    })
}

/// The relations each kind exercises, recorded in `summary.json`.
fn relations(scenario: &Scenario) -> Vec<&'static str> {
    match scenario {
        Scenario::ClassicalDemo(_) => vec![
            "H = (p - qA/c)^2/2m + q phi",
            "U = H - T",
            "scalar gauge: phi = -E0 x, A = 0",
            "vector gauge: phi' = 0, A' = -c E0 t x",
            "x(t) = x0 + v0 t + q E0 t^2/2m",
            "p - p' = q E0 t",
        ],
        Scenario::GaugeTransform(_) => vec![
            "phi' = phi - (1/c) dLambda/dt",
            "A' = A + grad Lambda",
            "E = -grad phi - (1/c) dA/dt",
            "B = curl A",
        ],
        Scenario::Volkov(_) => vec![
            "S(t) = 1/2 int_{t_on}^t (p + A/c)^2",
            "Psi_V = C exp(i (p.r - S))",
            "Psi_L = exp(i r.A/c) Psi_V",
            "Psi_L = C exp(i (p.r - int r.E - 1/2 int (p - int E)^2))",
            "i dPsi/dt = H Psi",
        ],
        Scenario::UnitarityCheck(_) => vec!["U = exp(i q Lambda/c)", "H' - U H U^-1 = -(q/c) dLambda/dt"],
        Scenario::KeldyshMap(_) => vec![
            "U_p = I/(2 omega)^2",
            "gamma = sqrt(E_B/(2 U_p))",
            "gamma = omega sqrt(2 E_B)/sqrt(I)",
        ],
    }
}

fn trajectory_csv(traj: &Trajectory, every: usize) -> CsvTable {
    let mut t = CsvTable::new(&["t", "x", "y", "z", "px", "py", "pz", "vx", "vy", "vz", "T", "U", "H"]);
    let last = traj.len().saturating_sub(1);
    for (k, s) in traj.samples.iter().enumerate() {
        if k % every == 0 || k == last {
            t.push_nums(&[
                s.t,
                s.r.x,
                s.r.y,
                s.r.z,
                s.p.x,
                s.p.y,
                s.p.z,
                s.v.x,
                s.v.y,
                s.v.z,
                s.kinetic,
                s.potential,
                s.hamiltonian,
            ]);
        }
    }
    t
}

fn classical_demo(c: &ClassicalDemo, out: &mut OutputDir) -> Result<(Vec<Check>, Value)> {
    use gaugelab_core::PotentialConfiguration;

    let particle = c.particle.build()?;
    let scalar = PotentialConfiguration::constant_field_scalar(c.e0);
    let vector = PotentialConfiguration::constant_field_vector(c.e0);
    let start = KineticStart {
        r: Vec3::from(c.initial.x),
        v: Vec3::from(c.initial.v),
        t: c.initial.t,
    };
    let options = IntegratorOptions::with_method(c.integrator.method.into());
    let cmp = compare_gauges(
        &particle,
        &scalar,
        &vector,
        start,
        c.integrator.t_end,
        c.integrator.dt,
        options,
        c.tolerance,
    )
    .map_err(|e| anyhow!("integrator.method: {e}"))?;

    let q = particle.charge();
    let oracle = |t: f64| {
        let tau = t - start.t;
        let (x, _) = analytic_constant_field(&particle, c.e0, start.r.x, start.v.x, tau);
        Vec3::new(x, start.r.y + start.v.y * tau, start.r.z + start.v.z * tau)
    };
    let (first, second) = (&cmp.first.samples, &cmp.second.samples);
    let oracle_err = first.iter().map(|s| (s.r - oracle(s.t)).norm()).fold(0.0, f64::max);
    let e0_total = first[0].kinetic + first[0].potential;
    let drift = first
        .iter()
        .map(|s| (s.kinetic + s.potential - e0_total).abs())
        .fold(0.0, f64::max);
    let h_minus_t = second
        .iter()
        .map(|s| (s.hamiltonian - s.kinetic).abs())
        .fold(0.0, f64::max);
    let (a, b) = (first.last().unwrap(), second.last().unwrap());
    let gap = a.potential - b.potential;
    let predicted_gap = -q * c.e0 * oracle(a.t).x;
    let p_gap = first
        .iter()
        .zip(second)
        .map(|(s1, s2)| (s1.p.x - s2.p.x - q * c.e0 * s1.t).abs())
        .fold(0.0, f64::max);

    let matched = cmp.report.matched.iter().map(|d| d.max_dev).fold(0.0, f64::max);
    let checks = vec![
        Check::holds(
            "observables r, v, T agree between gauges",
            matched,
            format!("<= {:e}", c.tolerance),
            cmp.report.pass,
        ),
        Check::at_most("trajectory matches the closed form", oracle_err, c.tolerance),
        Check::at_most("scalar gauge T + U is conserved", drift, c.tolerance),
        Check::at_most("vector gauge H' - T' vanishes", h_minus_t, c.tolerance),
        Check::at_most(
            "U - U' at t_end equals -q E0 x(t_end)",
            (gap - predicted_gap).abs(),
            ENERGY_GAP_TOLERANCE,
        ),
        Check::at_most("p - p' equals q E0 t", p_gap, c.tolerance),
    ];

    let every = c.integrator.sample_every;
    out.csv("trajectory_scalar.csv", &trajectory_csv(&cmp.first, every))?;
    out.csv("trajectory_vector.csv", &trajectory_csv(&cmp.second, every))?;
    out.report("invariance_report.json", &cmp.report)?;
    let meta = object([
        ("gauges", json!(["scalar", "vector"])),
        ("method", json!(options.method.name())),
        ("dt", num(c.integrator.dt)),
        ("t_end", num(c.integrator.t_end)),
        ("steps", json!(first.len() - 1)),
        ("u_gap_at_t_end", num(gap)),
        ("h_change_vector_gauge", num(b.hamiltonian - second[0].hamiltonian)),
    ]);
    Ok((checks, meta))
}

fn gauge_transform(c: &GaugeTransform, out: &mut OutputDir) -> Result<(Vec<Check>, Value)> {
    let mut pot = c.potential.build();
    if let Some(h) = c.fd_step {
        pot = pot.with_fd_step(h).map_err(|e| anyhow!("fd_step: {e}"))?;
    }
    let gen = c.generator.build();
    let moved = apply_gauge(&pot, &gen);
    let samples = c.samples.points();

    let fields = check_field_invariance(&pot, &moved, &samples, c.tolerance)?;
    let tol = fields.tolerance;
    let (f1, f2) = (derive_fields(&pot), derive_fields(&moved));
    let mut table = CsvTable::new(&[
        "t",
        "x",
        "y",
        "z",
        "phi",
        "Ax",
        "Ay",
        "Az",
        "phi_prime",
        "Ax_prime",
        "Ay_prime",
        "Az_prime",
        "Ex",
        "Ey",
        "Ez",
        "Bx",
        "By",
        "Bz",
        "dE",
        "dB",
    ]);
    let (mut dphi, mut da) = (0.0f64, 0.0f64);
    for &(r, t) in &samples {
        let (phi, a) = (pot.phi(r, t)?, pot.vector(r, t)?);
        let (phi2, a2) = (moved.phi(r, t)?, moved.vector(r, t)?);
        let (e, b) = (f1.electric(r, t)?, f1.magnetic(r, t)?);
        let de = (e - f2.electric(r, t)?).norm();
        let db = (b - f2.magnetic(r, t)?).norm();
        dphi = dphi.max((phi - phi2).abs());
        da = da.max((a - a2).norm());
        table.push_nums(&[
            t, r.x, r.y, r.z, phi, a.x, a.y, a.z, phi2, a2.x, a2.y, a2.z, e.x, e.y, e.z, b.x, b.y, b.z, de, db,
        ]);
    }
    let report = InvarianceReport::new(
        fields.matched.clone(),
        vec![Deviation::new("phi", dphi), Deviation::new("A", da)],
        tol,
    )?;

    // The inverse generator must restore the original potentials.
    let back = apply_gauge(&moved, &gen.negated());
    let round_trip = transformed_deviation(&pot, &GaugeGenerator::constant(0.0), &back, &samples)?;
    let scale = 1.0 + dphi.max(da);
    let checks = vec![
        Check::holds(
            "fields E, B are gauge invariant",
            fields.matched.iter().map(|d| d.max_dev).fold(0.0, f64::max),
            format!("<= {tol:e}"),
            report.pass,
        ),
        Check::at_most(
            "negated generator restores the potentials",
            round_trip / scale,
            tol.max(1e-12),
        ),
    ];

    out.csv("potentials.csv", &table)?;
    out.report("invariance_report.json", &report)?;
    let meta = object([
        ("generator", json!(c.generator.name)),
        ("samples", json!(samples.len())),
        (
            "analytic_derivatives",
            json!(pot.has_analytic_derivatives() && moved.has_analytic_derivatives()),
        ),
        ("fd_step", num(pot.fd_step())),
    ]);
    Ok((checks, meta))
}

fn wavefunction_csv(rows: &[VolkovEvaluation]) -> CsvTable {
    let mut t = CsvTable::new(&["t", "x", "y", "z", "re", "im", "modulus", "phase"]);
    for e in rows {
        t.push_nums(&[e.t, e.r.x, e.r.y, e.r.z, e.value.re, e.value.im, e.modulus(), e.phase()]);
    }
    t
}

fn phase_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn residual_json(r: &ResidualReport) -> Value {
    json!({
        "gauge": r.gauge.name(),
        "max_residual": num(r.max_residual),
        "rms_residual": num(r.rms_residual),
        "grid": { "dx": num(r.grid.dx), "dt": num(r.grid.dt), "extent": num(r.grid.extent) },
    })
}

fn volkov(c: &Volkov, out: &mut OutputDir) -> Result<(Vec<Check>, Value)> {
    let pulse = c.pulse.build("pulse")?;
    let p = Vec3::from(c.momentum);
    let norm = Complex64::new(c.normalization[0], c.normalization[1]);
    let table = FieldIntegralTable::new(&pulse)?;

    let (t0, t1) = c.sample_window(&pulse);
    let s = &c.samples;
    let lerp = |a: f64, b: f64, k: usize, n: usize| {
        if n == 1 {
            a
        } else if k + 1 == n {
            b
        } else {
            a + (b - a) * k as f64 / (n - 1) as f64
        }
    };
    let (from, to) = (Vec3::from(s.from), Vec3::from(s.to));
    let points: Vec<(Vec3, f64)> = (0..s.times)
        .flat_map(|kt| {
            let t = lerp(t0, t1, kt, s.times);
            (0..s.points).map(move |k| {
                let w = lerp(0.0, 1.0, k, s.points);
                (from + (to - from) * w, t)
            })
        })
        .collect();
    let evals = points
        .par_iter()
        .map(|&(r, t)| {
            Ok((
                psi_velocity(p, &pulse, r, t, norm)?,
                psi_length(p, &pulse, r, t, norm)?,
                psi_length_scalar_form_with(&table, p, r, t, norm)?,
            ))
        })
        .collect::<gaugelab_core::Result<Vec<_>>>()?;

    let (mut d_mod, mut d_rel, mut d_scalar, mut d_phase, mut q_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (v, l, sc) in &evals {
        d_mod = d_mod.max((l.modulus() - v.modulus()).abs());
        if v.modulus() > 0.0 {
            let expected = l.r.dot(pulse.vector_potential(l.t)) / SPEED_OF_LIGHT;
            d_rel = d_rel.max(phase_gap((l.value / v.value).arg(), expected));
        }
        d_scalar = d_scalar.max((sc.value - l.value).norm());
        d_phase = d_phase.max(phase_gap(l.phase(), v.phase()));
        q_err = q_err.max(v.phase_error).max(l.phase_error).max(sc.phase_error);
    }
    let report = InvarianceReport::new(
        vec![
            Deviation::new("modulus", d_mod),
            Deviation::new("phase_relation", d_rel),
            Deviation::new("scalar_form", d_scalar),
        ],
        vec![Deviation::new("phase", d_phase)],
        c.tolerance,
    )?;
    let mut checks = vec![Check::holds(
        "|Psi_L| = |Psi_V|, Psi_L/Psi_V = exp(i r.A/c), scalar form = Psi_L",
        d_mod.max(d_rel).max(d_scalar),
        format!("<= {:e}", c.tolerance),
        report.pass,
    )];

    out.csv(
        "wavefunction_velocity.csv",
        &wavefunction_csv(&evals.iter().map(|e| e.0).collect::<Vec<_>>()),
    )?;
    out.csv(
        "wavefunction_length.csv",
        &wavefunction_csv(&evals.iter().map(|e| e.1).collect::<Vec<_>>()),
    )?;
    out.csv(
        "wavefunction_length_scalar.csv",
        &wavefunction_csv(&evals.iter().map(|e| e.2).collect::<Vec<_>>()),
    )?;
    out.report("invariance_report.json", &report)?;

    let mut residual_meta = Value::Null;
    if let Some(rc) = &c.residual {
        let mut grid = ResidualGrid::default_for(&pulse);
        grid.dx = rc.dx;
        grid.dt = rc.dt;
        grid.extent = rc.extent;
        grid.nt = rc.nt;
        if let Some(t) = rc.t_start {
            grid.t_start = t;
        }
        let jobs = [
            (Gauge::Velocity, grid),
            (Gauge::Velocity, grid.halved()),
            (Gauge::Length, grid),
            (Gauge::Length, grid.halved()),
        ];
        let reports = jobs
            .par_iter()
            .map(|(g, grid)| schrodinger_residual(*g, p, &pulse, grid))
            .collect::<gaugelab_core::Result<Vec<_>>>()
            .map_err(|e| anyhow!("residual: {e}"))?;
        let mut ratios = Vec::new();
        for pair in reports.chunks(2) {
            let (coarse, fine) = (&pair[0], &pair[1]);
            let name = coarse.gauge.name();
            let ratio = coarse.max_residual / fine.max_residual;
            checks.push(Check::within(
                format!("{name} gauge residual converges at second order"),
                ratio,
                CONVERGENCE_RANGE,
            ));
            out.json(&format!("residual_{name}.json"), &residual_json(coarse))?;
            out.json(&format!("residual_{name}_half.json"), &residual_json(fine))?;
            ratios.push((name, num(ratio)));
        }
        residual_meta = object([
            ("t_start", num(grid.t_start)),
            ("nt", json!(grid.nt)),
            ("convergence_ratio", object(ratios)),
        ]);
    }

    let meta = object([
        (
            "pulse",
            object([
                ("envelope", json!(pulse.family().name())),
                ("a0", num(pulse.a0())),
                ("omega", num(pulse.omega())),
                ("polarization", vec_json(pulse.polarization())),
                ("t_on", num(pulse.t_on())),
                ("t_off", num(pulse.t_off())),
            ]),
        ),
        ("momentum", vec_json(p)),
        ("samples", json!(points.len())),
        (
            "quadrature",
            object([
                ("phase_abs_tolerance", num(gaugelab_core::quadrature::DEFAULT_ABS_TOL)),
                ("max_phase_error_estimate", num(q_err)),
                ("field_table_tolerance", num(FIELD_TABLE_TOLERANCE)),
                ("field_table_step", num(table.step())),
                ("field_table_nodes", json!(table.len())),
                ("field_table_interpolation_error", num(table.interpolation_error())),
            ]),
        ),
        ("residual", residual_meta),
    ]);
    Ok((checks, meta))
}

fn defect_json(name: &str, study: &DefectStudy) -> Value {
    json!({
        "lambda_name": name,
        "t": num(study.coarse.grid.t),
        "grid": { "nx": study.coarse.grid.nx, "dx": num(study.coarse.grid.dx()) },
        "defect_norm": num(study.coarse.defect_norm),
        "max_discrepancy": num(study.coarse.max_discrepancy),
        "convergence_ratio": num(study.convergence_ratio),
    })
}

fn unitarity_check(c: &UnitarityCheck, out: &mut OutputDir) -> Result<(Vec<Check>, Value)> {
    let particle = c.particle.build()?;
    let pot = c.potential.build();
    let grid = GridSpec::new(c.grid.x_min, c.grid.x_max, c.grid.nx, c.grid.t)?;
    let studies = c
        .generators
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            defect_convergence(&particle, &pot, &g.build(), &grid).map_err(|e| anyhow!("generators[{i}]: {e}"))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut checks = Vec::new();
    for (g, study) in c.generators.iter().zip(&studies) {
        let name = &g.name;
        if study.coarse.max_discrepancy > DISCREPANCY_FLOOR {
            checks.push(Check::within(
                format!("{name}: discrepancy converges at second order"),
                study.convergence_ratio,
                CONVERGENCE_RANGE,
            ));
        } else {
            checks.push(Check::at_most(
                format!("{name}: discrepancy at rounding level"),
                study.coarse.max_discrepancy,
                DISCREPANCY_FLOOR,
            ));
        }
        let norm = study.coarse.defect_norm;
        checks.push(if g.is_time_dependent() {
            Check::holds(
                format!("{name}: time-dependent generator has a defect"),
                norm,
                format!("> {:e}", c.tolerance),
                norm > c.tolerance,
            )
        } else {
            Check::at_most(
                format!("{name}: time-independent generator has no defect"),
                norm,
                c.tolerance,
            )
        });
        out.json(&format!("defect_{name}.json"), &defect_json(name, study))?;
    }
    let meta = object([
        (
            "particle",
            json!({ "q": num(particle.charge()), "m": num(particle.mass()) }),
        ),
        (
            "grid",
            json!({ "x_min": num(grid.x_min), "x_max": num(grid.x_max), "nx": grid.nx, "t": num(grid.t) }),
        ),
        ("refined_nx", json!(grid.refined().nx)),
        (
            "generators",
            json!(c.generators.iter().map(|g| g.name.as_str()).collect::<Vec<_>>()),
        ),
    ]);
    Ok((checks, meta))
}

fn keldysh_map(c: &KeldyshMap, out: &mut OutputDir) -> Result<(Vec<Check>, Value)> {
    let unit = c.intensity.unit;
    let i_grid = GeometricGrid::new(
        unit.to_atomic(c.intensity.start),
        unit.to_atomic(c.intensity.stop),
        c.intensity.count,
    )
    .map_err(|e| anyhow!("intensity: {e}"))?;
    let w_grid = GeometricGrid::new(c.omega.start, c.omega.stop, c.omega.count).map_err(|e| anyhow!("omega: {e}"))?;
    let scan = regime_scan(c.binding_energy, &i_grid, &w_grid)?;

    let route = scan
        .cells
        .par_iter()
        .map(|cell| {
            let p = cell.point;
            let other = keldysh_gamma(p.binding_energy, ponderomotive(p.intensity, p.omega)?)?;
            Ok((p.gamma - other).abs() / p.gamma)
        })
        .collect::<gaugelab_core::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let mut checks = vec![Check::at_most(
        "both routes to gamma agree (relative)",
        route,
        c.tolerance,
    )];

    let min_ratio = c.iso_min_ratio.unwrap_or(1.0);
    let pairs = scan.iso_gamma_pairs(min_ratio);
    if let Some(r) = c.iso_min_ratio {
        let best = pairs.iter().map(|p| p.intensity_ratio).fold(0.0, f64::max);
        checks.push(Check::holds(
            "iso-gamma pair with widely different intensities",
            best,
            format!(">= {r}"),
            best >= r,
        ));
    }

    let mut table = CsvTable::new(&["omega", "I", "U_p", "gamma", "iso_group"]);
    for cell in &scan.cells {
        let p = cell.point;
        table.push(vec![
            Cell::Num(p.omega),
            Cell::Num(p.intensity),
            Cell::Num(p.u_p),
            Cell::Num(p.gamma),
            Cell::Int(cell.iso_group as i64),
        ]);
    }
    out.csv("scan.csv", &table)?;

    let point = |p: &gaugelab_core::keldysh::KeldyshPoint| json!({ "omega": num(p.omega), "I": num(p.intensity), "U_p": num(p.u_p), "gamma": num(p.gamma) });
    let grid = |g: &GeometricGrid| json!({ "start": num(g.start), "stop": num(g.stop), "count": g.count });
    let scan_json = json!({
        "metadata": {
            "E_B": num(c.binding_energy),
            "intensity": grid(&scan.intensity_grid),
            "omega": grid(&scan.omega_grid),
            "intensity_unit": "au",
            "atomic_unit_intensity_w_cm2": num(ATOMIC_UNIT_INTENSITY_W_CM2),
            "iso_gamma_relative_width": num(gaugelab_core::keldysh::ISO_GAMMA_TOLERANCE),
            "groups": scan.group_count(),
        },
        "cells": scan.cells.iter().map(|cell| {
            let mut v = point(&cell.point);
            v["iso_group"] = json!(cell.iso_group);
            v
        }).collect::<Vec<_>>(),
        "iso_pairs": pairs.iter().map(|p| json!({
            "low": point(&p.low),
            "high": point(&p.high),
            "intensity_ratio": num(p.intensity_ratio),
        })).collect::<Vec<_>>(),
    });
    out.json("scan.json", &scan_json)?;
    let meta = object([
        ("cells", json!(scan.cells.len())),
        ("iso_pairs", json!(pairs.len())),
        ("input_intensity_unit", json!(unit.name())),
    ]);
    Ok((checks, meta))
}
