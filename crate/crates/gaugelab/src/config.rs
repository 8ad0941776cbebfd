//! Scenario configs: JSON with a top-level `kind`, one schema per kind.
//!
//! Parsing happens in two stages so that every error names the full path of
//! the offending field (`particle.m`, `generators[1].a`, ...): first the raw
//! JSON, then each typed section through `serde_path_to_error`. Numeric
//! domains are checked afterwards by `validate`, again with full paths.

use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use gaugelab_core::classical::{ChargedParticle, Method};
use gaugelab_core::gauge::GaugeGenerator;
use gaugelab_core::pulse::{PulseFamily, PulseShape};
use gaugelab_core::{PotentialConfiguration, Vec3};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

/// One atomic unit of intensity in W/cm^2: the cycle-averaged intensity
/// `eps0 c E0^2 / 2` of a linearly polarized field with peak `E0` = 1 a.u.
/// of field strength (5.14220674763e11 V/m). With this convention `I = E0^2`
/// in atomic units.
pub const ATOMIC_UNIT_INTENSITY_W_CM2: f64 = 3.509_445_520_59e16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    ClassicalDemo,
    GaugeTransform,
    Volkov,
    UnitarityCheck,
    KeldyshMap,
}

impl Kind {
    pub const ALL: [Kind; 5] = [
        Kind::ClassicalDemo,
        Kind::GaugeTransform,
        Kind::Volkov,
        Kind::UnitarityCheck,
        Kind::KeldyshMap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::ClassicalDemo => "classical-demo",
            Kind::GaugeTransform => "gauge-transform",
            Kind::Volkov => "volkov",
            Kind::UnitarityCheck => "unitarity-check",
            Kind::KeldyshMap => "keldysh-map",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = Kind::ALL.iter().map(|k| k.name()).collect();
            anyhow!("unknown kind `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Clone, Debug)]
pub enum Scenario {
    ClassicalDemo(ClassicalDemo),
    GaugeTransform(GaugeTransform),
    Volkov(Volkov),
    UnitarityCheck(UnitarityCheck),
    KeldyshMap(KeldyshMap),
}

impl Scenario {
    pub fn kind(&self) -> Kind {
        match self {
            Scenario::ClassicalDemo(_) => Kind::ClassicalDemo,
            Scenario::GaugeTransform(_) => Kind::GaugeTransform,
            Scenario::Volkov(_) => Kind::Volkov,
            Scenario::UnitarityCheck(_) => Kind::UnitarityCheck,
            Scenario::KeldyshMap(_) => Kind::KeldyshMap,
        }
    }

    /// Parse and validate a config document.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| anyhow!("config: invalid JSON: {e}"))?;
        let Value::Object(mut map) = value else {
            bail!("config: expected a JSON object");
        };
        let kind: Kind = match map.remove("kind") {
            Some(Value::String(s)) => s.parse().map_err(|e| anyhow!("kind: {e}"))?,
            Some(_) => bail!("kind: expected a string"),
            None => bail!("kind: missing field"),
        };
        let rest = Value::Object(map);
        let scenario = match kind {
            Kind::ClassicalDemo => Scenario::ClassicalDemo(parse_at(rest, "")?),
            Kind::GaugeTransform => Scenario::GaugeTransform(parse_at(rest, "")?),
            Kind::Volkov => Scenario::Volkov(parse_at(rest, "")?),
            Kind::UnitarityCheck => Scenario::UnitarityCheck(parse_at(rest, "")?),
            Kind::KeldyshMap => Scenario::KeldyshMap(parse_at(rest, "")?),
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Scenario::ClassicalDemo(c) => c.validate(),
            Scenario::GaugeTransform(c) => c.validate(),
            Scenario::Volkov(c) => c.validate(),
            Scenario::UnitarityCheck(c) => c.validate(),
            Scenario::KeldyshMap(c) => c.validate(),
        }
    }

    /// Replace the scenario's tolerance (the `--tolerance` flag).
    pub fn set_tolerance(&mut self, tol: f64) -> Result<()> {
        check_tolerance("--tolerance", tol)?;
        match self {
            Scenario::ClassicalDemo(c) => c.tolerance = tol,
            Scenario::GaugeTransform(c) => c.tolerance = Some(tol),
            Scenario::Volkov(c) => c.tolerance = tol,
            Scenario::UnitarityCheck(c) => c.tolerance = tol,
            Scenario::KeldyshMap(c) => c.tolerance = tol,
        }
        Ok(())
    }
}

fn join(prefix: &str, path: &str) -> String {
    match (prefix.is_empty(), path.is_empty() || path == ".") {
        (true, _) => path.to_string(),
        (false, true) => prefix.to_string(),
        (false, false) if path.starts_with('[') => format!("{prefix}{path}"),
        (false, false) => format!("{prefix}.{path}"),
    }
}

/// Deserialize `value`, reporting errors at `prefix` + the inner path.
fn parse_at<T: DeserializeOwned>(value: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = join(prefix, if inner == "." { "" } else { &inner });
        if path.is_empty() {
            // Root-level messages already name the field (`missing field `pulse``, or
            // a catalog error carrying its own path).
            anyhow!("{}", e.into_inner())
        } else {
            anyhow!("{path}: {}", e.into_inner())
        }
    })
}

fn finite(path: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        bail!("{path}: must be finite, got {x}")
    }
}

fn positive(path: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        bail!("{path}: must be positive and finite, got {x}")
    }
}

fn check_tolerance(path: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        bail!("{path}: must be finite and nonnegative, got {x}")
    }
}

fn at_least(path: &str, n: usize, min: usize) -> Result<usize> {
    if n >= min {
        Ok(n)
    } else {
        bail!("{path}: must be at least {min}, got {n}")
    }
}

fn finite_vec(path: &str, v: [f64; 3]) -> Result<Vec3> {
    for (i, c) in v.iter().enumerate() {
        finite(&format!("{path}[{i}]"), *c)?;
    }
    Ok(Vec3::from(v))
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleConfig {
    #[serde(default = "one")]
    pub q: f64,
    #[serde(default = "one")]
    pub m: f64,
}

impl Default for ParticleConfig {
    fn default() -> Self {
        ParticleConfig { q: 1.0, m: 1.0 }
    }
}

impl ParticleConfig {
    /// The core reports `particle.q` / `particle.m`, which are also the config paths.
    pub fn build(&self) -> Result<ChargedParticle> {
        Ok(ChargedParticle::new(self.q, self.m)?)
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Envelope {
    Zero,
    RectangularSinusoid,
    Sin2EnvelopeSinusoid,
}

impl From<Envelope> for PulseFamily {
    fn from(e: Envelope) -> Self {
        match e {
            Envelope::Zero => PulseFamily::Zero,
            Envelope::RectangularSinusoid => PulseFamily::RectangularSinusoid,
            Envelope::Sin2EnvelopeSinusoid => PulseFamily::Sin2EnvelopeSinusoid,
        }
    }
}

fn x_axis() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

/// A dipole-approximation pulse `A(t)`.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    pub envelope: Envelope,
    #[serde(default)]
    pub a0: f64,
    #[serde(default)]
    pub omega: f64,
    /// Normalised on use; must be nonzero.
    #[serde(default = "x_axis")]
    pub polarization: [f64; 3],
    #[serde(default)]
    pub t_on: f64,
    pub t_off: f64,
}

impl PulseConfig {
    pub fn build(&self, path: &str) -> Result<PulseShape> {
        let at = |field: &str| join(path, field);
        finite(&at("a0"), self.a0)?;
        if self.envelope != Envelope::Zero {
            positive(&at("omega"), self.omega)?;
        }
        let pol = finite_vec(&at("polarization"), self.polarization)?;
        if pol.norm() == 0.0 {
            bail!("{}: must be a nonzero vector", at("polarization"));
        }
        finite(&at("t_on"), self.t_on)?;
        finite(&at("t_off"), self.t_off)?;
        if self.t_off <= self.t_on {
            bail!("{}: must exceed t_on = {}", at("t_off"), self.t_on);
        }
        if self.envelope == Envelope::Zero {
            return Ok(PulseShape::new(
                PulseFamily::Zero,
                0.0,
                0.0,
                Vec3::E_X,
                self.t_on,
                self.t_off,
            )?);
        }
        PulseShape::new(
            self.envelope.into(),
            self.a0,
            self.omega,
            pol / pol.norm(),
            self.t_on,
            self.t_off,
        )
        .map_err(|e| anyhow!("{path}: {e}"))
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum PulseGauge {
    Velocity,
    Length,
}

/// Catalog of potentials, selected by `family`.
#[derive(Clone, Debug)]
pub enum PotentialSpec {
    Vacuum,
    ConstantFieldScalar { e0: f64 },
    ConstantFieldVector { e0: f64 },
    SinusoidalPulse { gauge: PulseGauge, pulse: PulseShape },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Empty {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantFieldParams {
    e0: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PulsePotentialParams {
    gauge: PulseGauge,
    pulse: PulseConfig,
}

/// Split a catalog object into its `family` tag and the remaining parameters.
fn family_of(value: Value, path: &str, families: &[&str]) -> Result<(String, Value)> {
    let Value::Object(mut map) = value else {
        bail!("{path}: expected an object with a `family` field");
    };
    let family = match map.remove("family") {
        Some(Value::String(s)) if families.contains(&s.as_str()) => s,
        Some(Value::String(s)) => bail!(
            "{}: unknown family `{s}` (expected one of {})",
            join(path, "family"),
            families.join(", ")
        ),
        Some(_) => bail!("{}: expected a string", join(path, "family")),
        None => bail!("{}: missing field", join(path, "family")),
    };
    Ok((family, Value::Object(map)))
}

impl PotentialSpec {
    pub const FAMILIES: [&'static str; 4] = [
        "vacuum",
        "constant-field-scalar",
        "constant-field-vector",
        "sinusoidal-pulse",
    ];

    pub fn from_value(value: Value, path: &str) -> Result<Self> {
        let (family, rest) = family_of(value, path, &Self::FAMILIES)?;
        Ok(match family.as_str() {
            "vacuum" => {
                parse_at::<Empty>(rest, path)?;
                PotentialSpec::Vacuum
            }
            "constant-field-scalar" => {
                let p: ConstantFieldParams = parse_at(rest, path)?;
                PotentialSpec::ConstantFieldScalar {
                    e0: finite(&join(path, "e0"), p.e0)?,
                }
            }
            "constant-field-vector" => {
                let p: ConstantFieldParams = parse_at(rest, path)?;
                PotentialSpec::ConstantFieldVector {
                    e0: finite(&join(path, "e0"), p.e0)?,
                }
            }
            _ => {
                let p: PulsePotentialParams = parse_at(rest, path)?;
                PotentialSpec::SinusoidalPulse {
                    gauge: p.gauge,
                    pulse: p.pulse.build(&join(path, "pulse"))?,
                }
            }
        })
    }

    pub fn build(&self) -> PotentialConfiguration {
        match self {
            PotentialSpec::Vacuum => PotentialConfiguration::vacuum(),
            PotentialSpec::ConstantFieldScalar { e0 } => PotentialConfiguration::constant_field_scalar(*e0),
            PotentialSpec::ConstantFieldVector { e0 } => PotentialConfiguration::constant_field_vector(*e0),
            PotentialSpec::SinusoidalPulse { gauge, pulse } => match gauge {
                PulseGauge::Velocity => pulse.velocity_gauge_potential(),
                PulseGauge::Length => pulse.length_gauge_potential(),
            },
        }
    }
}

/// Catalog of gauge generators, selected by `family`.
#[derive(Clone, Debug)]
pub enum GeneratorFamily {
    Constant {
        value: f64,
    },
    /// `Lambda = a x t`.
    Product {
        a: f64,
    },
    /// `Lambda = (sum_k c_k x^k) t^n`.
    Polynomial {
        coefficients: Vec<f64>,
        t_power: u32,
    },
    /// `Lambda = -r . A(t)` of a pulse.
    LengthGauge {
        pulse: PulseShape,
    },
}

#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    pub name: String,
    pub family: GeneratorFamily,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantParams {
    name: Option<String>,
    value: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProductParams {
    name: Option<String>,
    a: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolynomialParams {
    name: Option<String>,
    coefficients: Vec<f64>,
    #[serde(default)]
    t_power: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LengthGaugeParams {
    name: Option<String>,
    pulse: PulseConfig,
}

fn check_name(path: &str, name: Option<String>, default: &str) -> Result<String> {
    let name = name.unwrap_or_else(|| default.to_string());
    let ok = !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
    if !ok {
        bail!(
            "{}: must be nonempty and use only ASCII letters, digits, `-` and `_`",
            join(path, "name")
        );
    }
    Ok(name)
}

impl GeneratorSpec {
    pub const FAMILIES: [&'static str; 4] = ["constant", "product", "polynomial", "length-gauge"];

    pub fn from_value(value: Value, path: &str) -> Result<Self> {
        let (family, rest) = family_of(value, path, &Self::FAMILIES)?;
        let spec = match family.as_str() {
            "constant" => {
                let p: ConstantParams = parse_at(rest, path)?;
                GeneratorSpec {
                    name: check_name(path, p.name, &family)?,
                    family: GeneratorFamily::Constant {
                        value: finite(&join(path, "value"), p.value)?,
                    },
                }
            }
            "product" => {
                let p: ProductParams = parse_at(rest, path)?;
                GeneratorSpec {
                    name: check_name(path, p.name, &family)?,
                    family: GeneratorFamily::Product {
                        a: finite(&join(path, "a"), p.a)?,
                    },
                }
            }
            "polynomial" => {
                let p: PolynomialParams = parse_at(rest, path)?;
                if p.coefficients.is_empty() {
                    bail!("{}: needs at least one coefficient", join(path, "coefficients"));
                }
                for (i, c) in p.coefficients.iter().enumerate() {
                    finite(&format!("{}[{i}]", join(path, "coefficients")), *c)?;
                }
                if p.t_power > 8 {
                    bail!("{}: must be at most 8, got {}", join(path, "t_power"), p.t_power);
                }
                GeneratorSpec {
                    name: check_name(path, p.name, &family)?,
                    family: GeneratorFamily::Polynomial {
                        coefficients: p.coefficients,
                        t_power: p.t_power,
                    },
                }
            }
            _ => {
                let p: LengthGaugeParams = parse_at(rest, path)?;
                GeneratorSpec {
                    name: check_name(path, p.name, &family)?,
                    family: GeneratorFamily::LengthGauge {
                        pulse: p.pulse.build(&join(path, "pulse"))?,
                    },
                }
            }
        };
        Ok(spec)
    }

    pub fn build(&self) -> GaugeGenerator {
        match &self.family {
            GeneratorFamily::Constant { value } => GaugeGenerator::constant(*value),
            GeneratorFamily::Product { a } => GaugeGenerator::product(*a),
            GeneratorFamily::Polynomial { coefficients, t_power } => {
                GaugeGenerator::polynomial(coefficients.clone(), *t_power)
            }
            GeneratorFamily::LengthGauge { pulse } => pulse.length_gauge_generator(),
        }
    }

    /// Whether `dLambda/dt` is not identically zero.
    pub fn is_time_dependent(&self) -> bool {
        match &self.family {
            GeneratorFamily::Constant { .. } => false,
            GeneratorFamily::Product { a } => *a != 0.0,
            GeneratorFamily::Polynomial { coefficients, t_power } => {
                *t_power > 0 && coefficients.iter().any(|&c| c != 0.0)
            }
            GeneratorFamily::LengthGauge { pulse } => !pulse.is_zero() && pulse.a0() != 0.0,
        }
    }
}

// ---- classical-demo ----

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    /// Position `x(0)`.
    #[serde(default)]
    pub x: [f64; 3],
    /// Velocity `dx/dt(0)`.
    #[serde(default)]
    pub v: [f64; 3],
    #[serde(default)]
    pub t: f64,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Rk4,
    Leapfrog,
}

impl From<MethodName> for Method {
    fn from(m: MethodName) -> Self {
        match m {
            MethodName::Rk4 => Method::Rk4,
            MethodName::Leapfrog => Method::Leapfrog,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default = "IntegratorConfig::default_method")]
    pub method: MethodName,
    #[serde(default = "IntegratorConfig::default_dt")]
    pub dt: f64,
    #[serde(default = "IntegratorConfig::default_t_end")]
    pub t_end: f64,
    /// Write every n-th sample to the trajectory CSVs (the last one always).
    #[serde(default = "IntegratorConfig::default_sample_every")]
    pub sample_every: usize,
}

impl IntegratorConfig {
    fn default_method() -> MethodName {
        MethodName::Rk4
    }
    fn default_dt() -> f64 {
        gaugelab_core::classical::DEFAULT_DT
    }
    fn default_t_end() -> f64 {
        10.0
    }
    fn default_sample_every() -> usize {
        1
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Self::default_method(),
            dt: Self::default_dt(),
            t_end: Self::default_t_end(),
            sample_every: Self::default_sample_every(),
        }
    }
}

fn default_trajectory_tolerance() -> f64 {
    gaugelab_core::classical::DEFAULT_TRAJECTORY_TOLERANCE
}

/// A constant field `E0` along x, integrated in the scalar gauge
/// `phi = -E0 x` and the vector gauge `A = -c E0 t x^`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalDemo {
    #[serde(default)]
    pub particle: ParticleConfig,
    #[serde(default = "one")]
    pub e0: f64,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default = "default_trajectory_tolerance")]
    pub tolerance: f64,
}

impl ClassicalDemo {
    pub fn validate(&self) -> Result<()> {
        self.particle.build()?;
        finite("e0", self.e0)?;
        finite_vec("initial.x", self.initial.x)?;
        finite_vec("initial.v", self.initial.v)?;
        finite("initial.t", self.initial.t)?;
        positive("integrator.dt", self.integrator.dt)?;
        finite("integrator.t_end", self.integrator.t_end)?;
        if self.integrator.t_end <= self.initial.t {
            bail!("integrator.t_end: must exceed initial.t = {}", self.initial.t);
        }
        at_least("integrator.sample_every", self.integrator.sample_every, 1)?;
        check_tolerance("tolerance", self.tolerance)?;
        Ok(())
    }
}

// ---- gauge-transform ----

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleBox {
    #[serde(default = "SampleBox::default_min")]
    pub min: [f64; 3],
    #[serde(default = "SampleBox::default_max")]
    pub max: [f64; 3],
    #[serde(default = "SampleBox::default_points")]
    pub points_per_axis: usize,
    #[serde(default)]
    pub t_min: f64,
    #[serde(default = "SampleBox::default_t_max")]
    pub t_max: f64,
    #[serde(default = "SampleBox::default_points")]
    pub times: usize,
}

impl SampleBox {
    fn default_min() -> [f64; 3] {
        [-2.0; 3]
    }
    fn default_max() -> [f64; 3] {
        [2.0; 3]
    }
    fn default_points() -> usize {
        3
    }
    fn default_t_max() -> f64 {
        5.0
    }

    fn validate(&self, path: &str) -> Result<()> {
        let lo = finite_vec(&join(path, "min"), self.min)?;
        let hi = finite_vec(&join(path, "max"), self.max)?;
        for i in 0..3 {
            if hi[i] < lo[i] {
                bail!("{}[{i}]: must not be below min", join(path, "max"));
            }
        }
        at_least(&join(path, "points_per_axis"), self.points_per_axis, 1)?;
        at_least(&join(path, "times"), self.times, 1)?;
        finite(&join(path, "t_min"), self.t_min)?;
        finite(&join(path, "t_max"), self.t_max)?;
        if self.t_max < self.t_min {
            bail!("{}: must not be below t_min", join(path, "t_max"));
        }
        Ok(())
    }

    /// Lattice points ordered by t, then z, y, x.
    pub fn points(&self) -> Vec<(Vec3, f64)> {
        let lerp = |a: f64, b: f64, k: usize, n: usize| {
            if n == 1 {
                a
            } else if k + 1 == n {
                b
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        };
        let n = self.points_per_axis;
        let mut out = Vec::with_capacity(n * n * n * self.times);
        for kt in 0..self.times {
            let t = lerp(self.t_min, self.t_max, kt, self.times);
            for kz in 0..n {
                for ky in 0..n {
                    for kx in 0..n {
                        let r = Vec3::new(
                            lerp(self.min[0], self.max[0], kx, n),
                            lerp(self.min[1], self.max[1], ky, n),
                            lerp(self.min[2], self.max[2], kz, n),
                        );
                        out.push((r, t));
                    }
                }
            }
        }
        out
    }
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox {
            min: Self::default_min(),
            max: Self::default_max(),
            points_per_axis: Self::default_points(),
            t_min: 0.0,
            t_max: Self::default_t_max(),
            times: Self::default_points(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaugeTransformRaw {
    potential: Value,
    generator: Value,
    #[serde(default)]
    samples: SampleBox,
    fd_step: Option<f64>,
    tolerance: Option<f64>,
}

/// Apply one generator to one potential and compare fields and potentials.
#[derive(Clone, Debug)]
pub struct GaugeTransform {
    pub potential: PotentialSpec,
    pub generator: GeneratorSpec,
    pub samples: SampleBox,
    pub fd_step: Option<f64>,
    /// `None`: the default field tolerance for the derivative paths in use.
    pub tolerance: Option<f64>,
}

impl<'de> Deserialize<'de> for GaugeTransform {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GaugeTransformRaw::deserialize(d)?;
        let potential = PotentialSpec::from_value(raw.potential, "potential").map_err(serde::de::Error::custom)?;
        let generator = GeneratorSpec::from_value(raw.generator, "generator").map_err(serde::de::Error::custom)?;
        Ok(GaugeTransform {
            potential,
            generator,
            samples: raw.samples,
            fd_step: raw.fd_step,
            tolerance: raw.tolerance,
        })
    }
}

impl GaugeTransform {
    pub fn validate(&self) -> Result<()> {
        self.samples.validate("samples")?;
        if let Some(h) = self.fd_step {
            positive("fd_step", h)?;
        }
        if let Some(t) = self.tolerance {
            check_tolerance("tolerance", t)?;
        }
        Ok(())
    }
}

// ---- volkov ----

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSamples {
    #[serde(default = "LineSamples::default_from")]
    pub from: [f64; 3],
    #[serde(default = "LineSamples::default_to")]
    pub to: [f64; 3],
    #[serde(default = "LineSamples::default_points")]
    pub points: usize,
    /// Defaults to the pulse onset.
    pub t_start: Option<f64>,
    /// Defaults to a quarter of the pulse duration past `t_off`.
    pub t_stop: Option<f64>,
    #[serde(default = "LineSamples::default_times")]
    pub times: usize,
}

impl LineSamples {
    fn default_from() -> [f64; 3] {
        [-5.0, 0.0, 0.0]
    }
    fn default_to() -> [f64; 3] {
        [5.0, 0.0, 0.0]
    }
    fn default_points() -> usize {
        11
    }
    fn default_times() -> usize {
        9
    }
}

impl Default for LineSamples {
    fn default() -> Self {
        LineSamples {
            from: Self::default_from(),
            to: Self::default_to(),
            points: Self::default_points(),
            t_start: None,
            t_stop: None,
            times: Self::default_times(),
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualConfig {
    #[serde(default = "ResidualConfig::default_dx")]
    pub dx: f64,
    #[serde(default = "ResidualConfig::default_dt")]
    pub dt: f64,
    #[serde(default = "ResidualConfig::default_extent")]
    pub extent: f64,
    #[serde(default = "ResidualConfig::default_nt")]
    pub nt: usize,
    /// Defaults to a quarter of the way into the pulse.
    pub t_start: Option<f64>,
}

impl ResidualConfig {
    fn default_dx() -> f64 {
        gaugelab_core::volkov::ResidualGrid::DEFAULT_DX
    }
    fn default_dt() -> f64 {
        gaugelab_core::volkov::ResidualGrid::DEFAULT_DT
    }
    fn default_extent() -> f64 {
        gaugelab_core::volkov::ResidualGrid::DEFAULT_EXTENT
    }
    fn default_nt() -> usize {
        gaugelab_core::volkov::ResidualGrid::DEFAULT_NT
    }
}

fn unit_normalization() -> [f64; 2] {
    [1.0, 0.0]
}

fn default_volkov_tolerance() -> f64 {
    1e-8
}

/// Volkov states in both gauges, the scalar-potential form, and optionally
/// finite-difference Schrödinger residuals.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Volkov {
    pub pulse: PulseConfig,
    /// Canonical momentum `p`.
    #[serde(default)]
    pub momentum: [f64; 3],
    /// `C` as `[re, im]`.
    #[serde(default = "unit_normalization")]
    pub normalization: [f64; 2],
    #[serde(default)]
    pub samples: LineSamples,
    pub residual: Option<ResidualConfig>,
    #[serde(default = "default_volkov_tolerance")]
    pub tolerance: f64,
}

impl Volkov {
    pub fn validate(&self) -> Result<()> {
        let pulse = self.pulse.build("pulse")?;
        finite_vec("momentum", self.momentum)?;
        finite("normalization[0]", self.normalization[0])?;
        finite("normalization[1]", self.normalization[1])?;
        let s = &self.samples;
        finite_vec("samples.from", s.from)?;
        finite_vec("samples.to", s.to)?;
        at_least("samples.points", s.points, 1)?;
        at_least("samples.times", s.times, 1)?;
        let (t0, t1) = self.sample_window(&pulse);
        finite("samples.t_start", t0)?;
        finite("samples.t_stop", t1)?;
        if t0 < pulse.t_on() {
            bail!("samples.t_start: must not precede pulse.t_on = {}", pulse.t_on());
        }
        if t1 < t0 {
            bail!("samples.t_stop: must not precede samples.t_start = {t0}");
        }
        if let Some(r) = &self.residual {
            positive("residual.dx", r.dx)?;
            positive("residual.dt", r.dt)?;
            positive("residual.extent", r.extent)?;
            at_least("residual.nt", r.nt, 3)?;
            if r.extent / r.dx < 1.0 {
                bail!("residual.extent: must be at least residual.dx");
            }
            if let Some(t) = r.t_start {
                finite("residual.t_start", t)?;
                if t < pulse.t_on() {
                    bail!("residual.t_start: must not precede pulse.t_on = {}", pulse.t_on());
                }
            }
        }
        check_tolerance("tolerance", self.tolerance)?;
        Ok(())
    }

    pub fn sample_window(&self, pulse: &PulseShape) -> (f64, f64) {
        let t0 = self.samples.t_start.unwrap_or(pulse.t_on());
        let t1 = self
            .samples
            .t_stop
            .unwrap_or(pulse.t_off() + 0.25 * (pulse.t_off() - pulse.t_on()));
        (t0, t1)
    }
}

// ---- unitarity-check ----

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "GridConfig::default_x_min")]
    pub x_min: f64,
    #[serde(default = "GridConfig::default_x_max")]
    pub x_max: f64,
    #[serde(default = "GridConfig::default_nx")]
    pub nx: usize,
    #[serde(default = "one")]
    pub t: f64,
}

impl GridConfig {
    fn default_x_min() -> f64 {
        -5.0
    }
    fn default_x_max() -> f64 {
        5.0
    }
    fn default_nx() -> usize {
        201
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            x_min: Self::default_x_min(),
            x_max: Self::default_x_max(),
            nx: Self::default_nx(),
            t: 1.0,
        }
    }
}

fn default_defect_tolerance() -> f64 {
    1e-12
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitarityRaw {
    #[serde(default)]
    particle: ParticleConfig,
    potential: Option<Value>,
    generators: Vec<Value>,
    #[serde(default)]
    grid: GridConfig,
    #[serde(default = "default_defect_tolerance")]
    tolerance: f64,
}

/// Operator-level defect `H' - U H U^-1` for a list of generators on a 1D grid.
#[derive(Clone, Debug)]
pub struct UnitarityCheck {
    pub particle: ParticleConfig,
    /// Defaults to a unit constant field in the scalar gauge.
    pub potential: PotentialSpec,
    pub generators: Vec<GeneratorSpec>,
    pub grid: GridConfig,
    /// Largest `defect_norm` still counted as zero.
    pub tolerance: f64,
}

impl<'de> Deserialize<'de> for UnitarityCheck {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = UnitarityRaw::deserialize(d)?;
        let potential = match raw.potential {
            Some(v) => PotentialSpec::from_value(v, "potential").map_err(serde::de::Error::custom)?,
            None => PotentialSpec::ConstantFieldScalar { e0: 1.0 },
        };
        let generators = raw
            .generators
            .into_iter()
            .enumerate()
            .map(|(i, v)| GeneratorSpec::from_value(v, &format!("generators[{i}]")))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(UnitarityCheck {
            particle: raw.particle,
            potential,
            generators,
            grid: raw.grid,
            tolerance: raw.tolerance,
        })
    }
}

impl UnitarityCheck {
    pub fn validate(&self) -> Result<()> {
        self.particle.build()?;
        if self.generators.is_empty() {
            bail!("generators: needs at least one generator");
        }
        for (i, g) in self.generators.iter().enumerate() {
            if self.generators[..i].iter().any(|o| o.name == g.name) {
                bail!("generators[{i}].name: duplicate name `{}`", g.name);
            }
        }
        finite("grid.x_min", self.grid.x_min)?;
        finite("grid.x_max", self.grid.x_max)?;
        finite("grid.t", self.grid.t)?;
        if self.grid.x_max <= self.grid.x_min {
            bail!("grid.x_max: must exceed grid.x_min");
        }
        at_least("grid.nx", self.grid.nx, gaugelab_core::unitarity::MIN_GRID_POINTS)?;
        check_tolerance("tolerance", self.tolerance)?;
        Ok(())
    }
}

// ---- keldysh-map ----

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
pub enum IntensityUnit {
    #[default]
    #[serde(rename = "au")]
    AtomicUnits,
    #[serde(rename = "W/cm2")]
    WattsPerCm2,
}

impl IntensityUnit {
    pub fn to_atomic(self, x: f64) -> f64 {
        match self {
            IntensityUnit::AtomicUnits => x,
            IntensityUnit::WattsPerCm2 => x / ATOMIC_UNIT_INTENSITY_W_CM2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IntensityUnit::AtomicUnits => "au",
            IntensityUnit::WattsPerCm2 => "W/cm2",
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntensityAxis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub unit: IntensityUnit,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaAxis {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

fn default_binding_energy() -> f64 {
    0.5
}

fn default_keldysh_tolerance() -> f64 {
    1e-12
}

/// Geometric `(I, omega)` scan of `U_p` and `gamma` with iso-gamma groups.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeldyshMap {
    #[serde(default = "default_binding_energy")]
    pub binding_energy: f64,
    pub intensity: IntensityAxis,
    pub omega: OmegaAxis,
    /// If set, require an iso-gamma pair whose intensities differ by at least this factor.
    pub iso_min_ratio: Option<f64>,
    /// Relative tolerance between the two routes to `gamma`.
    #[serde(default = "default_keldysh_tolerance")]
    pub tolerance: f64,
}

impl KeldyshMap {
    pub fn validate(&self) -> Result<()> {
        positive("binding_energy", self.binding_energy)?;
        positive("intensity.start", self.intensity.start)?;
        positive("intensity.stop", self.intensity.stop)?;
        at_least("intensity.count", self.intensity.count, 1)?;
        positive("omega.start", self.omega.start)?;
        positive("omega.stop", self.omega.stop)?;
        at_least("omega.count", self.omega.count, 1)?;
        if let Some(r) = self.iso_min_ratio {
            positive("iso_min_ratio", r)?;
        }
        check_tolerance("tolerance", self.tolerance)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> String {
        Scenario::from_json(text).unwrap_err().to_string()
    }

    #[test]
    fn defaults_fill_in() {
        let s = Scenario::from_json(r#"{"kind": "classical-demo"}"#).unwrap();
        let Scenario::ClassicalDemo(c) = s else { panic!() };
        assert_eq!(c.e0, 1.0);
        assert_eq!(c.integrator.dt, 1e-3);
        assert_eq!(c.integrator.t_end, 10.0);
        assert_eq!(c.tolerance, 1e-8);
    }

    #[test]
    fn errors_name_the_field() {
        assert!(err(r#"{"kind": "classical-demo", "particle": {"m": -1}}"#).starts_with("invalid particle.m"));
        assert!(err(r#"{"kind": "classical-demo", "particle": {"m": "x"}}"#).starts_with("particle.m:"));
        assert!(err(r#"{"kind": "classical-demo", "integrator": {"dt": 0}}"#).starts_with("integrator.dt:"));
        assert!(err(r#"{"kind": "classical-demo", "extra": 1}"#).contains("extra"));
        assert!(err(r#"{"kind": "warp"}"#).starts_with("kind: unknown kind `warp`"));
        assert!(err(r#"{}"#).starts_with("kind:"));
        assert!(err("[1]").starts_with("config:"));
        assert!(err("{").starts_with("config: invalid JSON"));
    }

    #[test]
    fn catalog_paths() {
        let e = err(
            r#"{"kind": "unitarity-check", "generators": [{"family": "product", "a": 1}, {"family": "product", "b": 1}]}"#,
        );
        assert!(e.starts_with("generators[1]"), "{e}");
        let e = err(r#"{"kind": "unitarity-check", "generators": [{"family": "spline"}]}"#);
        assert!(e.starts_with("generators[0].family: unknown family"), "{e}");
        let e = err(
            r#"{"kind": "gauge-transform", "potential": {"family": "sinusoidal-pulse", "gauge": "velocity",
                "pulse": {"envelope": "rectangular-sinusoid", "a0": 1, "omega": -1, "t_off": 5}},
                "generator": {"family": "constant", "value": 0}}"#,
        );
        assert!(e.starts_with("potential.pulse.omega"), "{e}");
        let e = err(
            r#"{"kind": "unitarity-check", "generators": [{"family": "product", "a": 1}, {"family": "product", "a": 2}]}"#,
        );
        assert!(e.starts_with("generators[1].name: duplicate"), "{e}");
    }

    #[test]
    fn keldysh_units() {
        let s = Scenario::from_json(
            r#"{"kind": "keldysh-map", "intensity": {"start": 1e14, "stop": 1e14, "count": 1, "unit": "W/cm2"},
                "omega": {"start": 0.057, "stop": 0.057, "count": 1}}"#,
        )
        .unwrap();
        let Scenario::KeldyshMap(k) = s else { panic!() };
        let i = k.intensity.unit.to_atomic(k.intensity.start);
        assert!((i - 1e14 / 3.509_445_520_59e16).abs() < 1e-18);
        assert!(err(r#"{"kind": "keldysh-map", "intensity": {"start": 1, "stop": 1, "count": 0}, "omega": {"start": 1, "stop": 1, "count": 1}}"#)
            .starts_with("intensity.count"));
    }

    #[test]
    fn time_dependence_of_catalog_generators() {
        let g = |v: &str| GeneratorSpec::from_value(serde_json::from_str(v).unwrap(), "g").unwrap();
        assert!(g(r#"{"family": "product", "a": -2}"#).is_time_dependent());
        assert!(!g(r#"{"family": "product", "a": 0}"#).is_time_dependent());
        assert!(!g(r#"{"family": "polynomial", "coefficients": [0, 1, 2]}"#).is_time_dependent());
        assert!(g(r#"{"family": "polynomial", "coefficients": [0, 1], "t_power": 2}"#).is_time_dependent());
        assert!(!g(r#"{"family": "constant", "value": 3}"#).is_time_dependent());
    }

    #[test]
    fn sample_box_lattice() {
        let b = SampleBox {
            points_per_axis: 2,
            times: 2,
            ..SampleBox::default()
        };
        let pts = b.points();
        assert_eq!(pts.len(), 16);
        assert_eq!(pts[0], (Vec3::new(-2.0, -2.0, -2.0), 0.0));
        assert_eq!(pts[15], (Vec3::new(2.0, 2.0, 2.0), 5.0));
    }
}
