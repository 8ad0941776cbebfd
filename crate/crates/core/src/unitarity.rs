//! One-dimensional grid operators and the unitarity defect of time-dependent
//! gauge transformations.
//!
//! With `U = exp(i q Lambda / c)` the gauge-transformed Hamiltonian obeys
//! `H' = U H U^-1 - (q/c) dLambda/dt`, so `H' - U H U^-1` is a multiplication
//! operator that vanishes only when `Lambda` is time independent.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::classical::ChargedParticle;
use crate::error::{GaugeError, Result};
use crate::gauge::{apply_gauge, GaugeGenerator};
use crate::potential::{PotentialConfiguration, SPEED_OF_LIGHT};
use crate::vec3::Vec3;

pub const MIN_GRID_POINTS: usize = 5;

/// Uniform grid on `[x_min, x_max]` (along x, with `y = z = 0`) at time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub t: f64,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, nx: usize, t: f64) -> Result<Self> {
        if nx < MIN_GRID_POINTS {
            return Err(GaugeError::GridTooSmall {
                axis: "x",
                points: nx,
                min: MIN_GRID_POINTS,
            });
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(GaugeError::invalid("grid.x_max", "must exceed grid.x_min"));
        }
        if !t.is_finite() {
            return Err(GaugeError::invalid("grid.t", "must be finite"));
        }
        Ok(GridSpec { x_min, x_max, nx, t })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        if j + 1 == self.nx {
            self.x_max
        } else {
            self.x_min + j as f64 * self.dx()
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nx).map(move |j| self.x(j))
    }

    /// Same interval with the spacing halved.
    pub fn refined(&self) -> Self {
        GridSpec {
            nx: 2 * self.nx - 1,
            ..*self
        }
    }

    /// Gaussian centred mid-grid with width `(x_max - x_min) / 8`.
    pub fn default_probe(&self) -> Vec<Complex64> {
        let centre = 0.5 * (self.x_min + self.x_max);
        let width = (self.x_max - self.x_min) / 8.0;
        self.points()
            .map(|x| {
                let u = (x - centre) / width;
                Complex64::new(libm::exp(-0.5 * u * u), 0.0)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Multiplication,
    Differential,
    Composed,
}

impl OperatorKind {
    fn name(self) -> &'static str {
        match self {
            OperatorKind::Multiplication => "multiplication",
            OperatorKind::Differential => "differential",
            OperatorKind::Composed => "composed",
        }
    }
}

type Action = Arc<dyn Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Multiplication(Arc<[Complex64]>),
    Action(Action),
}

/// Linear operator on sampled complex functions of a [`GridSpec`].
#[derive(Clone)]
pub struct GridOperator {
    grid: GridSpec,
    kind: OperatorKind,
    repr: Repr,
}

impl core::fmt::Debug for GridOperator {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("GridOperator")
            .field("grid", &self.grid)
            .field("kind", &self.kind)
            .finish()
    }
}

impl GridOperator {
    pub fn multiplication(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.nx {
            return Err(GaugeError::GridMismatch);
        }
        Ok(GridOperator {
            grid,
            kind: OperatorKind::Multiplication,
            repr: Repr::Multiplication(values.into()),
        })
    }

    fn from_action<F>(grid: GridSpec, kind: OperatorKind, f: F) -> Self
    where
        F: Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync + 'static,
    {
        GridOperator {
            grid,
            kind,
            repr: Repr::Action(Arc::new(f)),
        }
    }

    pub fn identity(grid: GridSpec) -> Self {
        GridOperator {
            grid,
            kind: OperatorKind::Multiplication,
            repr: Repr::Multiplication(alloc::vec![Complex64::new(1.0, 0.0); grid.nx].into()),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// Diagonal of a multiplication operator.
    pub fn diagonal(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Repr::Multiplication(d) => Some(d),
            Repr::Action(_) => None,
        }
    }

    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        if psi.len() != self.grid.nx {
            return Err(GaugeError::GridMismatch);
        }
        Ok(match &self.repr {
            Repr::Multiplication(d) => d.iter().zip(psi).map(|(a, b)| a * b).collect(),
            Repr::Action(f) => f(psi),
        })
    }

    /// Inverse of a multiplication operator with nonzero diagonal.
    pub fn inverse(&self) -> Result<Self> {
        match &self.repr {
            Repr::Multiplication(d) if d.iter().all(|z| z.norm() > 0.0) => {
                GridOperator::multiplication(self.grid, d.iter().map(|z| z.inv()).collect())
            }
            _ => Err(GaugeError::NotInvertible(self.kind.name())),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GridOperator) -> Result<Self> {
        if self.grid != inner.grid {
            return Err(GaugeError::GridMismatch);
        }
        let (outer, inner) = (self.clone(), inner.clone());
        Ok(GridOperator::from_action(
            self.grid,
            OperatorKind::Composed,
            move |psi| {
                let mid = inner.apply(psi).expect("grid checked at composition");
                outer.apply(&mid).expect("grid checked at composition")
            },
        ))
    }
}

/// Central first and second differences with zero Dirichlet ghosts.
fn d1(psi: &[Complex64], j: usize, dx: f64) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let left = if j == 0 { zero } else { psi[j - 1] };
    let right = psi.get(j + 1).copied().unwrap_or(zero);
    (right - left) / (2.0 * dx)
}

fn d2(psi: &[Complex64], j: usize, dx: f64) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let left = if j == 0 { zero } else { psi[j - 1] };
    let right = psi.get(j + 1).copied().unwrap_or(zero);
    (right + left - psi[j] * 2.0) / (dx * dx)
}

/// `H = (1/2m)(-i d/dx - q A_x / c)^2 + q phi` on the grid, with the cross
/// term in the symmetric form `p A + A p`.
pub fn build_hamiltonian(
    particle: &ChargedParticle,
    pot: &PotentialConfiguration,
    grid: &GridSpec,
) -> Result<GridOperator> {
    if grid.nx < MIN_GRID_POINTS {
        return Err(GaugeError::GridTooSmall {
            axis: "x",
            points: grid.nx,
            min: MIN_GRID_POINTS,
        });
    }
    let (q, m) = (particle.charge(), particle.mass());
    let mut phi = Vec::with_capacity(grid.nx);
    let mut ax = Vec::with_capacity(grid.nx);
    for x in grid.points() {
        let r = Vec3::new(x, 0.0, 0.0);
        phi.push(pot.phi(r, grid.t)?);
        ax.push(pot.vector(r, grid.t)?.x);
    }
    let dx = grid.dx();
    let i = Complex64::new(0.0, 1.0);
    let k = q / SPEED_OF_LIGHT;
    Ok(GridOperator::from_action(
        *grid,
        OperatorKind::Differential,
        move |psi| {
            let a_psi: Vec<Complex64> = psi.iter().zip(&ax).map(|(p, a)| p * a).collect();
            (0..psi.len())
                .map(|j| {
                    let kinetic = -d2(psi, j, dx)
                        + i * k * (d1(&a_psi, j, dx) + d1(psi, j, dx) * ax[j])
                        + psi[j] * (k * k * ax[j] * ax[j]);
                    kinetic / (2.0 * m) + psi[j] * (q * phi[j])
                })
                .collect()
        },
    ))
}

/// `U = exp(i q Lambda(x, t) / c)` as a multiplication operator.
pub fn gauge_unitary_factor(gen: &GaugeGenerator, q: f64, grid: &GridSpec) -> Result<GridOperator> {
    let values = grid
        .points()
        .map(|x| {
            Ok(Complex64::cis(
                q * gen.lambda(Vec3::new(x, 0.0, 0.0), grid.t)? / SPEED_OF_LIGHT,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    GridOperator::multiplication(*grid, values)
}

/// `U ∘ H ∘ U^-1`; `u` must be an invertible multiplication operator.
pub fn similarity_transform(h: &GridOperator, u: &GridOperator) -> Result<GridOperator> {
    if h.grid != u.grid {
        return Err(GaugeError::GridMismatch);
    }
    u.compose(&h.compose(&u.inverse()?)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefectReport {
    pub grid: GridSpec,
    /// Max over interior points of `|(H' - U H U^-1) psi + (q/c) dLambda/dt psi|`.
    pub max_discrepancy: f64,
    /// `max |(q/c) dLambda/dt|` over the grid.
    pub defect_norm: f64,
}

/// Measure `H' - U H U^-1` on `probe` and compare it with the predicted
/// multiplication operator `-(q/c) dLambda/dt`.
pub fn unitarity_defect(
    particle: &ChargedParticle,
    pot: &PotentialConfiguration,
    gen: &GaugeGenerator,
    grid: &GridSpec,
    probe: &[Complex64],
) -> Result<DefectReport> {
    if probe.len() != grid.nx {
        return Err(GaugeError::GridMismatch);
    }
    if probe.iter().all(|z| z.norm() == 0.0) {
        return Err(GaugeError::invalid("probe", "must not vanish identically"));
    }
    let q = particle.charge();
    let h = build_hamiltonian(particle, pot, grid)?;
    let h_prime = build_hamiltonian(particle, &apply_gauge(pot, gen), grid)?;
    let u = gauge_unitary_factor(gen, q, grid)?;
    let conjugated = similarity_transform(&h, &u)?;

    let lhs = h_prime.apply(probe)?;
    let rhs = conjugated.apply(probe)?;
    let mut max_discrepancy: f64 = 0.0;
    let mut defect_norm: f64 = 0.0;
    for (j, x) in grid.points().enumerate() {
        let predicted = -q * gen.dt_lambda(Vec3::new(x, 0.0, 0.0), grid.t)? / SPEED_OF_LIGHT;
        defect_norm = defect_norm.max(libm::fabs(predicted));
        if j == 0 || j + 1 == grid.nx {
            continue;
        }
        let miss = (lhs[j] - rhs[j] - probe[j] * predicted).norm();
        max_discrepancy = max_discrepancy.max(miss);
    }
    Ok(DefectReport {
        grid: *grid,
        max_discrepancy,
        defect_norm,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefectStudy {
    pub coarse: DefectReport,
    pub fine: DefectReport,
    /// `coarse.max_discrepancy / fine.max_discrepancy`; about 4 for a second-order stencil.
    pub convergence_ratio: f64,
}

/// [`unitarity_defect`] with the default probe on `grid` and on the grid with
/// half the spacing.
pub fn defect_convergence(
    particle: &ChargedParticle,
    pot: &PotentialConfiguration,
    gen: &GaugeGenerator,
    grid: &GridSpec,
) -> Result<DefectStudy> {
    let coarse = unitarity_defect(particle, pot, gen, grid, &grid.default_probe())?;
    let fine_grid = grid.refined();
    let fine = unitarity_defect(particle, pot, gen, &fine_grid, &fine_grid.default_probe())?;
    Ok(DefectStudy {
        coarse,
        fine,
        convergence_ratio: coarse.max_discrepancy / fine.max_discrepancy,
    })
}
