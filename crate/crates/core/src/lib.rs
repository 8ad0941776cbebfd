//! Numerical laboratory for gauge transformations of electromagnetic potentials.
//!
//! Everything here works in Hartree atomic units with Gaussian-convention
//! factors of `1/c`. The crate is `no_std` (it needs `alloc`) and has no IO;
//! file formats, configuration and the command line live in the `gaugelab`
//! crate.
//!
//! Module map:
//! - [`potential`], [`gauge`], [`fields`]: potentials, gauge generators, field
//!   derivation and field-invariance checks.
//! - [`classical`]: Hamilton's equations for a charged particle under minimal
//!   coupling, energy decomposition and gauge comparison.
//! - [`pulse`], [`quadrature`], [`volkov`]: dipole-approximation Volkov states in
//!   the velocity and length gauges and their Schrödinger residuals.
//! - [`unitarity`]: grid operators and the defect `H' - U H U^-1`.
//! - [`keldysh`]: Keldysh parameter, ponderomotive energy and regime scans.
#![no_std]

extern crate alloc;

pub mod classical;
pub mod error;
pub mod fields;
pub mod gauge;
pub mod keldysh;
pub mod potential;
pub mod pulse;
pub mod quadrature;
pub mod report;
pub mod unitarity;
pub mod vec3;
pub mod volkov;

pub use error::{GaugeError, Result};
pub use num_complex::Complex64;
pub use potential::{PotentialConfiguration, SPEED_OF_LIGHT};
pub use report::{Deviation, InvarianceReport};
pub use vec3::Vec3;
