//! Fractional Burgers equation with nonlocal nonlinearity and its fractional
//! Hopf-Cole transformation.
//!
//! The crate is organised bottom-up:
//!
//! - [`fracops`]: fractional integrals and derivatives on uniform grids.
//! - [`diffusion`]: exact and numerical solutions of the heat equation.
//! - [`hopfcole`]: the transform and the solution factories built on it.
//! - [`fbenn`]: direct evaluation and time integration of the equation.
//! - [`diagnostics`]: invariants, energy, Reynolds number, asymptotic fits.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod diffusion;
pub mod error;
pub mod fbenn;
pub mod fracops;
pub mod grid;
pub mod hopfcole;
pub mod trajectory;

pub use diffusion::{DiffusionParams, ExpMode};
pub use error::{Error, Result};
pub use fbenn::{Boundary, IntegrateOptions, TravellingWave};
pub use fracops::{FracOperator, FracSpec, Kind, Scheme, Side, Terminal};
pub use grid::{Field, Grid};
pub use hopfcole::ModelParams;
pub use trajectory::Trajectory;
