//! Shared fixtures for the benchmarks.

use fracburgers::{Field, Grid, ModelParams};

/// Grid sizes the benches sweep over.
pub const SIZES: [usize; 3] = [256, 1024, 4096];

pub fn grid(n: usize) -> Grid {
    Grid::spanning(-8.0, 8.0, n).expect("valid grid")
}

/// Smooth localized hump with a tilt, so left and right tails differ.
pub fn hump(g: Grid) -> Field {
    Field::from_fn(g, 0.0, |x| (-x * x).exp() + 0.1 * x.tanh()).expect("finite field")
}

pub fn params(p: f64) -> ModelParams {
    ModelParams::new(0.5, p).expect("valid parameters")
}

/// Largest step the stepper accepts on `g` at the fixture viscosity.
pub fn max_dt(g: &Grid) -> f64 {
    fracburgers::fbenn::stability_bound(g.dx(), 0.5)
}
