use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fraction of samples at each end treated as a low-accuracy band.
pub const BAND_FRACTION: f64 = 0.05;

/// Uniform 1-D sampling `x0 + i*dx`, `0 <= i < n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x0: f64,
    dx: f64,
    n: usize,
}

impl Grid {
    pub fn new(x0: f64, dx: f64, n: usize) -> Result<Self> {
        if !x0.is_finite() {
            return Err(Error::InvalidGrid(format!("x0 = {x0} is not finite")));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::InvalidGrid(format!("dx = {dx} must be positive")));
        }
        if n < 4 {
            return Err(Error::InvalidGrid(format!("n = {n} must be at least 4")));
        }
        Ok(Self { x0, dx, n })
    }

    /// `n` samples spanning `[x0, x1]` inclusive.
    pub fn spanning(x0: f64, x1: f64, n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidGrid(format!("n = {n} must be at least 4")));
        }
        Self::new(x0, (x1 - x0) / (n - 1) as f64, n)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n - 1)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Indices outside the 5% boundary bands.
    pub fn interior(&self) -> std::ops::Range<usize> {
        let m = (BAND_FRACTION * self.n as f64) as usize;
        m..self.n - m
    }

    /// Same sampling up to a relative tolerance on the coordinates.
    pub fn matches(&self, other: &Grid) -> bool {
        let scale = self.dx * 1e-9;
        self.n == other.n
            && (self.x0 - other.x0).abs() <= scale
            && (self.dx - other.dx).abs() <= scale / self.n as f64
    }
}

/// Samples of a real function on a grid at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
    t: f64,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>, t: f64) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidField(format!(
                "{} values for a grid of {} samples",
                values.len(),
                grid.n()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!(
                "non-finite value {} at x = {}",
                values[i],
                grid.x(i)
            )));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidTime(t));
        }
        Ok(Self { grid, values, t })
    }

    pub fn from_fn(grid: Grid, t: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.n()).map(|i| f(grid.x(i))).collect();
        Self::new(grid, values, t)
    }

    pub fn constant(grid: Grid, t: f64, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.n()], t)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Same grid and time, new samples.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.grid, values, self.t)
    }

    pub fn with_time(mut self, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidTime(t));
        }
        self.t = t;
        Ok(self)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.values)
    }
}

pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Max |a - b| over `range`.
pub fn max_abs_diff(a: &[f64], b: &[f64], range: std::ops::Range<usize>) -> f64 {
    range.fold(0.0, |m, i| m.max((a[i] - b[i]).abs()))
}

/// Max |a - b - c| over `range` with the constant `c` chosen optimally.
pub fn max_abs_diff_mod_const(a: &[f64], b: &[f64], range: std::ops::Range<usize>) -> f64 {
    let (lo, hi) = range.clone().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
        let d = a[i] - b[i];
        (lo.min(d), hi.max(d))
    });
    if lo > hi {
        0.0
    } else {
        0.5 * (hi - lo)
    }
}

/// Centered first difference; second-order one-sided stencils at the ends.
pub fn centered_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut g = vec![0.0; n];
    let inv = 0.5 / h;
    for i in 1..n - 1 {
        g[i] = (f[i + 1] - f[i - 1]) * inv;
    }
    g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv;
    g[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv;
    g
}

/// Second difference; second-order one-sided stencils at the ends.
pub fn second_difference(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut g = vec![0.0; n];
    let inv = 1.0 / (h * h);
    for i in 1..n - 1 {
        g[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv;
    }
    g[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * inv;
    g[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * inv;
    g
}

/// Composite trapezoid rule over all samples.
pub fn trapezoid(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = f[1..n - 1].iter().sum();
    h * (inner + 0.5 * (f[0] + f[n - 1]))
}
