//! Exact and numerical solutions of `w_t = alpha w_xx`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{second_difference, Field, Grid};

/// Gaussian kernel support in standard deviations.
pub const KERNEL_SIGMAS: f64 = 8.0;

/// `w(x, t) = a exp(-c x / (2 alpha) + c^2 t / (4 alpha) - b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpMode {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ExpMode {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidInput(format!("mode amplitude {a} must be positive")));
        }
        if !(b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidInput("mode phase and speed must be finite".into()));
        }
        Ok(Self { a, b, c })
    }

    /// Log of the mode value; never overflows.
    pub fn log_value(&self, alpha: f64, x: f64, t: f64) -> f64 {
        self.a.ln() - self.c * x / (2.0 * alpha) + self.c * self.c * t / (4.0 * alpha) - self.b
    }

    pub fn value(&self, alpha: f64, x: f64, t: f64) -> f64 {
        self.log_value(alpha, x, t).exp()
    }

    /// `d w / dx = -c / (2 alpha) w`.
    pub fn dx(&self, alpha: f64, x: f64, t: f64) -> f64 {
        -self.c / (2.0 * alpha) * self.value(alpha, x, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionParams {
    pub alpha: f64,
}

impl DiffusionParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidInput(format!("diffusivity {alpha} must be positive")));
        }
        Ok(Self { alpha })
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    Ok(())
}

pub fn exp_mode_eval(mode: &ExpMode, params: &DiffusionParams, grid: &Grid, t: f64) -> Result<Field> {
    check_time(t)?;
    let mut values = Vec::with_capacity(grid.n());
    for x in grid.xs() {
        let v = mode.value(params.alpha, x, t);
        if !v.is_finite() {
            return Err(Error::OverflowAtPoint { x });
        }
        values.push(v);
    }
    Field::new(*grid, values, t)
}

/// Pointwise sum of the modes.
pub fn superpose(modes: &[ExpMode], params: &DiffusionParams, grid: &Grid, t: f64) -> Result<Field> {
    if modes.is_empty() {
        return Err(Error::InvalidInput("superpose needs at least one mode".into()));
    }
    check_time(t)?;
    let mut values = vec![0.0; grid.n()];
    for mode in modes {
        for (i, v) in values.iter_mut().enumerate() {
            let x = grid.x(i);
            *v += mode.value(params.alpha, x, t);
            if !v.is_finite() {
                return Err(Error::OverflowAtPoint { x });
            }
        }
    }
    Field::new(*grid, values, t)
}

/// Convolution of `w0` with the heat kernel over an elapsed time `t`.
///
/// Lattice quadrature on the grid spacing, with the data extended beyond each
/// end by its end value. The kernel is cut at eight standard deviations. For `t <= dx^2 / alpha` the kernel is narrower
/// than the grid spacing and `w0` is returned unchanged. The result is
/// stamped with `w0.t() + t`.
pub fn heat_kernel_solve(w0: &Field, params: &DiffusionParams, t: f64) -> Result<Field> {
    check_time(t)?;
    let grid = *w0.grid();
    let h = grid.dx();
    if t <= h * h / params.alpha {
        return w0.clone().with_time(w0.t() + t);
    }
    let v = w0.values();
    let n = v.len();
    let four_at = 4.0 * params.alpha * t;
    let norm = h / (std::f64::consts::PI * four_at).sqrt();
    let sigma = (2.0 * params.alpha * t).sqrt();
    let reach = (KERNEL_SIGMAS * sigma / h).ceil() as usize;
    let out: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in i as isize - reach as isize..=(i + reach) as isize {
                let d = (i as isize - j) as f64 * h;
                let vj = v[j.clamp(0, n as isize - 1) as usize];
                s += norm * (-d * d / four_at).exp() * vj;
            }
            s
        })
        .collect();
    Field::new(grid, out, w0.t() + t)
}

/// `max |(w1 - w0)/dt - alpha (w0_xx + w1_xx)/2|` over the interior band.
pub fn diffusion_residual(w0: &Field, w1: &Field, params: &DiffusionParams) -> Result<f64> {
    if !w0.grid().matches(w1.grid()) {
        return Err(Error::InvalidInput("fields live on different grids".into()));
    }
    let dt = w1.t() - w0.t();
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!(
            "second field must be later than the first (dt = {dt})"
        )));
    }
    let h = w0.grid().dx();
    let a = second_difference(w0.values(), h);
    let b = second_difference(w1.values(), h);
    let range = w0.grid().interior();
    Ok(range.fold(0.0f64, |m, i| {
        let r = (w1.values()[i] - w0.values()[i]) / dt - params.alpha * 0.5 * (a[i] + b[i]);
        m.max(r.abs())
    }))
}
