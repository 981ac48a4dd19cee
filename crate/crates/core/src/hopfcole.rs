//! The fractional Hopf-Cole transformation `phi = -2 alpha D^p log(b + w)` and
//! the solution factories built on it.
//!
//! The transform maps solutions of the diffusion equation onto solutions of
//! the fractional Burgers equation. It is one-way: no inverse is provided,
//! since different diffusion data (and non-diffusion data) map to the same
//! `phi`.

use serde::{Deserialize, Serialize};

use crate::diffusion::{heat_kernel_solve, DiffusionParams, ExpMode};
use crate::error::{Error, Result};
use crate::fracops::{FracOperator, FracSpec, Scheme, Side, Terminal};
use crate::grid::{centered_derivative, second_difference, sup_norm, Field, Grid};
use crate::trajectory::Trajectory;

/// Amplitude below which the linearized transform may be used.
pub const SMALL_AMPLITUDE_THRESHOLD: f64 = 0.01;
/// Relative residual a companion field must meet in [`generate_new_solution`].
pub const COMPANION_TOLERANCE: f64 = 1e-4;

/// Parameters of the fractional Burgers equation and of its transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Diffusivity.
    pub alpha: f64,
    /// Nonlocality order in [0, 1].
    pub p: f64,
    /// Shift inside the logarithm of the transform.
    pub b: f64,
    /// Length scale of the dimensional derivative convention.
    pub lam: f64,
    pub terminal: Terminal,
    pub side: Side,
    pub scheme: Scheme,
}

impl ModelParams {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        let params = Self {
            alpha,
            p,
            b: 0.0,
            lam: 1.0,
            terminal: Terminal::Unbounded,
            side: Side::Left,
            scheme: Scheme::ProductTrapezoid,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_b(mut self, b: f64) -> Result<Self> {
        self.b = b;
        self.validate().map(|_| self)
    }

    pub fn with_lambda(mut self, lam: f64) -> Result<Self> {
        self.lam = lam;
        self.validate().map(|_| self)
    }

    pub fn with_p(mut self, p: f64) -> Result<Self> {
        self.p = p;
        self.validate().map(|_| self)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        self.alpha = alpha;
        self.validate().map(|_| self)
    }

    pub fn with_terminal(mut self, terminal: Terminal) -> Self {
        self.terminal = terminal;
        self
    }

    pub fn with_side(mut self, side: Side) -> Self {
        self.side = side;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidInput(format!("alpha = {} must be positive", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidOrder {
                order: self.p,
                reason: "p must lie in [0, 1]".into(),
            });
        }
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(Error::InvalidInput(format!("b = {} must be non-negative", self.b)));
        }
        if !(self.lam > 0.0 && self.lam.is_finite()) {
            return Err(Error::InvalidInput(format!("lambda = {} must be positive", self.lam)));
        }
        Ok(())
    }

    pub fn diffusion(&self) -> DiffusionParams {
        DiffusionParams { alpha: self.alpha }
    }

    /// Caputo derivative of the given order with this model's side, terminal and scale.
    pub fn derivative_spec(&self, order: f64) -> FracSpec {
        FracSpec::caputo(order)
            .side(self.side)
            .terminal(self.terminal)
            .length_scale(self.lam)
            .scheme(self.scheme)
    }

    pub fn integral_spec(&self, order: f64) -> FracSpec {
        FracSpec::integral(order).side(self.side).terminal(self.terminal)
    }

    pub fn derivative(&self, order: f64, grid: Grid) -> Result<FracOperator> {
        FracOperator::new(self.derivative_spec(order), grid)
    }
}

/// `log(b + w)`, rejecting non-positive arguments.
fn log_shifted(w: &Field, b: f64) -> Result<Field> {
    let grid = w.grid();
    let mut out = Vec::with_capacity(grid.n());
    for (i, &v) in w.values().iter().enumerate() {
        let s = b + v;
        if !(s > 0.0) {
            return Err(Error::LogDomainViolation {
                x: grid.x(i),
                value: s,
            });
        }
        out.push(s.ln());
    }
    w.with_values(out)
}

/// `-2 alpha D^p l` for a precomputed logarithm `l`.
pub fn transform_log(l: &Field, params: &ModelParams) -> Result<Field> {
    params.validate()?;
    let d = params.derivative(params.p, *l.grid())?.apply(l.values())?;
    l.with_values(d.into_iter().map(|v| -2.0 * params.alpha * v).collect())
}

/// `phi = -2 alpha D^p log(b + w)`.
pub fn transform(w: &Field, params: &ModelParams) -> Result<Field> {
    params.validate()?;
    transform_log(&log_shifted(w, params.b)?, params)
}

/// First-order form `phi = -2 alpha D^p w` for `|w| <= 0.01`.
pub fn transform_small_amplitude(w: &Field, params: &ModelParams) -> Result<Field> {
    params.validate()?;
    let amp = w.sup_norm();
    if amp > SMALL_AMPLITUDE_THRESHOLD {
        return Err(Error::AmplitudeTooLarge {
            amplitude: amp,
            threshold: SMALL_AMPLITUDE_THRESHOLD,
        });
    }
    let d = params.derivative(params.p, *w.grid())?.apply(w.values())?;
    w.with_values(d.into_iter().map(|v| -2.0 * params.alpha * v).collect())
}

/// `w0 = exp(-lambda^(1-p) I^p phi0 / (2 alpha))`; at `p = 0`, `exp(-phi0 / (2 alpha))`.
pub fn initial_condition_map(phi0: &Field, params: &ModelParams) -> Result<Field> {
    params.validate()?;
    let grid = *phi0.grid();
    let integ = if params.p == 0.0 {
        phi0.values().to_vec()
    } else {
        let scale = params.lam.powf(1.0 - params.p);
        FracOperator::new(params.integral_spec(params.p), grid)?
            .apply(phi0.values())?
            .into_iter()
            .map(|v| v * scale)
            .collect()
    };
    let mut out = Vec::with_capacity(grid.n());
    for (i, v) in integ.into_iter().enumerate() {
        let w = (-v / (2.0 * params.alpha)).exp();
        if !w.is_finite() {
            return Err(Error::OverflowAtPoint { x: grid.x(i) });
        }
        out.push(w);
    }
    phi0.with_values(out)
}

/// Initial-condition map, heat evolution over `t`, then the transform with `b = 1`.
///
/// The result differs from `phi0` at `t = 0`: the `1 +` shift changes the
/// field unless `w0` is large. At `p = 0` a zero datum maps to the constant
/// `-2 alpha log 2`; at `p = 0` fields are meaningful up to an additive constant.
pub fn solve_fbenn_via_transform(phi0: &Field, params: &ModelParams, t: f64) -> Result<Field> {
    let w0 = initial_condition_map(phi0, params)?;
    let w = if t == 0.0 {
        w0
    } else {
        heat_kernel_solve(&w0, &params.diffusion(), t)?
    };
    transform(&w, &ModelParams { b: 1.0, ..*params })
}

/// `log(b + sum_i w_i(x, t))` evaluated without overflow.
pub fn log_mode_sum(modes: &[ExpMode], b: f64, alpha: f64, grid: &Grid, t: f64) -> Result<Field> {
    if modes.is_empty() {
        return Err(Error::InvalidInput("at least one mode is required".into()));
    }
    let mut out = Vec::with_capacity(grid.n());
    for x in grid.xs() {
        let mut logs: Vec<f64> = modes.iter().map(|m| m.log_value(alpha, x, t)).collect();
        if b > 0.0 {
            logs.push(b.ln());
        }
        let mx = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = logs.iter().map(|l| (l - mx).exp()).sum();
        out.push(mx + s.ln());
    }
    Field::new(*grid, out, t)
}

/// Transform of a superposition of modes with the model's shift `b`.
pub fn transform_modes(modes: &[ExpMode], params: &ModelParams, grid: &Grid, t: f64) -> Result<Field> {
    params.validate()?;
    transform_log(&log_mode_sum(modes, params.b, params.alpha, grid, t)?, params)
}

/// Nonlinear interaction of modes: the transform of their sum with `b = 0`.
pub fn interact(modes: &[ExpMode], params: &ModelParams, grid: &Grid, t: f64) -> Result<Field> {
    transform_modes(modes, &ModelParams { b: 0.0, ..*params }, grid, t)
}

/// `D^p phi0` for a solution `phi0` of the `p = 0` equation.
pub fn order_shift(phi_p0: &Field, p: f64, params: &ModelParams) -> Result<Field> {
    let params = params.with_p(p)?;
    let d = params.derivative(p, *phi_p0.grid())?.apply(phi_p0.values())?;
    phi_p0.with_values(d)
}

/// `lambda^(p-1) I^(1-p) phi1` for a solution `phi1` of the `p = 1` equation.
pub fn order_shift_from_burgers(phi_p1: &Field, p: f64, params: &ModelParams) -> Result<Field> {
    let params = params.with_p(p)?;
    if p == 1.0 {
        return Ok(phi_p1.clone());
    }
    let scale = params.lam.powf(p - 1.0);
    let v = FracOperator::new(params.integral_spec(1.0 - p), *phi_p1.grid())?
        .apply(phi_p1.values())?
        .into_iter()
        .map(|x| x * scale)
        .collect();
    phi_p1.with_values(v)
}

/// Max relative residual of `u_t + (D^(1-p) v) u_x - alpha u_xx = 0` over the
/// interior band, on every slice with a centered time difference.
pub fn companion_residual(v: &Trajectory, u: &Trajectory, params: &ModelParams) -> Result<f64> {
    if !v.aligned_with(u) || u.len() < 2 {
        return Err(Error::InvalidInput(
            "companion check needs two aligned trajectories of at least two slices".into(),
        ));
    }
    let grid = *u.grid().unwrap();
    let h = grid.dx();
    let grad = params.derivative(1.0 - params.p, grid)?;
    let scale = u
        .slices()
        .iter()
        .map(|s| s.sup_norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for k in u.centered_slices() {
        let ut = u.time_derivative(k).unwrap();
        let uk = u.slices()[k].values();
        let g = grad.apply(v.slices()[k].values())?;
        let ux = centered_derivative(uk, h);
        let uxx = second_difference(uk, h);
        for i in grid.interior() {
            let r = ut[i] + g[i] * ux[i] - params.alpha * uxx[i];
            worst = worst.max(r.abs());
        }
    }
    Ok(worst / scale)
}

/// New solution `phi = -2 alpha D^p log u + v` from a known solution `v`
/// and a positive companion `u`.
///
/// `u` is validated against its linear equation before use.
pub fn generate_new_solution(v: &Trajectory, u: &Trajectory, params: &ModelParams) -> Result<Trajectory> {
    params.validate()?;
    for s in u.slices() {
        if let Some(i) = s.values().iter().position(|&x| !(x > 0.0)) {
            return Err(Error::LogDomainViolation {
                x: s.grid().x(i),
                value: s.values()[i],
            });
        }
    }
    let residual = companion_residual(v, u, params)?;
    if residual > COMPANION_TOLERANCE {
        return Err(Error::NotACompanionSolution {
            residual,
            tolerance: COMPANION_TOLERANCE,
        });
    }
    let shifted = ModelParams { b: 0.0, ..*params };
    let mut out = Vec::with_capacity(u.len());
    for (us, vs) in u.slices().iter().zip(v.slices()) {
        let t = transform(us, &shifted)?;
        let vals = t.values().iter().zip(vs.values()).map(|(a, b)| a + b).collect();
        out.push(vs.with_values(vals)?);
    }
    Trajectory::new(out)
}

/// Max-norm residuals of the two Backlund relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacklundResidual {
    /// `w_x + (b + w) D^(1-p) phi / (2 alpha)`.
    pub spatial: f64,
    /// `w_t + [(b + w) D^(1-p) phi]_x / 2`.
    pub temporal: f64,
}

/// Evaluates both Backlund relations over the interior band, on every slice
/// with a centered time difference.
pub fn backlund_check(w: &Trajectory, phi: &Trajectory, params: &ModelParams) -> Result<BacklundResidual> {
    params.validate()?;
    if !w.aligned_with(phi) || w.len() < 2 {
        return Err(Error::InvalidInput(
            "Backlund check needs aligned trajectories of at least two slices".into(),
        ));
    }
    let grid = *w.grid().unwrap();
    let h = grid.dx();
    let grad = params.derivative(1.0 - params.p, grid)?;
    let mut spatial = 0.0f64;
    let mut temporal = 0.0f64;
    for k in w.centered_slices() {
        let wk = w.slices()[k].values();
        let g = grad.apply(phi.slices()[k].values())?;
        let wx = centered_derivative(wk, h);
        let flux: Vec<f64> = wk.iter().zip(&g).map(|(wi, gi)| (params.b + wi) * gi).collect();
        let fx = centered_derivative(&flux, h);
        let wt = w.time_derivative(k).unwrap();
        for i in grid.interior() {
            spatial = spatial.max((wx[i] + flux[i] / (2.0 * params.alpha)).abs());
            temporal = temporal.max((wt[i] + 0.5 * fx[i]).abs());
        }
    }
    Ok(BacklundResidual { spatial, temporal })
}

/// The `p = 0` member of the single-mode family: `-2 alpha log(b + w)`.
pub fn closed_form_p0(mode: &ExpMode, b: f64, alpha: f64, x: f64, t: f64) -> f64 {
    let l = mode.log_value(alpha, x, t);
    let lse = if b > 0.0 {
        let m = l.max(b.ln());
        m + ((l - m).exp() + (b.ln() - m).exp()).ln()
    } else {
        l
    };
    -2.0 * alpha * lse
}

/// The `p = 1` member of the single-mode family (left side): `c w / (b + w)`.
pub fn closed_form_p1(mode: &ExpMode, b: f64, alpha: f64, x: f64, t: f64) -> f64 {
    let l = mode.log_value(alpha, x, t);
    // c / (1 + b e^{-l}) avoids overflow for large w.
    if b == 0.0 {
        mode.c
    } else {
        mode.c / (1.0 + (b.ln() - l).exp())
    }
}

/// Interaction of two modes at `p = 1`: `(c1 w1 + c2 w2) / (w1 + w2)`.
pub fn closed_form_interaction_p1(m1: &ExpMode, m2: &ExpMode, alpha: f64, x: f64, t: f64) -> f64 {
    let l1 = m1.log_value(alpha, x, t);
    let l2 = m2.log_value(alpha, x, t);
    let m = l1.max(l2);
    let (w1, w2) = ((l1 - m).exp(), (l2 - m).exp());
    (m1.c * w1 + m2.c * w2) / (w1 + w2)
}

/// Sup norm of the difference of two transforms, a convenience for order sweeps.
pub fn transform_distance(a: &Field, b: &Field) -> f64 {
    let d: Vec<f64> = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
    sup_norm(&d)
}
