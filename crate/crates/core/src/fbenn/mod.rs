//! The fractional Burgers equation with nonlocal nonlinearity,
//! `phi_t + (1/2) D^p (D^(1-p) phi)^2 - alpha phi_xx = 0`.

mod integrate;
mod symmetry;
mod wave;

pub use integrate::{
    integrate, integrate_with, linearized_evolution, solve_companion, stability_bound, Boundary,
    BoundaryFn, IntegrateOptions, Linearization, Stepper,
};
pub use symmetry::{translation_substitution_check, TranslationReport};
pub use wave::{travelling_wave_eval, travelling_wave_residual, TravellingWave};

use crate::error::{Error, Result};
use crate::fracops::{nonlocal_log_operator, FracOperator, Side, Terminal};
use crate::grid::{centered_derivative, second_difference, Field, Grid};
use crate::hopfcole::ModelParams;
use crate::trajectory::Trajectory;

/// The right-hand side prepared for one grid.
#[derive(Debug, Clone)]
pub struct FbennOperator {
    params: ModelParams,
    grid: Grid,
    grad: FracOperator,
    outer: FracOperator,
}

impl FbennOperator {
    pub fn new(grid: Grid, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params: *params,
            grid,
            grad: params.derivative(1.0 - params.p, grid)?,
            outer: params.derivative(params.p, grid)?,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `g = D^(1-p) phi`.
    pub fn gradient(&self, phi: &[f64]) -> Result<Vec<f64>> {
        self.grad.apply(phi)
    }

    /// `D^p f`.
    pub fn outer(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.outer.apply(f)
    }

    /// `-(1/2) D^p g^2`.
    pub fn nonlinear(&self, phi: &[f64]) -> Result<Vec<f64>> {
        let g = self.gradient(phi)?;
        let sq: Vec<f64> = g.iter().map(|v| v * v).collect();
        Ok(self.outer(&sq)?.into_iter().map(|v| -0.5 * v).collect())
    }

    pub fn rhs(&self, phi: &[f64]) -> Result<Vec<f64>> {
        let mut r = self.nonlinear(phi)?;
        let dd = second_difference(phi, self.grid.dx());
        for (ri, d) in r.iter_mut().zip(dd) {
            *ri += self.params.alpha * d;
        }
        Ok(r)
    }

    /// Explicit part of the exact tangent: `-D^p(g_bar D^(1-p) psi)`.
    pub fn tangent_nonlinear(&self, psi: &[f64], phi_bar: &[f64]) -> Result<Vec<f64>> {
        let gb = self.gradient(phi_bar)?;
        let gp = self.gradient(psi)?;
        let prod: Vec<f64> = gb.iter().zip(&gp).map(|(a, b)| a * b).collect();
        Ok(self.outer(&prod)?.into_iter().map(|v| -v).collect())
    }

    /// Explicit part of the printed linear equation: `-phi_bar_x D^(1-p) psi`.
    pub fn printed_linear_nonlinear(&self, psi: &[f64], phi_bar: &[f64]) -> Result<Vec<f64>> {
        let bx = centered_derivative(phi_bar, self.grid.dx());
        let gp = self.gradient(psi)?;
        Ok(bx.iter().zip(&gp).map(|(a, b)| -a * b).collect())
    }
}

fn check_same_grid(a: &Field, b: &Field) -> Result<()> {
    if !a.grid().matches(b.grid()) {
        return Err(Error::InvalidInput("fields live on different grids".into()));
    }
    Ok(())
}

/// `-(1/2) D^p (D^(1-p) phi)^2 + alpha phi_xx`.
pub fn fbenn_rhs(phi: &Field, params: &ModelParams) -> Result<Field> {
    let op = FbennOperator::new(*phi.grid(), params)?;
    phi.with_values(op.rhs(phi.values())?)
}

/// Right-hand side of the high-Reynolds limit, `-(1/2) D^p (D^(1-p) phi)^2`.
pub fn riemann_rhs(phi: &Field, params: &ModelParams) -> Result<Field> {
    let op = FbennOperator::new(*phi.grid(), params)?;
    phi.with_values(op.nonlinear(phi.values())?)
}

/// Right-hand side of the low-Reynolds limit, `alpha phi_xx`.
pub fn diffusive_rhs(phi: &Field, params: &ModelParams) -> Result<Field> {
    params.validate()?;
    let dd = second_difference(phi.values(), phi.grid().dx());
    phi.with_values(dd.into_iter().map(|v| params.alpha * v).collect())
}

/// Linear equation for perturbations as stated with the model:
/// `psi_t = -phi_bar_x D^(1-p) psi + alpha psi_xx`.
///
/// This agrees with the derivative of [`fbenn_rhs`] only at `p = 0`; see
/// [`tangent_rhs`] for the exact linearization at other orders.
pub fn linearized_rhs(psi: &Field, phi_bar: &Field, params: &ModelParams) -> Result<Field> {
    check_same_grid(psi, phi_bar)?;
    let op = FbennOperator::new(*psi.grid(), params)?;
    let mut r = op.printed_linear_nonlinear(psi.values(), phi_bar.values())?;
    let dd = second_difference(psi.values(), psi.grid().dx());
    for (ri, d) in r.iter_mut().zip(dd) {
        *ri += params.alpha * d;
    }
    psi.with_values(r)
}

/// Exact derivative of [`fbenn_rhs`] at `phi_bar` in the direction `psi`:
/// `-D^p(D^(1-p) phi_bar * D^(1-p) psi) + alpha psi_xx`.
pub fn tangent_rhs(psi: &Field, phi_bar: &Field, params: &ModelParams) -> Result<Field> {
    check_same_grid(psi, phi_bar)?;
    let op = FbennOperator::new(*psi.grid(), params)?;
    let mut r = op.tangent_nonlinear(psi.values(), phi_bar.values())?;
    let dd = second_difference(psi.values(), psi.grid().dx());
    for (ri, d) in r.iter_mut().zip(dd) {
        *ri += params.alpha * d;
    }
    psi.with_values(r)
}

/// Which end of the order range a weak-nonlocality expansion is taken at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeakSide {
    /// `p = eps`.
    NearZero,
    /// `p = 1 - eps`.
    NearOne,
}

fn log_operator_sided(f: &[f64], grid: &Grid, params: &ModelParams) -> Result<Vec<f64>> {
    let terminal_of = |default: f64| match params.terminal {
        Terminal::At(a) => a,
        _ => default,
    };
    match params.side {
        Side::Left => {
            let field = Field::new(*grid, f.to_vec(), 0.0)?;
            Ok(nonlocal_log_operator(&field, terminal_of(grid.x0()))?.into_values())
        }
        Side::Right => {
            // Reflect x -> -x so the right terminal becomes a left one.
            let rev: Vec<f64> = f.iter().rev().copied().collect();
            let rgrid = Grid::new(-grid.x_max(), grid.dx(), grid.n())?;
            let a = -terminal_of(grid.x_max());
            let field = Field::new(rgrid, rev, 0.0)?;
            let mut out = nonlocal_log_operator(&field, a)?.into_values();
            out.reverse();
            Ok(out)
        }
    }
}

/// Perturbative right-hand side near the integer orders.
///
/// `NearZero`: `-phi_x^2/2 + alpha phi_xx + eps [phi_x (N phi)_x - N(phi_x^2)/2]`.
/// `NearOne`: `-(phi^2/2)_x + alpha phi_xx + (1 - eps) [N(phi^2) - phi N(phi)]_x`,
/// with the `(1 - eps)` factor kept exactly as stated for this expansion.
pub fn weak_nonlocality_rhs(phi: &Field, params: &ModelParams, side: WeakSide, eps: f64) -> Result<Field> {
    params.validate()?;
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(Error::EpsOutOfRange(eps));
    }
    let grid = *phi.grid();
    let h = grid.dx();
    let v = phi.values();
    let dd = second_difference(v, h);
    let out: Vec<f64> = match side {
        WeakSide::NearZero => {
            let px = centered_derivative(v, h);
            let nphi = log_operator_sided(v, &grid, params)?;
            let nphi_x = centered_derivative(&nphi, h);
            let sq: Vec<f64> = px.iter().map(|x| x * x).collect();
            let nsq = log_operator_sided(&sq, &grid, params)?;
            (0..v.len())
                .map(|i| {
                    -0.5 * sq[i]
                        + params.alpha * dd[i]
                        + eps * (px[i] * nphi_x[i] - 0.5 * nsq[i])
                })
                .collect()
        }
        WeakSide::NearOne => {
            let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
            let sq_x = centered_derivative(&sq, h);
            let nsq = log_operator_sided(&sq, &grid, params)?;
            let nphi = log_operator_sided(v, &grid, params)?;
            let bracket: Vec<f64> = (0..v.len()).map(|i| nsq[i] - v[i] * nphi[i]).collect();
            let bx = centered_derivative(&bracket, h);
            (0..v.len())
                .map(|i| -0.5 * sq_x[i] + params.alpha * dd[i] + (1.0 - eps) * bx[i])
                .collect()
        }
    };
    phi.with_values(out)
}

/// Max `|phi_t - rhs(phi)|` over the interior band, on every slice with a
/// centered time difference.
pub fn fbenn_residual(traj: &Trajectory, params: &ModelParams) -> Result<f64> {
    if traj.len() < 2 {
        return Err(Error::InvalidInput("residual needs at least two slices".into()));
    }
    let grid = *traj.grid().unwrap();
    let op = FbennOperator::new(grid, params)?;
    let mut worst = 0.0f64;
    for k in traj.centered_slices() {
        let pt = traj.time_derivative(k).unwrap();
        let r = op.rhs(traj.slices()[k].values())?;
        for i in grid.interior() {
            worst = worst.max((pt[i] - r[i]).abs());
        }
    }
    Ok(worst)
}
