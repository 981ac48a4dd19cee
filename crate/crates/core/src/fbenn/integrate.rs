//! IMEX time stepping: Crank-Nicolson diffusion, Adams-Bashforth nonlinearity.

use std::fmt;
use std::sync::Arc;

use super::FbennOperator;
use crate::error::{Error, Result};
use crate::grid::{centered_derivative, sup_norm, Field};
use crate::hopfcole::ModelParams;
use crate::trajectory::Trajectory;

/// Time-dependent Dirichlet values `(left, right)`.
pub type BoundaryFn = Arc<dyn Fn(f64) -> Result<(f64, f64)> + Send + Sync>;

/// How the two end values are set at each step.
#[derive(Clone, Default)]
pub enum Boundary {
    /// Hold the initial end values.
    #[default]
    Pinned,
    /// Follow a known trace, typically an exact solution.
    Trace(BoundaryFn),
}

impl fmt::Debug for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Pinned => f.write_str("Pinned"),
            Boundary::Trace(_) => f.write_str("Trace(..)"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct IntegrateOptions {
    pub boundary: Boundary,
    /// Keep every `save_every`-th step; 0 keeps only the first and last slices.
    pub save_every: usize,
    /// Drop the nonlinear term, leaving the heat equation on the same scheme.
    pub diffusion_only: bool,
}

impl IntegrateOptions {
    pub fn every_step() -> Self {
        Self {
            save_every: 1,
            ..Self::default()
        }
    }
}

/// Largest step accepted for spacing `dx`: `0.25 dx^2 / alpha`.
pub fn stability_bound(dx: f64, alpha: f64) -> f64 {
    0.25 * dx * dx / alpha
}

fn check_step(dt: f64, dx: f64, alpha: f64) -> Result<()> {
    let bound = stability_bound(dx, alpha);
    if !(dt > 0.0 && dt.is_finite()) || dt > bound {
        return Err(Error::InvalidStep { dt, bound });
    }
    Ok(())
}

fn step_count(t_end: f64, dt: f64) -> Result<usize> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidTime(t_end));
    }
    Ok(((t_end / dt - 1e-9).ceil() as usize).max(1))
}

/// Crank-Nicolson matrix with Dirichlet end rows, factored once.
#[derive(Debug, Clone)]
struct Imex {
    r: f64,
    dt: f64,
    cprime: Vec<f64>,
    inv_denom: Vec<f64>,
}

impl Imex {
    fn new(n: usize, alpha: f64, dx: f64, dt: f64) -> Self {
        let r = alpha * dt / (2.0 * dx * dx);
        let mut cprime = vec![0.0; n];
        let mut inv_denom = vec![1.0; n];
        for i in 1..n - 1 {
            let denom = (1.0 + 2.0 * r) + r * cprime[i - 1];
            inv_denom[i] = 1.0 / denom;
            cprime[i] = -r / denom;
        }
        Self {
            r,
            dt,
            cprime,
            inv_denom,
        }
    }

    /// Advances `u` by one step with explicit increment `explicit`.
    fn step(&self, u: &[f64], explicit: &[f64], ends: (f64, f64)) -> Vec<f64> {
        let n = u.len();
        let r = self.r;
        let mut d = vec![0.0; n];
        d[0] = ends.0;
        for i in 1..n - 1 {
            let rhs = u[i] + r * (u[i - 1] - 2.0 * u[i] + u[i + 1]) + self.dt * explicit[i];
            d[i] = (rhs + r * d[i - 1]) * self.inv_denom[i];
        }
        d[n - 1] = ends.1;
        for i in (1..n - 1).rev() {
            d[i] -= self.cprime[i] * d[i + 1];
        }
        d
    }
}

/// Second-order Adams-Bashforth combination, Euler on the first call.
#[derive(Debug, Clone, Default)]
struct Ab2 {
    prev: Option<Vec<f64>>,
}

impl Ab2 {
    fn combine(&mut self, cur: Vec<f64>) -> Vec<f64> {
        let out = match &self.prev {
            None => cur.clone(),
            Some(p) => cur.iter().zip(p).map(|(c, p)| 1.5 * c - 0.5 * p).collect(),
        };
        self.prev = Some(cur);
        out
    }
}

fn blow_up_check(next: &[f64], prev_norm: f64, ends: (f64, f64), t: f64) -> Result<f64> {
    let norm = sup_norm(next);
    let base = prev_norm.max(ends.0.abs()).max(ends.1.abs()).max(f64::MIN_POSITIVE);
    if !norm.is_finite() || next.iter().any(|v| !v.is_finite()) || norm > 10.0 * base {
        return Err(Error::BlowUp {
            t,
            from: prev_norm,
            to: norm,
        });
    }
    Ok(norm)
}

fn ends_at(boundary: &Boundary, pinned: (f64, f64), t: f64) -> Result<(f64, f64)> {
    match boundary {
        Boundary::Pinned => Ok(pinned),
        Boundary::Trace(f) => f(t),
    }
}

/// Single-step driver for the nonlinear equation.
#[derive(Debug, Clone)]
pub struct Stepper {
    op: FbennOperator,
    imex: Imex,
    ab2: Ab2,
    phi: Vec<f64>,
    norm: f64,
    t0: f64,
    k: usize,
    boundary: Boundary,
    pinned: (f64, f64),
    diffusion_only: bool,
}

impl Stepper {
    pub fn new(phi0: &Field, params: &ModelParams, dt: f64, boundary: Boundary) -> Result<Self> {
        params.validate()?;
        let grid = *phi0.grid();
        check_step(dt, grid.dx(), params.alpha)?;
        let v = phi0.values().to_vec();
        Ok(Self {
            op: FbennOperator::new(grid, params)?,
            imex: Imex::new(grid.n(), params.alpha, grid.dx(), dt),
            ab2: Ab2::default(),
            norm: sup_norm(&v),
            pinned: (v[0], v[v.len() - 1]),
            phi: v,
            t0: phi0.t(),
            k: 0,
            boundary,
            diffusion_only: false,
        })
    }

    pub fn diffusion_only(mut self, on: bool) -> Self {
        self.diffusion_only = on;
        self
    }

    pub fn dt(&self) -> f64 {
        self.imex.dt
    }

    pub fn time(&self) -> f64 {
        self.t0 + self.k as f64 * self.imex.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.phi
    }

    pub fn field(&self) -> Result<Field> {
        Field::new(*self.op.grid(), self.phi.clone(), self.time())
    }

    pub fn step(&mut self) -> Result<()> {
        let explicit = if self.diffusion_only {
            vec![0.0; self.phi.len()]
        } else {
            self.ab2.combine(self.op.nonlinear(&self.phi)?)
        };
        let t_next = self.t0 + (self.k + 1) as f64 * self.imex.dt;
        let ends = ends_at(&self.boundary, self.pinned, t_next)?;
        let next = self.imex.step(&self.phi, &explicit, ends);
        self.norm = blow_up_check(&next, self.norm, ends, t_next)?;
        self.phi = next;
        self.k += 1;
        Ok(())
    }
}

/// Runs `steps` steps of `advance`, recording slices per `save_every`.
fn record(
    first: Field,
    steps: usize,
    save_every: usize,
    t0: f64,
    t_end: f64,
    mut advance: impl FnMut() -> Result<Vec<f64>>,
) -> Result<Trajectory> {
    let mut traj = Trajectory::new(vec![first.clone()])?;
    for k in 1..=steps {
        let v = advance()?;
        let keep = k == steps || (save_every > 0 && k % save_every == 0);
        if keep {
            let t = if k == steps {
                t0 + t_end
            } else {
                t0 + t_end * k as f64 / steps as f64
            };
            traj.push(first.with_values(v)?.with_time(t)?)?;
        }
    }
    Ok(traj)
}

/// Integrates from `phi0` over `t_end` with the default options.
pub fn integrate(phi0: &Field, params: &ModelParams, t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate_with(phi0, params, t_end, dt, &IntegrateOptions::default())
}

/// Integrates from `phi0` over `t_end`.
///
/// The requested `dt` must satisfy [`stability_bound`]; the step actually
/// taken is `t_end / ceil(t_end / dt)` so the run lands on `t_end` exactly.
pub fn integrate_with(
    phi0: &Field,
    params: &ModelParams,
    t_end: f64,
    dt: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    params.validate()?;
    check_step(dt, phi0.grid().dx(), params.alpha)?;
    let steps = step_count(t_end, dt)?;
    let mut stepper = Stepper::new(phi0, params, t_end / steps as f64, opts.boundary.clone())?
        .diffusion_only(opts.diffusion_only);
    record(phi0.clone(), steps, opts.save_every, phi0.t(), t_end, || {
        stepper.step()?;
        Ok(stepper.values().to_vec())
    })
}

/// Which linear equation [`linearized_evolution`] advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Linearization {
    /// `psi_t = -phi_bar_x D^(1-p) psi + alpha psi_xx`.
    #[default]
    Printed,
    /// The exact tangent of the nonlinear right-hand side.
    Exact,
}

/// Advances a perturbation `psi` along the base flow started at `phi_bar0`.
///
/// Both fields use the scheme of [`integrate_with`]; `psi` keeps its initial
/// end values and the base flow follows `opts.boundary`.
pub fn linearized_evolution(
    psi0: &Field,
    phi_bar0: &Field,
    params: &ModelParams,
    t_end: f64,
    dt: f64,
    form: Linearization,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if !psi0.grid().matches(phi_bar0.grid()) {
        return Err(Error::InvalidInput("fields live on different grids".into()));
    }
    params.validate()?;
    let grid = *psi0.grid();
    check_step(dt, grid.dx(), params.alpha)?;
    let steps = step_count(t_end, dt)?;
    let dt = t_end / steps as f64;
    let mut base = Stepper::new(phi_bar0, params, dt, opts.boundary.clone())?;
    let op = base.op.clone();
    let imex = base.imex.clone();
    let mut ab2 = Ab2::default();
    let mut psi = psi0.values().to_vec();
    let ends = (psi[0], psi[psi.len() - 1]);
    let mut norm = sup_norm(&psi);
    let t0 = psi0.t();
    let mut k = 0usize;
    record(psi0.clone(), steps, opts.save_every, t0, t_end, || {
        let e = match form {
            Linearization::Printed => op.printed_linear_nonlinear(&psi, base.values())?,
            Linearization::Exact => op.tangent_nonlinear(&psi, base.values())?,
        };
        let explicit = ab2.combine(e);
        k += 1;
        let next = imex.step(&psi, &explicit, ends);
        norm = blow_up_check(&next, norm, ends, t0 + k as f64 * dt)?;
        psi = next;
        base.step()?;
        Ok(psi.clone())
    })
}

/// Solves the companion equation `u_t = -(D^(1-p) v) u_x + alpha u_xx` for a
/// given solution `v(t)`, sampled on `u0`'s grid by `v_at`.
pub fn solve_companion(
    u0: &Field,
    v_at: impl Fn(f64) -> Result<Vec<f64>>,
    params: &ModelParams,
    t_end: f64,
    dt: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    params.validate()?;
    let grid = *u0.grid();
    check_step(dt, grid.dx(), params.alpha)?;
    let steps = step_count(t_end, dt)?;
    let dt = t_end / steps as f64;
    let op = FbennOperator::new(grid, params)?;
    let imex = Imex::new(grid.n(), params.alpha, grid.dx(), dt);
    let mut ab2 = Ab2::default();
    let mut u = u0.values().to_vec();
    let pinned = (u[0], u[u.len() - 1]);
    let mut norm = sup_norm(&u);
    let t0 = u0.t();
    let mut k = 0usize;
    record(u0.clone(), steps, opts.save_every, t0, t_end, || {
        let t = t0 + k as f64 * dt;
        let v = v_at(t)?;
        if v.len() != u.len() {
            return Err(Error::InvalidInput("companion source has the wrong length".into()));
        }
        let g = op.gradient(&v)?;
        let ux = centered_derivative(&u, grid.dx());
        let explicit = ab2.combine(g.iter().zip(&ux).map(|(a, b)| -a * b).collect());
        k += 1;
        let t_next = t0 + k as f64 * dt;
        let ends = ends_at(&opts.boundary, pinned, t_next)?;
        let next = imex.step(&u, &explicit, ends);
        norm = blow_up_check(&next, norm, ends, t_next)?;
        u = next;
        Ok(u.clone())
    })
}
