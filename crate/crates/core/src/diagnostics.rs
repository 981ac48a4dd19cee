//! Conservation monitors, energy, the Reynolds number, asymptotic fits and
//! coefficient normalization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::{Side, Terminal};
use crate::grid::{centered_derivative, trapezoid, Field};
use crate::hopfcole::ModelParams;
use crate::trajectory::Trajectory;

/// Relative size the gradient may keep at the ends for the decay conditions.
pub const DECAY_TOLERANCE: f64 = 1e-6;

fn gradient(phi: &Field, params: &ModelParams) -> Result<Vec<f64>> {
    params.derivative(1.0 - params.p, *phi.grid())?.apply(phi.values())
}

/// Whether `D^(1-p) phi` and its derivative vanish at both ends.
///
/// The conditions are read at the outermost samples of the interior: the end
/// bands carry one-sided stencil errors that do not shrink under refinement.
pub fn decay_conditions_hold(phi: &Field, params: &ModelParams) -> Result<bool> {
    let g = gradient(phi, params)?;
    let gx = centered_derivative(&g, phi.grid().dx());
    let inner = phi.grid().interior();
    let tol_g = DECAY_TOLERANCE * crate::grid::sup_norm(&g).max(f64::MIN_POSITIVE);
    let tol_gx = DECAY_TOLERANCE * crate::grid::sup_norm(&gx).max(f64::MIN_POSITIVE);
    Ok([inner.start, inner.end - 1]
        .iter()
        .all(|&i| g[i].abs() <= tol_g && gx[i].abs() <= tol_gx))
}

/// `integral of D^(1-p) phi dx` over the grid; the endpoint difference at `p = 0`.
///
/// The integrand depends on `p` only, so `_q_order` (the diffusion order of the
/// two-order variant) does not enter.
pub fn mass_invariant(phi: &Field, params: &ModelParams, _q_order: f64) -> Result<f64> {
    params.validate()?;
    if params.p == 0.0 {
        let v = phi.values();
        let d = v[v.len() - 1] - v[0];
        return Ok(match params.side {
            Side::Left => d,
            // D^1 from the right is -d/dx.
            Side::Right => -d,
        });
    }
    Ok(trapezoid(&gradient(phi, params)?, phi.grid().dx()))
}

/// `K = (1/2) integral of (D^(1-p) phi)^2 dx`.
pub fn energy(phi: &Field, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let g = gradient(phi, params)?;
    let sq: Vec<f64> = g.iter().map(|v| v * v).collect();
    Ok(0.5 * trapezoid(&sq, phi.grid().dx()))
}

/// `alpha integral of (D^(2-p) phi)^2 dx`, the rate at which `K` decreases.
pub fn dissipation_rate(phi: &Field, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let h = phi.grid().dx();
    let g = gradient(phi, params)?;
    let gx: Vec<f64> = centered_derivative(&g, h).into_iter().map(|v| v * v).collect();
    Ok(params.alpha * trapezoid(&gx, h))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    /// Largest `|I(t) - I(0)| / |I(0)|` (absolute when `I(0) = 0`).
    pub mass_drift: f64,
    /// `K(t_{k+1}) <= K(t_k) + 1e-12 K(0)` for every pair of slices.
    pub energy_monotone: bool,
    /// Decay conditions held on every slice; the invariants are only
    /// meaningful when they do.
    pub decay_ok: bool,
}

pub fn conservation_report(traj: &Trajectory, params: &ModelParams) -> Result<ConservationReport> {
    if traj.is_empty() {
        return Err(Error::InvalidInput("empty trajectory".into()));
    }
    let mut mass = Vec::with_capacity(traj.len());
    let mut en = Vec::with_capacity(traj.len());
    let mut decay_ok = true;
    for s in traj.slices() {
        mass.push(mass_invariant(s, params, params.p)?);
        en.push(energy(s, params)?);
        decay_ok &= decay_conditions_hold(s, params)?;
    }
    let m0 = mass[0];
    let denom = if m0 != 0.0 { m0.abs() } else { 1.0 };
    let mass_drift = mass.iter().map(|m| (m - m0).abs() / denom).fold(0.0, f64::max);
    let slack = 1e-12 * en[0];
    let energy_monotone = en.windows(2).all(|w| w[1] <= w[0] + slack);
    Ok(ConservationReport {
        times: traj.times().to_vec(),
        mass,
        energy: en,
        mass_drift,
        energy_monotone,
        decay_ok,
    })
}

/// `Re = phi x^p / (alpha lam^(1+p))`.
pub fn reynolds_number(phi_scale: f64, x_scale: f64, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    if !(phi_scale > 0.0 && x_scale > 0.0) || !phi_scale.is_finite() || !x_scale.is_finite() {
        return Err(Error::InvalidInput(format!(
            "scales must be positive (phi = {phi_scale}, x = {x_scale})"
        )));
    }
    let p = params.p;
    Ok(phi_scale * x_scale.powf(p) / (params.alpha * params.lam.powf(1.0 + p)))
}

/// Fitted exponents of the large-time form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    /// Slope of `log |phi|` against `log (x - a)` on the final slice.
    pub exponent_x: f64,
    /// Slope of `log max phi` against `log t`.
    pub exponent_t: f64,
    /// `sqrt(2 I t)` at the final time, the predicted front position.
    pub front: f64,
}

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Log-log fits of the ramp `phi ~ (x - a)^(2-p) / t` and of the peak decay
/// `max phi ~ t^(-p/2)`.
///
/// The peak is fitted over slices with `t` in `[T/10, T]`, which must span a
/// decade; the ramp over `x - a` in `[10 dx, x0/2]` on the last slice, where
/// `x0 = sqrt(2 I T)`.
pub fn asymptotic_profile_fit(traj: &Trajectory, params: &ModelParams) -> Result<AsymptoticFit> {
    params.validate()?;
    let last = traj
        .last()
        .ok_or_else(|| Error::InvalidInput("empty trajectory".into()))?;
    let grid = *last.grid();
    let t_end = last.t();
    let (ts, peaks): (Vec<f64>, Vec<f64>) = traj
        .slices()
        .iter()
        .filter(|s| s.t() > 0.0 && s.t() >= t_end / 10.0 * (1.0 - 1e-9))
        .map(|s| (s.t(), s.values().iter().copied().fold(f64::NEG_INFINITY, f64::max)))
        .unzip();
    if ts.len() < 3 || ts[ts.len() - 1] / ts[0] < 10.0 * (1.0 - 1e-9) {
        return Err(Error::FitUnreliable(
            "peak fit needs at least three slices spanning a decade in t".into(),
        ));
    }
    if peaks.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::FitUnreliable("peak must stay positive".into()));
    }
    let lt: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let lp: Vec<f64> = peaks.iter().map(|m| m.ln()).collect();
    let exponent_t = slope(&lt, &lp);

    let mass = mass_invariant(last, params, params.p)?;
    if !(mass > 0.0) {
        return Err(Error::FitUnreliable(format!("invariant {mass} must be positive")));
    }
    let front = (2.0 * mass * t_end).sqrt();
    let (terminal, sign) = match (params.side, params.terminal) {
        (_, Terminal::Periodic) => {
            return Err(Error::InvalidTerminal("asymptotic fit needs an end terminal".into()))
        }
        (Side::Left, Terminal::At(a)) => (a, 1.0),
        (Side::Left, Terminal::Unbounded) => (grid.x0(), 1.0),
        (Side::Right, Terminal::At(b)) => (b, -1.0),
        (Side::Right, Terminal::Unbounded) => (grid.x_max(), -1.0),
    };
    let lo = 10.0 * grid.dx();
    let hi = front / 2.0;
    let (lx, lphi): (Vec<f64>, Vec<f64>) = grid
        .xs()
        .into_iter()
        .zip(last.values())
        .filter_map(|(x, &v)| {
            let d = sign * (x - terminal);
            (d >= lo && d <= hi && v != 0.0).then(|| (d.ln(), v.abs().ln()))
        })
        .unzip();
    if lx.len() < 5 {
        return Err(Error::FitUnreliable(format!(
            "ramp window [{lo}, {hi}] holds only {} points",
            lx.len()
        )));
    }
    Ok(AsymptoticFit {
        exponent_x: slope(&lx, &lphi),
        exponent_t,
        front,
    })
}

/// Coefficients of `phi_t + (alpha_nl / 2) D^p (D^(1-p) phi)^2 - beta phi_xx = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawCoefficients {
    pub alpha_nl: f64,
    pub beta: f64,
}

/// Scales `(scale_phi, scale_t) = (beta / alpha_nl, 1 / beta)` with
/// `phi = scale_phi Phi` and `t = scale_t tau`, where `Phi(x, tau)` solves
/// the equation with unit coefficients.
pub fn normalize(raw: &RawCoefficients) -> Result<(f64, f64)> {
    if !(raw.beta > 0.0 && raw.beta.is_finite()) {
        return Err(Error::InvalidInput(format!("beta = {} must be positive", raw.beta)));
    }
    if raw.alpha_nl == 0.0 || !raw.alpha_nl.is_finite() {
        return Err(Error::Degenerate(
            "zero nonlinear coefficient leaves a linear equation".into(),
        ));
    }
    Ok((raw.beta / raw.alpha_nl, 1.0 / raw.beta))
}

/// Maps a raw-coefficient field to the unit-coefficient variables.
pub fn to_normalized(phi: &Field, raw: &RawCoefficients) -> Result<Field> {
    let (sp, st) = normalize(raw)?;
    phi.map(|v| v / sp)?.with_time(phi.t() / st)
}

/// Inverse of [`to_normalized`].
pub fn from_normalized(phi: &Field, raw: &RawCoefficients) -> Result<Field> {
    let (sp, st) = normalize(raw)?;
    phi.map(|v| v * sp)?.with_time(phi.t() * st)
}
