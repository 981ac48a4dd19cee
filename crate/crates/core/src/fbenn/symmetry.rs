//! The translation substitution `x -> x - A (t + B)`, `D^(1-p) phi -> D^(1-p) phi + A`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::fbenn_residual;
use crate::error::{Error, Result};
use crate::fracops::{Side, Terminal};
use crate::grid::Grid;
use crate::hopfcole::ModelParams;
use crate::trajectory::Trajectory;

/// Residuals before and after the substitution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslationReport {
    pub original: f64,
    pub substituted: f64,
}

impl TranslationReport {
    /// True when the substituted residual is at most `factor` times the
    /// original one (or both are at rounding level).
    pub fn within(&self, factor: f64) -> bool {
        self.substituted <= factor * self.original.max(1e-12)
    }
}

/// Cubic Lagrange interpolation of grid samples at `x`, or `None` off the grid.
fn interpolate(grid: &Grid, v: &[f64], x: f64) -> Option<f64> {
    let s = (x - grid.x0()) / grid.dx();
    let n = v.len();
    if s < -1e-9 || s > (n - 1) as f64 + 1e-9 {
        return None;
    }
    let j = (s.floor() as isize).clamp(1, n as isize - 3) as usize;
    let u = s - j as f64;
    let (f0, f1, f2, f3) = (v[j - 1], v[j], v[j + 1], v[j + 2]);
    // Nodes at -1, 0, 1, 2 relative to j.
    Some(
        -f0 * u * (u - 1.0) * (u - 2.0) / 6.0 + f1 * (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0
            - f2 * (u + 1.0) * u * (u - 2.0) / 2.0
            + f3 * (u + 1.0) * u * (u - 1.0) / 6.0,
    )
}

/// Builds the substituted trajectory
/// `phi(x - s A (t + B), t) + A lam^p I^(1-p)[1](x) - [p = 0] A^2 t / 2`,
/// with `s = +1` for left and `-1` for right derivatives, and returns the
/// residuals of both trajectories.
///
/// The substitution is an exact symmetry at `p = 0` and `p = 1`. Points of
/// the interior band whose shifted position leaves the grid are an error;
/// the boundary bands take the nearest end value instead.
pub fn translation_substitution_check(
    traj: &Trajectory,
    a_shift: f64,
    b_shift: f64,
    params: &ModelParams,
) -> Result<TranslationReport> {
    params.validate()?;
    let grid = *traj
        .grid()
        .ok_or_else(|| Error::InvalidInput("empty trajectory".into()))?;
    let p = params.p;
    let sigma = match params.side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    let terminal = match params.terminal {
        Terminal::At(a) => a,
        Terminal::Unbounded => match params.side {
            Side::Left => grid.x0(),
            Side::Right => grid.x_max(),
        },
        Terminal::Periodic => {
            return Err(Error::InvalidTerminal(
                "translation check needs a non-periodic terminal".into(),
            ))
        }
    };
    let ramp_scale = params.lam.powf(p) / gamma(2.0 - p);
    let ramp: Vec<f64> = grid
        .xs()
        .into_iter()
        .map(|x| {
            let d = match params.side {
                Side::Left => x - terminal,
                Side::Right => terminal - x,
            };
            ramp_scale * d.max(0.0).powf(1.0 - p)
        })
        .collect();
    let interior = grid.interior();
    let mut slices = Vec::with_capacity(traj.len());
    for s in traj.slices() {
        let t = s.t();
        let shift = sigma * a_shift * (t + b_shift);
        let v = s.values();
        let mut out = Vec::with_capacity(v.len());
        for (i, x) in grid.xs().into_iter().enumerate() {
            let base = match interpolate(&grid, v, x - shift) {
                Some(y) => y,
                None if interior.contains(&i) => {
                    return Err(Error::DomainExceeded(format!(
                        "shift {shift} moves x = {x} off the grid at t = {t}"
                    )))
                }
                None => {
                    if x - shift < grid.x0() {
                        v[0]
                    } else {
                        v[v.len() - 1]
                    }
                }
            };
            let mut val = base + a_shift * ramp[i];
            if p == 0.0 {
                val -= 0.5 * a_shift * a_shift * t;
            }
            out.push(val);
        }
        slices.push(s.with_values(out)?);
    }
    let substituted = Trajectory::new(slices)?;
    Ok(TranslationReport {
        original: fbenn_residual(traj, params)?,
        substituted: fbenn_residual(&substituted, params)?,
    })
}
