//! Travelling-wave profiles `phi(x, t) = Phi(x - u t)`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::FbennOperator;
use crate::error::{Error, Result};
use crate::fracops::{Side, Terminal};
use crate::grid::{centered_derivative, second_difference, Grid};
use crate::hopfcole::ModelParams;

/// Closed-form travelling wave. Which constants matter depends on `p`:
/// `c` at `p = 0`, `c` and `a` in between, `c1` and `c2` (the far-field
/// values) at `p = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TravellingWave {
    pub p: f64,
    pub u: f64,
    pub alpha: f64,
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub a: f64,
}

impl TravellingWave {
    /// The `p = 1` front joining `phi2` (left) to `phi1` (right); its speed is the mean.
    pub fn burgers_front(phi1: f64, phi2: f64, alpha: f64) -> Self {
        Self {
            p: 1.0,
            u: 0.5 * (phi1 + phi2),
            alpha,
            c: 0.0,
            c1: phi1,
            c2: phi2,
            a: 0.0,
        }
    }

    /// The `p = 0` profile `2 u xi - 2 alpha log(exp(u (c + xi)/alpha) - 1)`.
    pub fn log_profile(u: f64, c: f64, alpha: f64) -> Self {
        Self {
            p: 0.0,
            u,
            alpha,
            c,
            c1: 0.0,
            c2: 0.0,
            a: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        ModelParams::new(self.alpha, self.p).map(|_| ())
    }

    pub fn eval(&self, xi: f64) -> Result<f64> {
        travelling_wave_eval(self, xi)
    }
}

/// Value of the profile at `xi = x - u t`.
pub fn travelling_wave_eval(tw: &TravellingWave, xi: f64) -> Result<f64> {
    tw.validate()?;
    let (p, u, alpha) = (tw.p, tw.u, tw.alpha);
    if p == 0.0 {
        let s = u * (tw.c + xi) / alpha;
        if !(s > 0.0) {
            return Err(Error::LogDomainViolation {
                x: xi,
                value: s.exp() - 1.0,
            });
        }
        // log(e^s - 1) = s + log(1 - e^-s)
        let log_term = s + (-(-s).exp_m1()).ln();
        Ok(2.0 * u * xi - 2.0 * alpha * log_term)
    } else if p == 1.0 {
        let d = tw.c2 - tw.c1;
        let z = d * xi / (2.0 * alpha);
        // Logistic written so neither branch overflows.
        let s = if z > 0.0 {
            let e = (-z).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + z.exp())
        };
        Ok(tw.c1 + d * s)
    } else {
        if !(xi > tw.a) {
            return Err(Error::SingularPoint { xi, terminal: tw.a });
        }
        let num = u * xi + p / alpha * u * u - (1.0 - p) * tw.c;
        Ok(-2.0 / gamma(2.0 - p) * num / (xi - tw.a).powf(p))
    }
}

/// Max residual of `(1/2) D^p (D^(1-p) Phi)^2 - alpha Phi'' - u Phi'` over the
/// interior band of `grid`, using the discrete operators of the solver.
///
/// Fractional profiles are measured with left derivatives from the wave's
/// terminal `a`; the grid must start at least ten cells beyond it.
pub fn travelling_wave_residual(tw: &TravellingWave, grid: &Grid) -> Result<f64> {
    tw.validate()?;
    let fractional = tw.p > 0.0 && tw.p < 1.0;
    if fractional && grid.x0() < tw.a + 10.0 * grid.dx() {
        return Err(Error::SingularPoint {
            xi: grid.x0(),
            terminal: tw.a,
        });
    }
    let terminal = if fractional {
        Terminal::At(tw.a)
    } else {
        Terminal::Unbounded
    };
    let params = ModelParams::new(tw.alpha, tw.p)?
        .with_side(Side::Left)
        .with_terminal(terminal);
    let phi = grid
        .xs()
        .into_iter()
        .map(|x| travelling_wave_eval(tw, x))
        .collect::<Result<Vec<f64>>>()?;
    let op = FbennOperator::new(*grid, &params)?;
    let nl = op.nonlinear(&phi)?;
    let h = grid.dx();
    let d1 = centered_derivative(&phi, h);
    let d2 = second_difference(&phi, h);
    Ok(grid.interior().fold(0.0f64, |m, i| {
        // nonlinear() is -(1/2) D^p g^2.
        let r = -nl[i] - tw.alpha * d2[i] - tw.u * d1[i];
        m.max(r.abs())
    }))
}
