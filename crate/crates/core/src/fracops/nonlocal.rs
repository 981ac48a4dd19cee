//! The logarithmic nonlocal operator `N f = -gamma f - int_a^x f'(s) ln(x - s) ds`.
//!
//! It is the first-order term of the Caputo derivative near order zero:
//! `D^eps f = f + eps N f + O(eps^2)` for fields that vanish at the terminal.

use crate::error::{Error, Result};
use crate::fracops::conv::CausalKernel;
use crate::fracops::weights::log_weights;
use crate::grid::Field;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Applies the log-kernel operator with left terminal `terminal <= x0`.
///
/// `f'` is taken piecewise constant per cell and the logarithm is integrated
/// exactly over each cell, so the rule is exact for piecewise-linear `f`.
/// Between the terminal and the grid `f` is extended by its first value and
/// contributes nothing.
pub fn nonlocal_log_operator(f: &Field, terminal: f64) -> Result<Field> {
    let grid = f.grid();
    if !(terminal <= grid.x0() + 1e-9 * grid.dx()) {
        return Err(Error::InvalidTerminal(format!(
            "terminal {terminal} lies inside the grid starting at {}",
            grid.x0()
        )));
    }
    let v = f.values();
    let n = v.len();
    let h = grid.dx();
    // Cell j contributes (f_{j+1} - f_j) * (ln h + W_{i-1-j}) to sample i.
    let mut e = vec![0.0; n];
    for m in 1..n {
        e[m] = v[m] - v[m - 1];
    }
    let lnh = h.ln();
    let kernel: Vec<f64> = log_weights(n).into_iter().map(|w| w + lnh).collect();
    let conv = CausalKernel::new(kernel).apply(&e);
    let out = v
        .iter()
        .zip(conv)
        .map(|(&fi, c)| -EULER_GAMMA * fi - c)
        .collect();
    f.with_values(out)
}
