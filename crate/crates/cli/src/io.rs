//! `x,t,phi` tables.
//!
//! Numbers are written in Rust's shortest round-trip form, so reading a
//! table back gives the same `f64` values bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use fracburgers::{Field, Grid};

use crate::CliError;

pub const HEADER: &str = "x,t,phi";

/// One row per sample, slices in order.
pub fn format_table(slices: &[Field]) -> String {
    let rows: usize = slices.iter().map(|s| s.values().len()).sum();
    let mut out = String::with_capacity(32 * (rows + 1));
    out.push_str(HEADER);
    out.push('\n');
    for s in slices {
        let g = s.grid();
        for (i, v) in s.values().iter().enumerate() {
            writeln!(out, "{:?},{:?},{:?}", g.x(i), s.t(), v).unwrap();
        }
    }
    out
}

pub fn write_table(path: &Path, slices: &[Field]) -> Result<(), CliError> {
    std::fs::write(path, format_table(slices))
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Parses a table into its slices.
pub fn parse_table(text: &str) -> Result<Vec<Field>, String> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => return Err(format!("first line must be `{HEADER}`")),
    }
    let mut groups: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let nums: Vec<f64> = cols
            .iter()
            .map(|c| c.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| format!("line {}: expected three numbers", i + 1))?;
        if nums.len() != 3 {
            return Err(format!("line {}: expected three numbers", i + 1));
        }
        match groups.last_mut() {
            Some((t, xs, vs)) if t.to_bits() == nums[1].to_bits() => {
                xs.push(nums[0]);
                vs.push(nums[2]);
            }
            _ => groups.push((nums[1], vec![nums[0]], vec![nums[2]])),
        }
    }
    if groups.is_empty() {
        return Err("no rows".into());
    }
    groups
        .into_iter()
        .map(|(t, xs, vs)| {
            let grid = grid_from_samples(&xs)?;
            Field::new(grid, vs, t).map_err(|e| e.to_string())
        })
        .collect()
}

/// Reads the first slice of a table.
pub fn read_first_slice(path: &Path) -> Result<Field, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut slices = parse_table(&text)?;
    Ok(slices.swap_remove(0))
}

/// The grid whose points are `xs`, exactly when some `dx` reproduces every
/// sample, otherwise the nearest uniform grid (within `1e-9 dx`).
pub fn grid_from_samples(xs: &[f64]) -> Result<Grid, String> {
    let n = xs.len();
    if n < 2 {
        return Err("a table slice needs at least two rows".into());
    }
    let x0 = xs[0];
    let estimate = (xs[n - 1] - x0) / (n - 1) as f64;
    if estimate.is_nan() || estimate <= 0.0 {
        return Err("x must increase".into());
    }
    let exact = |dx: f64| xs.iter().enumerate().all(|(i, &x)| x0 + i as f64 * dx == x);
    let mut lo = estimate;
    let mut hi = estimate;
    for _ in 0..64 {
        if exact(lo) {
            return Grid::new(x0, lo, n).map_err(|e| e.to_string());
        }
        if exact(hi) {
            return Grid::new(x0, hi, n).map_err(|e| e.to_string());
        }
        lo = f64::from_bits(lo.to_bits() - 1);
        hi = f64::from_bits(hi.to_bits() + 1);
    }
    let tol = 1e-9 * estimate;
    if xs.iter().enumerate().all(|(i, &x)| (x0 + i as f64 * estimate - x).abs() <= tol) {
        Grid::new(x0, estimate, n).map_err(|e| e.to_string())
    } else {
        Err("x is not uniformly spaced".into())
    }
}
