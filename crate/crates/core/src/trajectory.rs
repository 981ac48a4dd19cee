use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

/// Time-ordered field snapshots on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    times: Vec<f64>,
    slices: Vec<Field>,
}

impl Trajectory {
    pub fn new(slices: Vec<Field>) -> Result<Self> {
        let mut traj = Trajectory {
            times: Vec::with_capacity(slices.len()),
            slices: Vec::with_capacity(slices.len()),
        };
        for s in slices {
            traj.push(s)?;
        }
        Ok(traj)
    }

    /// Appends a slice; its time must exceed the last one and its grid must match.
    pub fn push(&mut self, slice: Field) -> Result<()> {
        if let Some(first) = self.slices.first() {
            if !first.grid().matches(slice.grid()) {
                return Err(Error::InvalidInput("trajectory slices must share one grid".into()));
            }
            let last = *self.times.last().unwrap();
            if !(slice.t() > last) {
                return Err(Error::InvalidInput(format!(
                    "times must increase strictly ({} after {last})",
                    slice.t()
                )));
            }
        }
        self.times.push(slice.t());
        self.slices.push(slice);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn slices(&self) -> &[Field] {
        &self.slices
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.slices.first().map(|s| s.grid())
    }

    pub fn first(&self) -> Option<&Field> {
        self.slices.first()
    }

    pub fn last(&self) -> Option<&Field> {
        self.slices.last()
    }

    /// True when both trajectories share grid and sample times.
    pub fn aligned_with(&self, other: &Trajectory) -> bool {
        self.len() == other.len()
            && match (self.grid(), other.grid()) {
                (Some(a), Some(b)) => a.matches(b),
                (None, None) => true,
                _ => false,
            }
            && self
                .times
                .iter()
                .zip(&other.times)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }

    /// Slices with a centered time difference, or all of them when there are
    /// fewer than three.
    pub(crate) fn centered_slices(&self) -> std::ops::Range<usize> {
        if self.len() >= 3 {
            1..self.len() - 1
        } else {
            0..self.len()
        }
    }

    /// Time derivative at slice `k`: centered inside, one-sided at the ends.
    pub(crate) fn time_derivative(&self, k: usize) -> Option<Vec<f64>> {
        let n = self.len();
        if n < 2 {
            return None;
        }
        let (i0, i1) = if k == 0 {
            (0, 1)
        } else if k == n - 1 {
            (n - 2, n - 1)
        } else {
            (k - 1, k + 1)
        };
        let dt = self.times[i1] - self.times[i0];
        let a = self.slices[i0].values();
        let b = self.slices[i1].values();
        Some(a.iter().zip(b).map(|(x, y)| (y - x) / dt).collect())
    }
}
