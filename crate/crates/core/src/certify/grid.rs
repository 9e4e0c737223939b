use std::fmt;

use crate::error::{Error, Result};
use crate::lifetime::Lifetime;

pub const DEFAULT_GRID_COUNT: usize = 2048;
pub const MIN_GRID_COUNT: usize = 16;

/// Ratio between the first and last point of a log-spaced grid.
pub const LOG_GRID_DECADES: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum GridPolicy {
    #[default]
    LogSpaced,
    Linear,
}

impl fmt::Display for GridPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridPolicy::LogSpaced => "log",
            GridPolicy::Linear => "linear",
        })
    }
}

/// Strictly increasing evaluation abscissae on `(0, x_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    policy: GridPolicy,
}

impl Grid {
    /// `count` points ending at `x_max`. Log-spaced grids start at
    /// `x_max * 1e-6`; linear grids at `x_max / count`.
    pub fn new(x_max: f64, count: usize, policy: GridPolicy) -> Result<Self> {
        if count < MIN_GRID_COUNT {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {MIN_GRID_COUNT} points, got {count}"
            )));
        }
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid upper end must be positive and finite, got {x_max}"
            )));
        }
        let last = (count - 1) as f64;
        let points = match policy {
            GridPolicy::LogSpaced => {
                let lo = (x_max * LOG_GRID_DECADES).ln();
                let hi = x_max.ln();
                (0..count)
                    .map(|k| {
                        if k == count - 1 {
                            x_max
                        } else {
                            (lo + (hi - lo) * k as f64 / last).exp()
                        }
                    })
                    .collect()
            }
            GridPolicy::Linear => (1..=count)
                .map(|k| x_max * k as f64 / count as f64)
                .collect(),
        };
        Ok(Self { points, policy })
    }

    /// Grid covering both distributions: `x_max` is the larger of the two
    /// `sf < 1e-6` points unless overridden.
    pub fn for_pair(
        f: &dyn Lifetime,
        g: &dyn Lifetime,
        count: usize,
        policy: GridPolicy,
        x_max: Option<f64>,
    ) -> Result<Self> {
        let x_max = x_max.unwrap_or_else(|| f.x_max().max(g.x_max()));
        Self::new(x_max, count, policy)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn policy(&self) -> GridPolicy {
        self.policy
    }

    pub fn x_min(&self) -> f64 {
        self.points[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.points.last().expect("grid is never empty")
    }

    pub fn summary(&self) -> GridSummary {
        GridSummary {
            policy: self.policy,
            count: self.len(),
            x_min: self.x_min(),
            x_max: self.x_max(),
        }
    }
}

/// Enough of a grid to reproduce it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSummary {
    pub policy: GridPolicy,
    pub count: usize,
    pub x_min: f64,
    pub x_max: f64,
}
