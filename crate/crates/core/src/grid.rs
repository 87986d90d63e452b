use crate::error::{Error, Result};

/// Uniform grid `x_i = (i - n) dx`, `i = 0..=2n`, symmetric about a node at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dx: f64,
    n: usize,
}

pub const DEFAULT_DX: f64 = 1e-3;

impl Grid {
    /// The half-range is rounded up to a whole number of steps.
    pub fn new(x_max: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(Error::Domain(format!("grid step must be positive, got {dx}")));
        }
        if !(x_max > 0.0) || !x_max.is_finite() {
            return Err(Error::Domain(format!("grid half-range must be positive, got {x_max}")));
        }
        let n = (x_max / dx - 1e-9).ceil().max(1.0) as usize;
        Ok(Self { dx, n })
    }

    pub fn from_steps(n: usize, dx: f64) -> Self {
        assert!(n > 0 && dx > 0.0);
        Self { dx, n }
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Number of steps from the center to either edge.
    pub fn half_steps(&self) -> usize {
        self.n
    }

    pub fn x_max(&self) -> f64 {
        self.n as f64 * self.dx
    }

    /// Total node count, always odd.
    pub fn len(&self) -> usize {
        2 * self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn center(&self) -> usize {
        self.n
    }

    /// Coordinate of full-grid node `i`.
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - self.n as f64) * self.dx
    }

    /// Index of the node nearest to `x`, clamped to the grid.
    pub fn index_of(&self, x: f64) -> usize {
        let i = (x / self.dx).round() + self.n as f64;
        i.clamp(0.0, (2 * self.n) as f64) as usize
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.x(i))
    }
}
