//! Periodic square grid on `[−L, L)²`.

use serde::{Deserialize, Serialize};

use crate::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    /// Points per axis (power of two, at least 32).
    pub n: usize,
    /// Box half-width.
    pub l: f64,
}

impl Default for Grid2D {
    fn default() -> Self {
        Grid2D { n: 256, l: 12.0 }
    }
}

impl Grid2D {
    pub fn new(n: usize, l: f64) -> Result<Self, SimError> {
        let g = Grid2D { n, l };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.n < 32 || !self.n.is_power_of_two() {
            return Err(SimError::InvalidGrid(format!("N = {} must be a power of two ≥ 32", self.n)));
        }
        if !(self.l.is_finite() && self.l > 0.0) {
            return Err(SimError::InvalidGrid(format!("L = {} must be positive", self.l)));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    /// Cell area `h²`, the quadrature weight.
    pub fn cell(&self) -> f64 {
        self.h() * self.h()
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Coordinate of node `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.h()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    /// Angular wavenumber of FFT bin `i`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        let m = if i < self.n / 2 { i as f64 } else { i as f64 - self.n as f64 };
        m * std::f64::consts::PI / self.l
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    /// Largest resolved wavenumber `π/h`.
    pub fn k_max(&self) -> f64 {
        std::f64::consts::PI / self.h()
    }

    /// Flat index of node `(i, j)`; `i` runs along `x`, `j` along `y`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }
}
