//! Two-dimensional FFTs and spectral derivatives.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid2D;

/// Forward/inverse plans for one grid size plus cached wavenumbers.
#[derive(Clone)]
pub struct Spectral {
    grid: Grid2D,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: Grid2D) -> Self {
        let mut planner = FftPlanner::new();
        Spectral {
            grid,
            forward: planner.plan_fft_forward(grid.n),
            inverse: planner.plan_fft_inverse(grid.n),
            k: grid.wavenumbers(),
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    fn rows(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n;
        data.par_chunks_mut(n * 8).for_each(|block| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
            plan.process_with_scratch(block, &mut scratch);
        });
    }

    fn transpose(&self, data: &mut [Complex64]) {
        let n = self.grid.n;
        for i in 0..n {
            for j in (i + 1)..n {
                data.swap(i * n + j, j * n + i);
            }
        }
    }

    fn apply(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        self.rows(data, plan);
        self.transpose(data);
        self.rows(data, plan);
        self.transpose(data);
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(data, &self.forward);
    }

    /// Inverse transform in place, including the `1/N²` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(data, &self.inverse);
        let s = 1.0 / self.grid.len() as f64;
        data.par_iter_mut().for_each(|z| *z *= s);
    }

    /// Multiplies a spectrum by `m(kx, ky)`.
    pub fn multiply(&self, spectrum: &mut [Complex64], m: impl Fn(f64, f64) -> Complex64 + Sync) {
        let n = self.grid.n;
        let k = &self.k;
        spectrum.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, z) in row.iter_mut().enumerate() {
                *z *= m(k[i], k[j]);
            }
        });
    }

    fn nyquist(&self, i: usize) -> bool {
        i == self.grid.n / 2
    }

    /// `(∂ₓf, ∂ᵧf, Δf)` from the spectrum of `f`; odd derivatives drop the
    /// Nyquist mode.
    pub fn derivatives_from_spectrum(&self, spectrum: &[Complex64]) -> [Vec<Complex64>; 3] {
        let n = self.grid.n;
        let k = &self.k;
        let mut dx = spectrum.to_vec();
        let mut dy = spectrum.to_vec();
        let mut lap = spectrum.to_vec();
        let i_unit = Complex64::new(0.0, 1.0);
        for i in 0..n {
            for j in 0..n {
                let idx = i * n + j;
                dx[idx] *= if self.nyquist(i) { Complex64::new(0.0, 0.0) } else { i_unit * k[i] };
                dy[idx] *= if self.nyquist(j) { Complex64::new(0.0, 0.0) } else { i_unit * k[j] };
                lap[idx] *= -(k[i] * k[i] + k[j] * k[j]);
            }
        }
        self.inverse(&mut dx);
        self.inverse(&mut dy);
        self.inverse(&mut lap);
        [dx, dy, lap]
    }

    /// `(∂ₓf, ∂ᵧf, Δf)` of a field.
    pub fn derivatives(&self, f: &[Complex64]) -> [Vec<Complex64>; 3] {
        let mut s = f.to_vec();
        self.forward(&mut s);
        self.derivatives_from_spectrum(&s)
    }

    /// `Δf`.
    pub fn laplacian(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut s = f.to_vec();
        self.forward(&mut s);
        self.multiply(&mut s, |kx, ky| Complex64::new(-(kx * kx + ky * ky), 0.0));
        self.inverse(&mut s);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(g: &Grid2D) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); g.len()];
        for i in 0..g.n {
            for j in 0..g.n {
                let (x, y) = (g.coord(i), g.coord(j));
                v[g.index(i, j)] = Complex64::new((-x * x - y * y - x * y).exp(), 0.0);
            }
        }
        v
    }

    #[test]
    fn round_trip_is_identity() {
        let g = Grid2D::new(64, 8.0).unwrap();
        let s = Spectral::new(g);
        let f = gaussian(&g);
        let mut h = f.clone();
        s.forward(&mut h);
        s.inverse(&mut h);
        let err = f.iter().zip(&h).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-14);
    }

    #[test]
    fn derivatives_of_gaussian_are_spectrally_accurate() {
        let g = Grid2D::new(64, 8.0).unwrap();
        let s = Spectral::new(g);
        let f = gaussian(&g);
        let [dx, dy, lap] = s.derivatives(&f);
        let mut err: f64 = 0.0;
        for i in 0..g.n {
            for j in 0..g.n {
                let (x, y) = (g.coord(i), g.coord(j));
                let e = (-x * x - y * y - x * y).exp();
                let (gx, gy) = (-2.0 * x - y, -2.0 * y - x);
                let k = g.index(i, j);
                err = err.max((dx[k].re - gx * e).abs());
                err = err.max((dy[k].re - gy * e).abs());
                err = err.max((lap[k].re - (gx * gx + gy * gy - 4.0) * e).abs());
            }
        }
        assert!(err < 1e-11, "{err}");
    }
}
