//! Sampled two-particle wavefunction.

use num_complex::Complex64;

use crate::grid::Grid2D;

#[derive(Clone, Debug, PartialEq)]
pub struct WaveField {
    pub grid: Grid2D,
    /// Row-major samples, `data[i·N + j] = Ψ(xᵢ, yⱼ)`.
    pub data: Vec<Complex64>,
}

impl WaveField {
    pub fn zeros(grid: Grid2D) -> Self {
        WaveField { grid, data: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for i in 0..grid.n {
            let x = grid.coord(i);
            for j in 0..grid.n {
                data.push(f(x, grid.coord(j)));
            }
        }
        WaveField { grid, data }
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[self.grid.index(i, j)]
    }

    /// `|Ψ|²` at every node.
    pub fn density(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn max_density(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max)
    }

    /// `∫|Ψ|²` by the rectangle rule.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell()
    }

    /// Largest density on the outermost ring of nodes divided by the peak.
    pub fn edge_ratio(&self) -> f64 {
        let n = self.grid.n;
        let mut edge: f64 = 0.0;
        for k in 0..n {
            for (i, j) in [(0, k), (n - 1, k), (k, 0), (k, n - 1)] {
                edge = edge.max(self.at(i, j).norm_sqr());
            }
        }
        let peak = self.max_density();
        if peak == 0.0 {
            0.0
        } else {
            edge / peak
        }
    }

    /// `Ψ(y, x)`.
    pub fn exchanged(&self) -> Self {
        let n = self.grid.n;
        let mut data = self.data.clone();
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = self.data[j * n + i];
            }
        }
        WaveField { grid: self.grid, data }
    }

    pub fn scale(&mut self, s: f64) {
        for z in &mut self.data {
            *z *= s;
        }
    }

    /// `(∫|a − b|²)^{1/2}`.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        let s: f64 = self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum();
        (s * self.grid.cell()).sqrt()
    }

    /// `(∫(|a| − |b|)²)^{1/2}`.
    pub fn modulus_l2_distance(&self, other: &Self) -> f64 {
        let s: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.norm() - b.norm()).powi(2))
            .sum();
        (s * self.grid.cell()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_norm_and_exchange() {
        let g = Grid2D::new(64, 8.0).unwrap();
        let f = WaveField::from_fn(g, |x, y| Complex64::new((-x * x - y * y - x * y).exp(), 0.0));
        // ∫e^{−2(x²+y²+xy)} = π/√3
        assert!((f.norm_sq() - std::f64::consts::PI / 3f64.sqrt()).abs() < 1e-12);
        assert!(f.edge_ratio() < 1e-30);
        let s = WaveField::from_fn(g, |x, y| Complex64::new(x + 2.0 * y, 0.0));
        assert_eq!(s.exchanged().at(3, 5), s.at(5, 3));
        assert_eq!(f.l2_distance(&f), 0.0);
    }
}
