//! Marginals, moments and region probabilities of a sampled state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::WaveField;
use crate::SimError;

/// Half-open interval `[lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, s: f64) -> bool {
        self.lo <= s && s < self.hi
    }
}

/// Integration region in configuration space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Region {
    #[default]
    All,
    /// `x₁ ∈ 𝒪`.
    First { o: Interval },
    /// `x₁ ∈ 𝒪 ∨ x₂ ∈ 𝒪`.
    Either { o: Interval },
    Rect { x: Interval, y: Interval },
}

impl Region {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Region::All => true,
            Region::First { o } => o.contains(x),
            Region::Either { o } => o.contains(x) || o.contains(y),
            Region::Rect { x: a, y: b } => a.contains(x) && b.contains(y),
        }
    }
}

/// Weight `w(x₁, x₂)` integrated against `|Ψ|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Weight {
    One,
    X1,
    X1Squared,
    X2,
    X2Squared,
    /// `e^{ikx₁}`; `k` must be a multiple of `π/L`.
    Fourier { k: f64 },
}

/// `ρ₁(xᵢ) = Σⱼ |Ψ(xᵢ, yⱼ)|² h`.
pub fn marginal_density(psi: &WaveField) -> Vec<f64> {
    let g = psi.grid;
    (0..g.n)
        .map(|i| (0..g.n).map(|j| psi.at(i, j).norm_sqr()).sum::<f64>() * g.h())
        .collect()
}

/// `∫_region w |Ψ|²`.
pub fn moment(psi: &WaveField, weight: Weight, region: Region) -> Result<Complex64, SimError> {
    let g = psi.grid;
    if let Weight::Fourier { k } = weight {
        let m = k * g.l / std::f64::consts::PI;
        if !k.is_finite() || (m - m.round()).abs() > 1e-9 {
            return Err(SimError::InvalidParameter(format!("k = {k} is not a multiple of π/L")));
        }
    }
    let xs = g.coords();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &x) in xs.iter().enumerate() {
        let w = match weight {
            Weight::One | Weight::X2 | Weight::X2Squared => Complex64::new(1.0, 0.0),
            Weight::X1 => Complex64::new(x, 0.0),
            Weight::X1Squared => Complex64::new(x * x, 0.0),
            Weight::Fourier { k } => Complex64::new(0.0, k * x).exp(),
        };
        let mut row = 0.0;
        for (j, &y) in xs.iter().enumerate() {
            if region.contains(x, y) {
                let r = psi.at(i, j).norm_sqr();
                row += match weight {
                    Weight::X2 => y * r,
                    Weight::X2Squared => y * y * r,
                    _ => r,
                };
            }
        }
        acc += w * row;
    }
    Ok(acc * g.cell())
}

/// `∫_region |Ψ|²`.
pub fn region_probability(psi: &WaveField, region: Region) -> f64 {
    moment(psi, Weight::One, region).expect("unit weight is always valid").re
}
