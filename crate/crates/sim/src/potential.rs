//! External potentials acting on the two-particle configuration.

use serde::{Deserialize, Serialize};

use crate::grid::Grid2D;
use crate::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    None,
    /// `λ(x₂ − x₀)²` on the second particle.
    Harmonic2 { lambda: f64, x0: f64 },
    /// `λ(V(x₂ − d) + V(x₁ − d))` with the bump `V(s) = (1 − (s/w)²)⁴` on `|s| < w`.
    Displaced { lambda: f64, width: f64, d: f64 },
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::None
    }
}

/// Compactly supported smooth bump of half-width `w`.
pub fn bump(s: f64, w: f64) -> f64 {
    let u = s / w;
    if u.abs() < 1.0 {
        (1.0 - u * u).powi(4)
    } else {
        0.0
    }
}

impl PotentialSpec {
    pub fn lambda(&self) -> f64 {
        match self {
            PotentialSpec::None => 0.0,
            PotentialSpec::Harmonic2 { lambda, .. } | PotentialSpec::Displaced { lambda, .. } => *lambda,
        }
    }

    /// Same potential with coupling `λ`; `None` is unchanged.
    pub fn with_lambda(&self, l: f64) -> Self {
        match *self {
            PotentialSpec::None => PotentialSpec::None,
            PotentialSpec::Harmonic2 { x0, .. } => PotentialSpec::Harmonic2 { lambda: l, x0 },
            PotentialSpec::Displaced { width, d, .. } => PotentialSpec::Displaced { lambda: l, width, d },
        }
    }

    pub fn validate(&self, grid: &Grid2D) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidParameter(m));
        match *self {
            PotentialSpec::None => Ok(()),
            PotentialSpec::Harmonic2 { lambda, x0 } => {
                if !lambda.is_finite() || !x0.is_finite() {
                    return bad("harmonic potential parameters must be finite".into());
                }
                if x0.abs() >= grid.l {
                    return bad(format!("x0 = {x0} lies outside the box"));
                }
                Ok(())
            }
            PotentialSpec::Displaced { lambda, width, d } => {
                if !lambda.is_finite() || !(width > 0.0) || !d.is_finite() {
                    return bad("displaced potential needs finite λ, d and positive width".into());
                }
                if d.abs() + width >= grid.l {
                    return bad(format!("bump at d = {d} with width {width} leaves the box"));
                }
                Ok(())
            }
        }
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        match *self {
            PotentialSpec::None => 0.0,
            PotentialSpec::Harmonic2 { lambda, x0 } => lambda * (y - x0) * (y - x0),
            PotentialSpec::Displaced { lambda, width, d } => lambda * (bump(y - d, width) + bump(x - d, width)),
        }
    }

    /// Values at every grid node, row-major.
    pub fn sample(&self, grid: &Grid2D) -> Vec<f64> {
        let xs = grid.coords();
        let mut v = Vec::with_capacity(grid.len());
        for &x in &xs {
            for &y in &xs {
                v.push(self.value(x, y));
            }
        }
        v
    }
}
