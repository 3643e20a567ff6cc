//! Initial states sampled from closed-form expressions in `x`, `y`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use nlqm_core::symbolic::{parse_expression, Coord, Factor, Poly};

use crate::field::WaveField;
use crate::grid::Grid2D;
use crate::SimError;

/// Which component of a symmetrized pair to sample.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Part {
    /// `f(x, y − d) + σ·f(y, x − d)`.
    #[default]
    Full,
    /// `f(x, y − d)`.
    Chi,
    /// `f(y, x − d)`.
    Phi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialSpec {
    ClosedForm { expr: String },
    SymmetrizedPair {
        f: String,
        d: f64,
        sigma: f64,
        #[serde(default)]
        part: Part,
    },
}

fn compile(src: &str) -> Result<Poly, SimError> {
    Ok(parse_expression(src).map_err(nlqm_core::symbolic::SymbolicError::from)?.to_poly()?)
}

fn eval_at(p: &Poly, x: f64, y: f64) -> Result<Complex64, SimError> {
    Ok(p.eval(&mut |f| match f {
        Factor::Coord(Coord::X) => Some(Complex64::new(x, 0.0)),
        Factor::Coord(Coord::Y) => Some(Complex64::new(y, 0.0)),
        _ => None,
    })?)
}

impl InitialSpec {
    pub fn sample(&self, grid: &Grid2D) -> Result<WaveField, SimError> {
        self.sample_shifted(grid, 0.0)
    }

    /// Samples `Ψ₀(x, y − dy)`.
    pub fn sample_shifted(&self, grid: &Grid2D, dy: f64) -> Result<WaveField, SimError> {
        let xs = grid.coords();
        let mut data = Vec::with_capacity(grid.len());
        match self {
            InitialSpec::ClosedForm { expr } => {
                let p = compile(expr)?;
                for &x in &xs {
                    for &y in &xs {
                        data.push(eval_at(&p, x, y - dy)?);
                    }
                }
            }
            InitialSpec::SymmetrizedPair { f, d, sigma, part } => {
                let p = compile(f)?;
                for &x in &xs {
                    for &y in &xs {
                        let y = y - dy;
                        let chi = || eval_at(&p, x, y - d);
                        let phi = || eval_at(&p, y, x - d);
                        data.push(match part {
                            Part::Full => chi()? + phi()? * *sigma,
                            Part::Chi => chi()?,
                            Part::Phi => phi()?,
                        });
                    }
                }
            }
        }
        let field = WaveField { grid: *grid, data };
        if !field.is_finite() {
            return Err(SimError::NonFinite { step: 0 });
        }
        Ok(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_direct_evaluation() {
        let g = Grid2D::new(32, 4.0).unwrap();
        let f = InitialSpec::ClosedForm { expr: "exp(-x^2 - y^2 - x*y)".into() }.sample(&g).unwrap();
        let (x, y) = (g.coord(5), g.coord(20));
        assert!((f.at(5, 20).re - (-x * x - y * y - x * y).exp()).abs() < 1e-15);
    }

    #[test]
    fn pair_parts_are_exchanges() {
        let g = Grid2D::new(32, 6.0).unwrap();
        let mk = |part, sigma| {
            InitialSpec::SymmetrizedPair { f: "exp(-x^2 - 2*y^2)".into(), d: 2.0, sigma, part }.sample(&g).unwrap()
        };
        let chi = mk(Part::Chi, 1.0);
        let phi = mk(Part::Phi, 1.0);
        assert_eq!(chi.exchanged(), phi);
        let full = mk(Part::Full, -1.0);
        assert!((full.at(3, 9) - (chi.at(3, 9) - phi.at(3, 9))).norm() < 1e-15);
    }

    #[test]
    fn unbound_parameter_is_an_error() {
        let g = Grid2D::new(32, 6.0).unwrap();
        assert!(InitialSpec::ClosedForm { expr: "exp(-b*x^2)".into() }.sample(&g).is_err());
    }
}
