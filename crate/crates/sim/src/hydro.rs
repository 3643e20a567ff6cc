//! Numeric `R[Ψ]` from spectral derivatives of the sampled field.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nlqm_core::models::RFunctional;

use crate::field::WaveField;
use crate::spectral::Spectral;
use crate::SimError;

/// Default density floor relative to the peak density. Spectral
/// derivatives keep full relative accuracy down to amplitudes near `10⁻⁸` of
/// the peak; below the floor the nonlinear term is switched off.
pub const DEFAULT_FLOOR_REL: f64 = 1e-16;

/// What to do where `ρ` falls below the floor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FloorPolicy {
    /// Zero the quotient terms there (clamp `ln ρ` at the floor) and count the nodes.
    #[default]
    Suppress,
    /// Fail with the first offending node.
    Error,
}

/// `ρ`, `J`, `∇ρ`, `Δρ`, `∇·J` on the grid.
#[derive(Clone, Debug)]
pub struct HydroFields {
    pub rho: Vec<f64>,
    pub j: [Vec<f64>; 2],
    pub grad_rho: [Vec<f64>; 2],
    pub lap_rho: Vec<f64>,
    pub div_j: Vec<f64>,
}

impl HydroFields {
    pub fn compute(psi: &WaveField, spectral: &Spectral) -> Self {
        let [dx, dy, lap] = spectral.derivatives(&psi.data);
        let len = psi.data.len();
        let mut h = HydroFields {
            rho: vec![0.0; len],
            j: [vec![0.0; len], vec![0.0; len]],
            grad_rho: [vec![0.0; len], vec![0.0; len]],
            lap_rho: vec![0.0; len],
            div_j: vec![0.0; len],
        };
        for k in 0..len {
            let p = psi.data[k];
            let pc = p.conj();
            let gx = pc * dx[k];
            let gy = pc * dy[k];
            let gl = pc * lap[k];
            h.rho[k] = p.norm_sqr();
            h.grad_rho[0][k] = 2.0 * gx.re;
            h.grad_rho[1][k] = 2.0 * gy.re;
            h.j[0][k] = gx.im;
            h.j[1][k] = gy.im;
            h.lap_rho[k] = 2.0 * gl.re + 2.0 * (dx[k].norm_sqr() + dy[k].norm_sqr());
            h.div_j[k] = gl.im;
        }
        h
    }
}

/// Sampled `R[Ψ]` with floor diagnostics.
#[derive(Clone, Debug)]
pub struct RField {
    pub values: Vec<Complex64>,
    /// Nodes where `ρ` was under the floor.
    pub floored: usize,
    pub first_floored: Option<(usize, usize)>,
}

/// Evaluates `R[Ψ]` at every node. The floor is `floor_rel · max ρ`.
pub fn evaluate_r(
    r: &RFunctional,
    psi: &WaveField,
    spectral: &Spectral,
    floor_rel: f64,
    policy: FloorPolicy,
) -> Result<RField, SimError> {
    let n = psi.grid.n;
    let len = psi.data.len();
    let floor = floor_rel * psi.max_density();
    let (values, floored_nodes): (Vec<Complex64>, Vec<usize>) = match r {
        RFunctional::None => (vec![Complex64::new(0.0, 0.0); len], Vec::new()),
        RFunctional::Logarithmic { b } => {
            let clamp = floor.max(f64::MIN_POSITIVE);
            let values: Vec<Complex64> = psi
                .data
                .par_iter()
                .map(|z| Complex64::new(-b * z.norm_sqr().max(clamp).ln(), 0.0))
                .collect();
            let floored = (0..len).filter(|&k| psi.data[k].norm_sqr() < floor).collect();
            (values, floored)
        }
        RFunctional::DoebnerGoldin(p) => {
            let h = HydroFields::compute(psi, spectral);
            let [c1, c2, c3, c4, c5] = p.c;
            let mut floored = Vec::new();
            let values = (0..len)
                .map(|k| {
                    let rho = h.rho[k];
                    if rho < floor || rho == 0.0 {
                        floored.push(k);
                        return Complex64::new(0.0, 0.0);
                    }
                    let inv = 1.0 / rho;
                    let (jx, jy) = (h.j[0][k], h.j[1][k]);
                    let (gx, gy) = (h.grad_rho[0][k], h.grad_rho[1][k]);
                    let lap = h.lap_rho[k] * inv;
                    let re = c1 * h.div_j[k] * inv
                        + c2 * lap
                        + c3 * (jx * jx + jy * jy) * inv * inv
                        + c4 * (jx * gx + jy * gy) * inv * inv
                        + c5 * (gx * gx + gy * gy) * inv * inv;
                    Complex64::new(p.d * re, p.d * 0.5 * lap)
                })
                .collect();
            (values, floored)
        }
    };
    let first_floored = floored_nodes.first().map(|&k| (k / n, k % n));
    if policy == FloorPolicy::Error {
        if let Some((i, j)) = first_floored {
            return Err(SimError::DensityFloor { i, j, rho: psi.at(i, j).norm_sqr() });
        }
    }
    Ok(RField { values, floored: floored_nodes.len(), first_floored })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;
    use nlqm_core::models::DgParams;
    use nlqm_core::symbolic::{parse_expression, Bindings, Coord, Factor, FieldKind};

    fn sample() -> (Grid2D, Spectral, WaveField) {
        let g = Grid2D::new(64, 6.0).unwrap();
        let s = Spectral::new(g);
        // Complex Gaussian with a nonzero current.
        let f = WaveField::from_fn(g, |x, y| {
            Complex64::new(-x * x - y * y - x * y, 0.3 * x * y + 0.5 * x - 0.2 * y * y).exp()
        });
        (g, s, f)
    }

    #[test]
    fn matches_symbolic_evaluation() {
        let (g, s, f) = sample();
        let r = RFunctional::DoebnerGoldin(DgParams::new(0.7, [1.0, -0.3, 0.5, -1.2, 0.4]));
        let num = evaluate_r(&r, &f, &s, 1e-12, FloorPolicy::Suppress).unwrap();
        let psi = parse_expression("exp(-x^2-y^2-x*y + I*(0.3*x*y + 0.5*x - 0.2*y^2))").unwrap();
        let psib = parse_expression("exp(-x^2-y^2-x*y - I*(0.3*x*y + 0.5*x - 0.2*y^2))").unwrap();
        let b = Bindings::new().field(FieldKind::P, &psi).unwrap().field(FieldKind::PB, &psib).unwrap();
        let spec = r.symbolic().substitute(&b).unwrap();
        let mut err: f64 = 0.0;
        for (i, j) in [(32, 32), (30, 35), (36, 28), (33, 31)] {
            let (x, y) = (g.coord(i), g.coord(j));
            let exact: Complex64 = spec
                .eval(&mut |fa| match fa {
                    Factor::Coord(Coord::X) => Some(Complex64::new(x, 0.0)),
                    Factor::Coord(Coord::Y) => Some(Complex64::new(y, 0.0)),
                    _ => None,
                })
                .unwrap();
            err = err.max((num.values[g.index(i, j)] - exact).norm());
        }
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn logarithmic_is_minus_b_ln_rho() {
        let (g, s, f) = sample();
        let r = evaluate_r(&RFunctional::Logarithmic { b: 0.25 }, &f, &s, 1e-12, FloorPolicy::Suppress).unwrap();
        let k = g.index(32, 32);
        assert!((r.values[k].re + 0.25 * f.data[k].norm_sqr().ln()).abs() < 1e-14);
        assert!(r.floored > 0);
    }

    #[test]
    fn error_policy_reports_location() {
        let (_, s, f) = sample();
        let e = evaluate_r(&RFunctional::Logarithmic { b: 1.0 }, &f, &s, 1e-12, FloorPolicy::Error).unwrap_err();
        assert!(matches!(e, SimError::DensityFloor { i: 0, j: 0, .. }));
    }
}
