//! The nonlinear gauge transformation `N_D Ψ = e^{iD ln|Ψ|} Ψ`.

use num_complex::Complex64;

use nlqm_core::models::{DgParams, RFunctional};

use crate::evolve::{EvolveParams, Stepper};
use crate::field::WaveField;
use crate::hydro::{evaluate_r, FloorPolicy};
use crate::potential::PotentialSpec;
use crate::spectral::Spectral;
use crate::SimError;

/// `N_D Ψ`; zero samples stay zero.
pub fn apply_gauge(psi: &WaveField, d: f64) -> Result<WaveField, SimError> {
    if !d.is_finite() {
        return Err(SimError::InvalidParameter(format!("D = {d} must be finite")));
    }
    if !psi.is_finite() {
        return Err(SimError::NonFinite { step: 0 });
    }
    let data = psi
        .data
        .iter()
        .map(|z| {
            let m = z.norm();
            if m == 0.0 {
                *z
            } else {
                z * Complex64::new(0.0, d * m.ln()).exp()
            }
        })
        .collect();
    Ok(WaveField { grid: psi.grid, data })
}

/// `N_D⁻¹ = N_{−D}`.
pub fn inverse_gauge(psi: &WaveField, d: f64) -> Result<WaveField, SimError> {
    apply_gauge(psi, -d)
}

/// `‖i∂ₜΦ − (−Δ + V + R_D[Φ])Φ‖₂` at the middle of three linear states
/// spaced `dt` apart, with `Φ = N_D Ψ`, `R_D` the gauge-generated
/// Doebner-Goldin functional and `∂ₜ` a centered difference. Nodes under
/// the density floor, where `R_D` is not evaluated, are left out.
pub fn gauge_equivariance_residual(
    states: [&WaveField; 3],
    dt: f64,
    d: f64,
    v: &[f64],
    spectral: &Spectral,
    floor_rel: f64,
) -> Result<f64, SimError> {
    let [prev, cur, next] = states;
    let phi = [apply_gauge(prev, d)?, apply_gauge(cur, d)?, apply_gauge(next, d)?];
    let r = RFunctional::DoebnerGoldin(DgParams::from_gauge(d));
    let rv = evaluate_r(&r, &phi[1], spectral, floor_rel, FloorPolicy::Suppress)?;
    let lap = spectral.laplacian(&phi[1].data);
    let i = Complex64::new(0.0, 1.0);
    let floor = floor_rel * phi[1].max_density();
    let mut acc = 0.0;
    for k in 0..phi[1].data.len() {
        if phi[1].data[k].norm_sqr() < floor {
            continue;
        }
        let lhs = i * (phi[2].data[k] - phi[0].data[k]) / (2.0 * dt);
        let rhs = -lap[k] + (v[k] + rv.values[k]) * phi[1].data[k];
        acc += (lhs - rhs).norm_sqr();
    }
    Ok((acc * cur.grid.cell()).sqrt())
}

/// Evolves `Ψ₀` linearly for `steps + 1` steps and returns the gauge residual
/// at step `steps`.
pub fn gauge_residual_run(
    psi0: &WaveField,
    potential: &PotentialSpec,
    d: f64,
    params: EvolveParams,
) -> Result<f64, SimError> {
    if params.steps == 0 {
        return Err(SimError::InvalidParameter("gauge residual needs at least one step".into()));
    }
    let mut stepper = Stepper::new(Spectral::new(psi0.grid), potential, RFunctional::None, params)?;
    let mut psi = psi0.clone();
    for _ in 0..params.steps - 1 {
        stepper.step(&mut psi)?;
    }
    let prev = psi.clone();
    stepper.step(&mut psi)?;
    let cur = psi.clone();
    stepper.step(&mut psi)?;
    gauge_equivariance_residual([&prev, &cur, &psi], params.dt, d, stepper.potential(), stepper.spectral(), params.floor_rel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;

    #[test]
    fn gauge_preserves_modulus_and_inverts() {
        let g = Grid2D::new(32, 4.0).unwrap();
        let f = WaveField::from_fn(g, |x, y| Complex64::new(-x * x - y * y, 0.4 * x).exp());
        let n = apply_gauge(&f, 1.3).unwrap();
        for (a, b) in f.data.iter().zip(&n.data) {
            assert!((a.norm() - b.norm()).abs() <= 1e-15 * a.norm().max(1e-300));
        }
        let back = inverse_gauge(&n, 1.3).unwrap();
        assert!(back.l2_distance(&f) < 1e-14);
        assert_eq!(apply_gauge(&WaveField::zeros(g), 2.0).unwrap(), WaveField::zeros(g));
    }
}
