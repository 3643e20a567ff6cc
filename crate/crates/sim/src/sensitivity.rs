//! Numeric `∂λ∂ₜⁿ O` at `t = 0` and the `x₀`-independence check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use nlqm_core::locality::{functional_point, SignalReport, TestId};
use nlqm_core::models::RFunctional;

use crate::evolve::{evolve_with, EvolveParams};
use crate::field::WaveField;
use crate::grid::Grid2D;
use crate::initial::InitialSpec;
use crate::observables::{marginal_density, moment, Interval, Region, Weight};
use crate::potential::PotentialSpec;
use crate::stencil::one_sided_weights;
use crate::SimError;

/// Everything needed to run one trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSetup {
    #[serde(default)]
    pub grid: Grid2D,
    pub potential: PotentialSpec,
    pub initial: InitialSpec,
    pub nonlinearity: RFunctional,
    #[serde(default)]
    pub evolve: EvolveParams,
}

/// Observable whose λ-sensitivity is estimated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Observable {
    /// `∫x₁²ρ₁`.
    SecondMoment,
    /// `∫x₁ρ₁`.
    FirstMoment,
    /// `Re ∫e^{ikx₁}ρ₁`.
    Fourier { k: f64 },
    /// `∫_𝒪 ρ₁`.
    Probability { o: Interval },
    /// `∫_region |Ψ|²`.
    Region { region: Region },
    /// `Re ∫_region w|Ψ|²`.
    Moment { weight: Weight, region: Region },
}

impl Observable {
    pub fn test_id(&self) -> TestId {
        match self {
            Observable::SecondMoment => TestId::Test1,
            Observable::FirstMoment => TestId::Test3,
            Observable::Fourier { .. } => TestId::Test4,
            Observable::Probability { .. } | Observable::Region { .. } | Observable::Moment { .. } => TestId::Test2,
        }
    }

    pub fn measure(&self, psi: &WaveField) -> Result<f64, SimError> {
        Ok(match *self {
            Observable::SecondMoment => moment(psi, Weight::X1Squared, Region::All)?.re,
            Observable::FirstMoment => moment(psi, Weight::X1, Region::All)?.re,
            Observable::Fourier { k } => moment(psi, Weight::Fourier { k }, Region::All)?.re,
            Observable::Probability { o } => moment(psi, Weight::One, Region::First { o })?.re,
            Observable::Region { region } => moment(psi, Weight::One, region)?.re,
            Observable::Moment { weight, region } => moment(psi, weight, region)?.re,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensitivitySettings {
    /// λ offset; Richardson extrapolation combines `δ` and `δ/2`.
    pub delta: f64,
    /// Steps between time samples; the stencil uses every second sample.
    pub sample_every: usize,
    /// Repeat at `dt/2` and add the change to the error bar.
    pub dt_check: bool,
}

impl Default for SensitivitySettings {
    fn default() -> Self {
        SensitivitySettings { delta: 1e-3, sample_every: 10, dt_check: true }
    }
}

fn observable_series(
    setup: &SimSetup,
    psi0: &WaveField,
    lambda: f64,
    dt: f64,
    every: usize,
    count: usize,
    obs: &Observable,
) -> Result<Vec<f64>, SimError> {
    let params = EvolveParams { dt, steps: every * (count - 1), ..setup.evolve };
    let mut out = Vec::with_capacity(count);
    evolve_with(psi0, &setup.potential.with_lambda(lambda), setup.nonlinearity, params, |step, _, psi| {
        if step % every == 0 {
            out.push(obs.measure(psi)?);
        }
        Ok(())
    })?;
    Ok(out)
}

/// `∂ₜⁿ O` at `t = 0` for the setup as given, from a one-sided stencil on
/// `2n + 2` samples spaced `sample_every` steps apart.
pub fn time_derivative(setup: &SimSetup, obs: &Observable, n: usize, sample_every: usize) -> Result<f64, SimError> {
    let m = 2 * n + 2;
    let every = sample_every.max(1);
    let psi0 = setup.initial.sample(&setup.grid)?;
    let dt = setup.evolve.dt;
    let series = observable_series(setup, &psi0, setup.potential.lambda(), dt, every, m, obs)?;
    let w = one_sided_weights(n, m);
    Ok(w.iter().zip(&series).map(|(a, b)| a * b).sum::<f64>() / (dt * every as f64).powi(n as i32))
}

struct Estimate {
    value: f64,
    error: f64,
}

fn estimate(setup: &SimSetup, psi0: &WaveField, obs: &Observable, n: usize, s: &SensitivitySettings, dt: f64, every: usize) -> Result<Estimate, SimError> {
    let m = 2 * n + 2;
    let lambda = setup.potential.lambda();
    let fine = dt * every as f64;
    let coarse = 2.0 * fine;
    let w = one_sided_weights(n, m);
    let apply = |g: &[f64], stride: usize, spacing: f64| {
        w.iter().enumerate().map(|(j, wj)| wj * g[j * stride]).sum::<f64>() / spacing.powi(n as i32)
    };
    let mut d_coarse = [0.0; 2];
    let mut d_fine = [0.0; 2];
    let mut scale: f64 = 0.0;
    for (slot, h) in [s.delta, 0.5 * s.delta].into_iter().enumerate() {
        let plus = observable_series(setup, psi0, lambda + h, dt, every, 2 * m - 1, obs)?;
        let minus = observable_series(setup, psi0, lambda - h, dt, every, 2 * m - 1, obs)?;
        scale = plus.iter().chain(&minus).fold(scale, |a, v| a.max(v.abs()));
        let g: Vec<f64> = plus.iter().zip(&minus).map(|(p, q)| (p - q) / (2.0 * h)).collect();
        d_coarse[slot] = apply(&g, 2, coarse);
        d_fine[slot] = apply(&g, 1, fine);
    }
    let value = (4.0 * d_coarse[1] - d_coarse[0]) / 3.0;
    // The two λ offsets come from runs with independent rounding, so their
    // full difference bounds both the extrapolation and the noise.
    let richardson = (d_coarse[1] - d_coarse[0]).abs();
    // Halving the sample spacing shrinks the stencil error by 2^{m−n}.
    let truncation = (d_coarse[1] - d_fine[1]).abs();
    // One ulp of the largest sample through the stencil and the extrapolation.
    let wsum: f64 = w.iter().map(|w| w.abs()).sum();
    let noise = 1.5 * f64::EPSILON * scale * wsum / (0.5 * s.delta * coarse.powi(n as i32));
    Ok(Estimate { value, error: richardson + truncation + noise })
}

/// `∂λ∂ₜⁿ O` at `t = 0` from one-sided time stencils on `m = 2n + 2` samples
/// spaced `2·sample_every` steps apart, with the same stencil at half the
/// spacing as the truncation estimate, and central λ differences with
/// Richardson extrapolation.
pub fn lambda_sensitivity(
    setup: &SimSetup,
    obs: &Observable,
    n: usize,
    settings: &SensitivitySettings,
) -> Result<SignalReport, SimError> {
    if matches!(setup.potential, PotentialSpec::None) {
        return Err(SimError::InvalidParameter("λ-sensitivity needs a potential with a coupling".into()));
    }
    if !(settings.delta > 0.0) || settings.sample_every == 0 {
        return Err(SimError::InvalidParameter("delta must be positive and sample_every nonzero".into()));
    }
    let psi0 = setup.initial.sample(&setup.grid)?;
    let dt = setup.evolve.dt;
    let main = estimate(setup, &psi0, obs, n, settings, dt, settings.sample_every)?;
    let mut error = main.error;
    if settings.dt_check {
        let half = estimate(setup, &psi0, obs, n, settings, 0.5 * dt, 2 * settings.sample_every)?;
        error += (main.value - half.value).abs();
    }
    let mut point: BTreeMap<String, f64> = functional_point(&setup.nonlinearity);
    point.insert("lambda".into(), setup.potential.lambda());
    let mut report = SignalReport::numeric(obs.test_id(), n, point, main.value, error);
    if let Observable::Fourier { k } = obs {
        report.k = Some(*k);
    }
    Ok(report)
}

/// Largest marginal-density deviation from the unshifted run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftRow {
    pub shift: f64,
    pub deviation_t0: f64,
    pub deviation_final: f64,
}

/// Shifts the harmonic centre and the second particle's initial state by
/// each offset and compares `ρ₁` at `t = 0` and after `evolve.steps` steps.
pub fn x0_independence_check(setup: &SimSetup, shifts: &[f64], margin: f64) -> Result<Vec<ShiftRow>, SimError> {
    let PotentialSpec::Harmonic2 { lambda, x0 } = setup.potential else {
        return Err(SimError::InvalidParameter("x0 check needs a harmonic2 potential".into()));
    };
    let run = |shift: f64| -> Result<(Vec<f64>, Vec<f64>), SimError> {
        let psi0 = setup.initial.sample_shifted(&setup.grid, shift)?;
        check_margin(&psi0, margin)?;
        let pot = PotentialSpec::Harmonic2 { lambda, x0: x0 + shift };
        let (last, _) = evolve_with(&psi0, &pot, setup.nonlinearity, setup.evolve, |_, _, _| Ok(()))?;
        check_margin(&last, margin)?;
        Ok((marginal_density(&psi0), marginal_density(&last)))
    };
    let (base0, base1) = run(0.0)?;
    let sup = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    shifts
        .iter()
        .map(|&s| {
            let (r0, r1) = run(s)?;
            Ok(ShiftRow { shift: s, deviation_t0: sup(&r0, &base0), deviation_final: sup(&r1, &base1) })
        })
        .collect()
}

fn check_margin(psi: &WaveField, margin: f64) -> Result<(), SimError> {
    let ratio = psi.edge_ratio();
    if ratio > margin {
        Err(SimError::Margin { ratio })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(r: RFunctional) -> SimSetup {
        SimSetup {
            grid: Grid2D::new(64, 8.0).unwrap(),
            potential: PotentialSpec::Harmonic2 { lambda: 1.0, x0: 0.0 },
            initial: InitialSpec::ClosedForm { expr: "exp(-x^2 - y^2 - x*y)".into() },
            nonlinearity: r,
            evolve: EvolveParams { dt: 1e-3, ..Default::default() },
        }
    }

    #[test]
    fn linear_marginal_is_lambda_blind() {
        let s = SensitivitySettings { dt_check: false, ..Default::default() };
        let r = lambda_sensitivity(&setup(RFunctional::None), &Observable::SecondMoment, 2, &s).unwrap();
        assert!(r.value_f64().abs() <= r.error().max(1e-9), "{r:?}");
    }

    #[test]
    fn second_particle_moment_feels_lambda() {
        // ∂λ∂ₜ²∫x₂²|Ψ|² = −8∫x₂²|Ψ|² at t = 0 for V = λx₂² and m = 1/2.
        let su = setup(RFunctional::None);
        let obs = Observable::Moment { weight: Weight::X2Squared, region: Region::All };
        let r = lambda_sensitivity(&su, &obs, 2, &SensitivitySettings::default()).unwrap();
        let psi = su.initial.sample(&su.grid).unwrap();
        let expected = -8.0 * moment(&psi, Weight::X2Squared, Region::All).unwrap().re;
        assert!(!r.is_inconclusive());
        assert!((r.value_f64() - expected).abs() <= r.error() + 1e-6 * expected.abs(), "{r:?} vs {expected}");
    }

    #[test]
    fn needs_a_coupling() {
        let mut su = setup(RFunctional::None);
        su.potential = PotentialSpec::None;
        assert!(lambda_sensitivity(&su, &Observable::FirstMoment, 1, &Default::default()).is_err());
    }
}
