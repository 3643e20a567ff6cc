//! Strang split-step integrator: half nonlinear step, exact kinetic step,
//! half nonlinear step. The nonlinear half step uses the exponential midpoint
//! rule, with `R` evaluated at the state advanced a quarter step.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nlqm_core::models::RFunctional;

use crate::field::WaveField;
use crate::hydro::{evaluate_r, FloorPolicy, DEFAULT_FLOOR_REL};
use crate::potential::PotentialSpec;
use crate::spectral::Spectral;
use crate::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveParams {
    pub dt: f64,
    pub steps: usize,
    /// Density floor relative to the peak density.
    pub floor_rel: f64,
    pub floor_policy: FloorPolicy,
    /// Largest relative norm drift tolerated per 1000 steps.
    pub drift_guard: f64,
}

impl Default for EvolveParams {
    fn default() -> Self {
        EvolveParams { dt: 1e-4, steps: 1000, floor_rel: DEFAULT_FLOOR_REL, floor_policy: FloorPolicy::Suppress, drift_guard: 1e-6 }
    }
}

/// Summary of a run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunStats {
    pub steps: usize,
    pub norm0: f64,
    /// Relative drift `|‖Ψ‖² − ‖Ψ₀‖²| / ‖Ψ₀‖²` at the end.
    pub final_drift: f64,
    pub max_drift: f64,
    /// Largest number of floored nodes in any `R` evaluation.
    pub max_floored: usize,
}

/// One-step propagator for a fixed grid, potential and nonlinearity.
pub struct Stepper {
    spectral: Spectral,
    v: Vec<f64>,
    r: RFunctional,
    kinetic: Vec<Complex64>,
    params: EvolveParams,
    /// `R` depends on `|Ψ|` only, so phase-only substeps leave it unchanged.
    modulus_only: bool,
    max_floored: usize,
}

impl Stepper {
    pub fn new(
        spectral: Spectral,
        potential: &PotentialSpec,
        r: RFunctional,
        params: EvolveParams,
    ) -> Result<Self, SimError> {
        let grid = *spectral.grid();
        grid.validate()?;
        potential.validate(&grid)?;
        r.validate()?;
        if !(params.dt > 0.0 && params.dt.is_finite()) {
            return Err(SimError::InvalidParameter(format!("dt = {} must be positive", params.dt)));
        }
        let k_max = grid.k_max();
        if params.dt * k_max * k_max > std::f64::consts::PI {
            return Err(SimError::StepTooLarge { dt: params.dt, k_max });
        }
        let k = spectral.wavenumbers();
        let n = grid.n;
        let mut kinetic = Vec::with_capacity(grid.len());
        for i in 0..n {
            for j in 0..n {
                kinetic.push(Complex64::new(0.0, -(k[i] * k[i] + k[j] * k[j]) * params.dt).exp());
            }
        }
        let modulus_only = !matches!(r, RFunctional::DoebnerGoldin(p) if p.d != 0.0);
        Ok(Stepper { v: potential.sample(&grid), spectral, r, kinetic, params, modulus_only, max_floored: 0 })
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn potential(&self) -> &[f64] {
        &self.v
    }

    fn r_values(&mut self, psi: &WaveField) -> Result<Vec<Complex64>, SimError> {
        let rf = evaluate_r(&self.r, psi, &self.spectral, self.params.floor_rel, self.params.floor_policy)?;
        self.max_floored = self.max_floored.max(rf.floored);
        Ok(rf.values)
    }

    fn phase(psi: &mut WaveField, v: &[f64], r: &[Complex64], tau: f64) {
        psi.data.par_iter_mut().zip(v.par_iter().zip(r.par_iter())).for_each(|(z, (v, r))| {
            *z *= (Complex64::new(0.0, -tau) * (r + v)).exp();
        });
    }

    fn nonlinear_half(&mut self, psi: &mut WaveField) -> Result<(), SimError> {
        let tau = 0.5 * self.params.dt;
        let r0 = self.r_values(psi)?;
        if self.modulus_only {
            Self::phase(psi, &self.v, &r0, tau);
            return Ok(());
        }
        let mut mid = psi.clone();
        Self::phase(&mut mid, &self.v, &r0, 0.5 * tau);
        let r1 = self.r_values(&mid)?;
        Self::phase(psi, &self.v, &r1, tau);
        Ok(())
    }

    /// Advances one step of length `dt`.
    pub fn step(&mut self, psi: &mut WaveField) -> Result<(), SimError> {
        self.nonlinear_half(psi)?;
        self.spectral.forward(&mut psi.data);
        psi.data.par_iter_mut().zip(self.kinetic.par_iter()).for_each(|(z, k)| *z *= k);
        self.spectral.inverse(&mut psi.data);
        self.nonlinear_half(psi)
    }
}

/// Runs `params.steps` steps, calling `observe(step, t, Ψ)` before the first
/// step and after every step.
pub fn evolve_with(
    psi0: &WaveField,
    potential: &PotentialSpec,
    r: RFunctional,
    params: EvolveParams,
    mut observe: impl FnMut(usize, f64, &WaveField) -> Result<(), SimError>,
) -> Result<(WaveField, RunStats), SimError> {
    let mut stepper = Stepper::new(Spectral::new(psi0.grid), potential, r, params)?;
    let mut psi = psi0.clone();
    let norm0 = psi.norm_sq();
    if !(norm0 > 0.0) || !psi.is_finite() {
        return Err(SimError::InvalidParameter("initial state must be finite and nonzero".into()));
    }
    let mut stats = RunStats { steps: params.steps, norm0, ..Default::default() };
    observe(0, 0.0, &psi)?;
    for step in 1..=params.steps {
        stepper.step(&mut psi)?;
        let norm = psi.norm_sq();
        if !norm.is_finite() {
            return Err(SimError::NonFinite { step });
        }
        let drift = (norm - norm0).abs() / norm0;
        stats.max_drift = stats.max_drift.max(drift);
        stats.final_drift = drift;
        let allowed = params.drift_guard * (step as f64 / 1000.0).max(1.0);
        if drift > allowed {
            return Err(SimError::NormDrift { step, drift });
        }
        observe(step, step as f64 * params.dt, &psi)?;
    }
    stats.max_floored = stepper.max_floored;
    Ok((psi, stats))
}

/// Stored snapshots of a run.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<WaveField>,
    pub stats: RunStats,
}

/// Runs and keeps a snapshot every `sample_every` steps (the final state is
/// always kept).
pub fn evolve(
    psi0: &WaveField,
    potential: &PotentialSpec,
    r: RFunctional,
    params: EvolveParams,
    sample_every: usize,
) -> Result<Trajectory, SimError> {
    let every = sample_every.max(1);
    let mut times = Vec::new();
    let mut fields = Vec::new();
    let (last, stats) = evolve_with(psi0, potential, r, params, |step, t, psi| {
        if step % every == 0 {
            times.push(t);
            fields.push(psi.clone());
        }
        Ok(())
    })?;
    if params.steps % every != 0 {
        times.push(params.steps as f64 * params.dt);
        fields.push(last);
    }
    Ok(Trajectory { times, fields, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;

    fn gaussian(g: Grid2D) -> WaveField {
        WaveField::from_fn(g, |x, y| Complex64::new((-x * x - y * y).exp(), 0.0))
    }

    #[test]
    fn rejects_large_steps() {
        let g = Grid2D::new(64, 4.0).unwrap();
        let p = EvolveParams { dt: 1.0, steps: 1, ..Default::default() };
        let e = Stepper::new(Spectral::new(g), &PotentialSpec::None, RFunctional::None, p).err().unwrap();
        assert!(matches!(e, SimError::StepTooLarge { .. }));
    }

    #[test]
    fn free_evolution_conserves_norm() {
        let g = Grid2D::new(64, 8.0).unwrap();
        let p = EvolveParams { dt: 1e-3, steps: 50, ..Default::default() };
        let (_, stats) = evolve_with(&gaussian(g), &PotentialSpec::None, RFunctional::None, p, |_, _, _| Ok(())).unwrap();
        assert!(stats.max_drift < 1e-13);
    }

    #[test]
    fn snapshots_include_endpoints() {
        let g = Grid2D::new(32, 8.0).unwrap();
        let p = EvolveParams { dt: 1e-3, steps: 7, ..Default::default() };
        let tr = evolve(&gaussian(g), &PotentialSpec::None, RFunctional::None, p, 3).unwrap();
        assert_eq!(tr.times.len(), 4);
        assert!((tr.times[3] - 7e-3).abs() < 1e-15);
    }
}
