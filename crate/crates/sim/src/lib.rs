//! Pseudo-spectral split-step simulator for two one-dimensional particles,
//! `i∂ₜΨ = (−Δ + V + R[Ψ])Ψ` on a periodic box, plus the gauge transformation
//! `N_D` and numeric λ-sensitivity estimates.

pub mod dump;
pub mod evolve;
pub mod field;
pub mod gauge;
pub mod grid;
pub mod hydro;
pub mod identical;
pub mod initial;
pub mod observables;
pub mod potential;
pub mod sensitivity;
pub mod spectral;
pub mod stencil;

use thiserror::Error;

pub use evolve::{evolve, evolve_with, EvolveParams, RunStats, Stepper, Trajectory};
pub use field::WaveField;
pub use gauge::{apply_gauge, gauge_equivariance_residual, gauge_residual_run, inverse_gauge};
pub use grid::Grid2D;
pub use hydro::{evaluate_r, FloorPolicy, HydroFields, RField, DEFAULT_FLOOR_REL};
pub use identical::{identical_particle_experiment, IdenticalConfig, IdenticalRow};
pub use initial::{InitialSpec, Part};
pub use observables::{marginal_density, moment, region_probability, Interval, Region, Weight};
pub use potential::PotentialSpec;
pub use sensitivity::{lambda_sensitivity, time_derivative, x0_independence_check, Observable, SensitivitySettings, ShiftRow, SimSetup};
pub use spectral::Spectral;
pub use stencil::one_sided_weights;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("density {rho:e} under the floor at node ({i}, {j})")]
    DensityFloor { i: usize, j: usize, rho: f64 },
    #[error("norm drift {drift:e} after {step} steps exceeds the guard")]
    NormDrift { step: usize, drift: f64 },
    #[error("time step {dt} violates dt·k_max² ≤ π (k_max = {k_max})")]
    StepTooLarge { dt: f64, k_max: f64 },
    #[error("wavefunction reaches the box edge (edge density ratio {ratio:e})")]
    Margin { ratio: f64 },
    #[error("non-finite value in the field at step {step}")]
    NonFinite { step: usize },
    #[error(transparent)]
    Symbolic(#[from] nlqm_core::symbolic::SymbolicError),
    #[error(transparent)]
    Eval(#[from] nlqm_core::symbolic::EvalError),
    #[error(transparent)]
    Model(#[from] nlqm_core::models::ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed dump: {0}")]
    BadDump(String),
}
