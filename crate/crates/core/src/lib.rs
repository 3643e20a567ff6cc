//! Exact symbolic machinery for nonlocality tests of nonlinear Schrödinger
//! equations: expression engine, Gaussian integrals, nonlinearity models and
//! the locality-test pipelines built on them.

pub mod symbolic;
pub mod gaussian;
pub mod models;
pub mod locality;
