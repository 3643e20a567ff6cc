//! Exact nonlocality tests: the second-moment pipeline, the T/D hierarchy
//! and the Gaussian-ansatz test.

mod appendix;
mod report;
mod series;
mod td;
mod werner;

use thiserror::Error;

pub use td::{
    evaluate_td, t_recurrence_rhs, td_integrand, third_iterate_t, x2_moment_identity, KPoly, TdExpr, TdKind,
    TdSymbol,
};

pub use report::{functional_point, Provenance, SignalReport, SignalValue, TestId};
pub use series::ExactSeries;
pub use werner::{
    derive_gaussian_ode, gaussian_exponent, lambda_derivative, observable_series, solve_taylor, time_derivative,
    time_derivative_exact,
    werner_test, GaussianOde, GaussianState, WernerObservable, WernerSettings, C_BAR_NAMES, C_NAMES, GAMMA,
    GAMMA_BAR,
};

pub use appendix::{
    appendix_bindings, appendix_signal, appendix_signal_iterations, build_term0, build_term0_symbolic_b,
    idot_iterate, idot_iterate_with, term0_for, AppendixSignal, Term0,
};

use crate::gaussian::{ExactError, GaussianError};
use crate::symbolic::{EvalError, SymbolicError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocalityError {
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("Gaussian ansatz does not close: {0}")]
    NotClosed(String),
    #[error("Gaussian state needs symmetric C with positive-definite real part")]
    InvalidGaussianState,
    #[error("non-finite value while solving the Gaussian ODE")]
    NonFinite,
    #[error("derivative order {0} exceeds the supported maximum 6")]
    OrderTooHigh(usize),
}
