//! Numeric evaluation of normal forms over any scalar-like ring.

use num_complex::Complex64;
use thiserror::Error;

use super::{Coeff, Factor, Poly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no value bound for {0}")]
    Unbound(String),
    #[error("division by zero during evaluation")]
    DivisionByZero,
}

/// What [`Poly::eval`] needs from a value type.
pub trait Scalar: Clone {
    fn from_coeff(c: &Coeff) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn inv(&self) -> Result<Self, EvalError>;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;

    fn powi(&self, e: i64) -> Result<Self, EvalError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::from_coeff(&Coeff::one());
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }
}

impl Scalar for Complex64 {
    fn from_coeff(c: &Coeff) -> Self {
        c.to_complex64()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Result<Self, EvalError> {
        if *self == Complex64::new(0.0, 0.0) {
            Err(EvalError::DivisionByZero)
        } else {
            Ok(1.0 / self)
        }
    }
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
    fn ln(&self) -> Self {
        Complex64::ln(*self)
    }
    fn powi(&self, e: i64) -> Result<Self, EvalError> {
        if e < 0 && *self == Complex64::new(0.0, 0.0) {
            return Err(EvalError::DivisionByZero);
        }
        Ok(Complex64::powi(self, e as i32))
    }
}

impl Poly {
    /// Evaluates with `env` supplying values for leaves (atoms, coordinates,
    /// parameters, potentials). `env` is consulted first for every factor, so
    /// it may also short-circuit composite factors.
    pub fn eval<S: Scalar>(&self, env: &mut dyn FnMut(&Factor) -> Option<S>) -> Result<S, EvalError> {
        let mut total = S::from_coeff(&Coeff::zero());
        for (m, c) in self.terms() {
            let mut acc = S::from_coeff(c);
            for (f, e) in m.factors() {
                let v = eval_factor(f, env)?;
                acc = acc.mul(&v.powi(*e)?);
            }
            total = total.add(&acc);
        }
        Ok(total)
    }
}

fn eval_factor<S: Scalar>(f: &Factor, env: &mut dyn FnMut(&Factor) -> Option<S>) -> Result<S, EvalError> {
    if let Some(v) = env(f) {
        return Ok(v);
    }
    match f {
        Factor::Ln(p) => Ok(p.eval(env)?.ln()),
        Factor::Exp(q) => Ok(q.eval(env)?.exp()),
        Factor::Sum(p) => p.eval(env),
        Factor::Field(a) => Err(EvalError::Unbound(a.to_string())),
        Factor::Coord(c) => Err(EvalError::Unbound(c.name().to_string())),
        Factor::Param(s) => Err(EvalError::Unbound(s.to_string())),
        Factor::Potential { order, .. } => Err(EvalError::Unbound(format!("V{}", "'".repeat(*order as usize)))),
    }
}
