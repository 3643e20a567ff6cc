//! The exact second-moment pipeline for the logarithmic nonlinearity:
//! `term0 → (i d/dt)³ → specialize → ∂λ → ∫∫ → ÷ norm → × prefactor`.

use num_rational::BigRational;
use serde::Serialize;

use crate::gaussian::{gaussian_normalization, integrate_specialized, ExactScalar, QuadraticForm2};
use crate::models::{decimal_rational, RFunctional};
use crate::symbolic::{
    parse_expression, Bindings, Coeff, Coord, Evolution, Expr, FieldAtom, FieldKind, Poly, Var,
};

use super::LocalityError;

/// Integrand of `2D₀,₁,₁ + D₀,₂,₀` with a coupling factored out.
#[derive(Clone, Debug)]
pub struct Term0 {
    pub expr: Poly,
    /// Coupling in front of `expr` (for example `−b`).
    pub prefactor: Poly,
}

/// `2(∂ₓR)·PB·∂ₓP + (∂ₓ²R)·PB·P` for a given `R`.
pub fn term0_for(r: &Poly) -> Poly {
    let x = Var::Coord(Coord::X);
    let p = Poly::field(FieldAtom::base(FieldKind::P));
    let pb = Poly::field(FieldAtom::base(FieldKind::PB));
    let rx = r.derivative(&x);
    let rxx = rx.derivative(&x);
    rx.mul(&pb).mul(&p.derivative(&x)).scale(&Coeff::from_int(2)).add(&rxx.mul(&pb).mul(&p))
}

/// For the logarithmic model the coupling `−b` is factored out, leaving
/// `2∂ₓln(PB·P)·PB·∂ₓP + ∂ₓ²ln(PB·P)·PB·P`. Other models keep prefactor 1.
pub fn build_term0(f: &RFunctional) -> Term0 {
    match f {
        RFunctional::Logarithmic { b } => {
            let log = Poly::field(FieldAtom::base(FieldKind::PB))
                .mul(&Poly::field(FieldAtom::base(FieldKind::P)))
                .ln()
                .expect("ln of a monomial");
            Term0 {
                expr: term0_for(&log),
                prefactor: Poly::constant(Coeff::real(-decimal_rational(*b))),
            }
        }
        other => Term0 { expr: term0_for(&other.symbolic()), prefactor: Poly::one() },
    }
}

/// Logarithmic term0 with the symbolic coupling `−b` as prefactor.
pub fn build_term0_symbolic_b() -> Term0 {
    let mut t = build_term0(&RFunctional::Logarithmic { b: 1.0 });
    t.prefactor = Poly::param("b").neg();
    t
}

/// `n` applications of `i d/dt` under `evolution`.
pub fn idot_iterate_with(e: &Poly, n: usize, evolution: &Evolution) -> Result<Poly, LocalityError> {
    let mut cur = e.clone();
    for _ in 0..n {
        cur = evolution.apply(&cur.derivative(&Var::Coord(Coord::T)))?;
    }
    Ok(cur)
}

/// `n` applications of `i d/dt` under the linear evolution with `V(y)`.
pub fn idot_iterate(e: &Expr, n: usize) -> Result<Expr, LocalityError> {
    Ok(idot_iterate_with(&Poly::from_expr(e)?, n, &Evolution::linear())?.to_expr())
}

/// Specialization used throughout: `V(y) ↦ λy²`, `P, PB ↦ exp(−x²−y²−xy)`.
pub fn appendix_bindings() -> Bindings {
    let psi = parse_expression("exp(-x^2-y^2-x*y)").expect("fixed state");
    Bindings::new()
        .potential(Coord::Y, &parse_expression("lambda*y^2").expect("fixed potential"))
        .and_then(|b| b.field(FieldKind::P, &psi))
        .and_then(|b| b.field(FieldKind::PB, &psi))
        .expect("fixed bindings are valid")
}

/// Result of the exact pipeline. The signal is `coefficient × b`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AppendixSignal {
    /// `∫∫ ∂λ spec(term_n)` at `t = 0`.
    pub raw: ExactScalar,
    /// `∫∫ |Ψ₀|²`.
    pub normalization: ExactScalar,
    /// `raw / normalization`.
    pub ratio: ExactScalar,
    /// Signal per unit `b`: `−ratio`.
    pub coefficient: ExactScalar,
    pub iterations: usize,
}

impl AppendixSignal {
    /// Exact signal at coupling `b`.
    pub fn at(&self, b: &BigRational) -> ExactScalar {
        self.coefficient.scale(b)
    }
}

/// `∂λ ∂ₜⁿ⁺³⟨x²⟩`-type signal from `n` iterations of `i d/dt` on term0.
pub fn appendix_signal_iterations(iterations: usize) -> Result<AppendixSignal, LocalityError> {
    let term0 = build_term0_symbolic_b();
    let it = idot_iterate_with(&term0.expr, iterations, &Evolution::linear())?;
    let spec = it.substitute(&appendix_bindings())?;
    let d_lambda = spec.derivative(&Var::param("lambda"));
    let raw = integrate_specialized(&d_lambda.to_expr())?;
    let normalization = gaussian_normalization(&QuadraticForm2::from_ints(4, 2, 4)?);
    let ratio = raw.checked_div(&normalization)?;
    // prefactor −b: the signal per unit b is −ratio
    let coefficient = ratio.neg();
    Ok(AppendixSignal { raw, normalization, ratio, coefficient, iterations })
}

/// The three-iteration pipeline: signal `32·b`.
pub fn appendix_signal() -> Result<AppendixSignal, LocalityError> {
    appendix_signal_iterations(3)
}
