//! Formal T/D hierarchy:
//! `T_{k,ν} = ∫ e^{ikx} Ψ̄ ∂ₓ^ν Ψ` and `D_{k,μ,ν} = ∫ e^{ikx} (∂ₓ^μ R) Ψ̄ ∂ₓ^ν Ψ`,
//! related by `i dT_{k,ν}/dt = −k²T_{k,ν} + 2ik T_{k,ν+1} + Σ_{μ=1}^{ν} C(ν,μ) D_{k,μ,ν−μ}`.
//!
//! Expressions are linear combinations of symbols with coefficients that are
//! polynomials in `k`. Symbols carry a `k`-derivative order and a
//! time-derivative order so that `∂ₖ` at `k = 0` and `∂ₜ` act formally.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::gaussian::{integrate_by_parameters, ExactComplex};
use crate::symbolic::{Bindings, Coeff, Coord, Evolution, FieldAtom, FieldKind, Monomial, Poly, Var};

use super::LocalityError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TdKind {
    T { nu: u32 },
    D { mu: u32, nu: u32 },
}

/// `∂ₜ^dt ∂ₖ^dk` of a T or D integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TdSymbol {
    pub kind: TdKind,
    pub dk: u32,
    pub dt: u32,
}

impl TdSymbol {
    pub fn t(nu: u32) -> Self {
        TdSymbol { kind: TdKind::T { nu }, dk: 0, dt: 0 }
    }

    /// `D_{k,μ,ν}`; `μ ≥ 1`.
    pub fn d(mu: u32, nu: u32) -> Self {
        assert!(mu >= 1, "D symbols start at mu = 1");
        TdSymbol { kind: TdKind::D { mu, nu }, dk: 0, dt: 0 }
    }

    fn with_dt(mut self, extra: u32) -> Self {
        self.dt += extra;
        self
    }

    fn with_dk(mut self, extra: u32) -> Self {
        self.dk += extra;
        self
    }
}

impl fmt::Display for TdSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dt {
            0 => {}
            1 => write!(f, "dt ")?,
            n => write!(f, "dt^{n} ")?,
        }
        match self.dk {
            0 => {}
            1 => write!(f, "dk ")?,
            n => write!(f, "dk^{n} ")?,
        }
        match self.kind {
            TdKind::T { nu } => write!(f, "T[k,{nu}]"),
            TdKind::D { mu, nu } => write!(f, "D[k,{mu},{nu}]"),
        }
    }
}

/// Polynomial in `k` with complex rational coefficients, keyed by power.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KPoly(BTreeMap<u32, Coeff>);

impl KPoly {
    pub fn monomial(c: Coeff, power: u32) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(power, c);
        }
        KPoly(m)
    }

    pub fn coefficient(&self, power: u32) -> Coeff {
        self.0.get(&power).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_assign(&mut self, other: &KPoly) {
        for (p, c) in &other.0 {
            let e = self.0.entry(*p).or_insert_with(Coeff::zero);
            *e += c;
            if e.is_zero() {
                self.0.remove(p);
            }
        }
    }

    fn mul(&self, other: &KPoly) -> KPoly {
        let mut out = KPoly::default();
        for (p, a) in &self.0 {
            for (q, b) in &other.0 {
                out.add_assign(&KPoly::monomial(a * b, p + q));
            }
        }
        out
    }

    fn scale(&self, c: &Coeff) -> KPoly {
        let mut out = KPoly::default();
        for (p, a) in &self.0 {
            out.add_assign(&KPoly::monomial(a * c, *p));
        }
        out
    }

    /// `j`-th derivative evaluated at `k = 0`: `j!·[k^j]`.
    fn derivative_at_zero(&self, j: u32) -> Coeff {
        let fact: BigInt = (1..=j).map(BigInt::from).product();
        &self.coefficient(j) * &Coeff::real(BigRational::from_integer(fact))
    }
}

impl fmt::Display for KPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .rev()
            .map(|(p, c)| match p {
                0 => format!("{c}"),
                1 => format!("{c}*k"),
                _ => format!("{c}*k^{p}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Formal linear combination `Σ a_S(k)·S`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TdExpr(BTreeMap<TdSymbol, KPoly>);

impl TdExpr {
    pub fn zero() -> Self {
        TdExpr::default()
    }

    pub fn symbol(s: TdSymbol) -> Self {
        TdExpr::term(s, KPoly::monomial(Coeff::one(), 0))
    }

    pub fn term(s: TdSymbol, a: KPoly) -> Self {
        let mut e = TdExpr::zero();
        e.add_term(s, &a);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TdSymbol, &KPoly)> {
        self.0.iter()
    }

    /// Coefficient polynomial of `s` (zero if absent).
    pub fn coefficient(&self, s: &TdSymbol) -> KPoly {
        self.0.get(s).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, s: TdSymbol, a: &KPoly) {
        let e = self.0.entry(s).or_default();
        e.add_assign(a);
        if e.is_zero() {
            self.0.remove(&s);
        }
    }

    pub fn add(&self, other: &TdExpr) -> TdExpr {
        let mut out = self.clone();
        for (s, a) in &other.0 {
            out.add_term(*s, a);
        }
        out
    }

    pub fn scale(&self, c: &Coeff) -> TdExpr {
        let mut out = TdExpr::zero();
        for (s, a) in &self.0 {
            out.add_term(*s, &a.scale(c));
        }
        out
    }

    /// Applies `i d/dt`: T symbols (without k- or t-derivative tags) through
    /// the recurrence, everything else formally as `i·∂ₜ`.
    pub fn idot(&self) -> TdExpr {
        let mut out = TdExpr::zero();
        for (s, a) in &self.0 {
            let image = match s {
                TdSymbol { kind: TdKind::T { nu }, dk: 0, dt: 0 } => t_recurrence_rhs(*nu),
                other => TdExpr::symbol(other.with_dt(1)).scale(&Coeff::i()),
            };
            for (t, b) in &image.0 {
                out.add_term(*t, &a.mul(b));
            }
        }
        out
    }

    /// `∂ₖ^j` at `k = 0` by the Leibniz rule; the result has constant
    /// coefficients and symbols tagged with their `k`-derivative order.
    pub fn dk_at_zero(&self, j: u32) -> TdExpr {
        let mut out = TdExpr::zero();
        for (s, a) in &self.0 {
            for i in 0..=j {
                let c = a.derivative_at_zero(j - i);
                if c.is_zero() {
                    continue;
                }
                let binom = Coeff::real(BigRational::from_integer(binomial(j, i)));
                out.add_term(s.with_dk(i), &KPoly::monomial(&c * &binom, 0));
            }
        }
        out
    }

    /// `∂ₜⁿ` applied formally.
    pub fn dt(&self, n: u32) -> TdExpr {
        let mut out = TdExpr::zero();
        for (s, a) in &self.0 {
            out.add_term(s.with_dt(n), a);
        }
        out
    }

    /// Drops the terms whose symbol carries a `k`-derivative.
    pub fn without_k_derivative_terms(&self) -> TdExpr {
        TdExpr(self.0.iter().filter(|(s, _)| s.dk == 0).map(|(s, a)| (*s, a.clone())).collect())
    }

    /// Terms that contain no D symbol.
    pub fn pure_t_part(&self) -> TdExpr {
        TdExpr(
            self.0
                .iter()
                .filter(|(s, _)| matches!(s.kind, TdKind::T { .. }))
                .map(|(s, a)| (*s, a.clone()))
                .collect(),
        )
    }

    /// Sets `k = 0` in the coefficients.
    pub fn at_k_zero(&self) -> TdExpr {
        let mut out = TdExpr::zero();
        for (s, a) in &self.0 {
            out.add_term(*s, &KPoly::monomial(a.coefficient(0), 0));
        }
        out
    }
}

impl fmt::Display for TdExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|(s, a)| format!("({a})*{s}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// `i dT_{k,ν}/dt = −k²T_{k,ν} + 2ik T_{k,ν+1} + Σ_{μ=1}^{ν} C(ν,μ) D_{k,μ,ν−μ}`.
pub fn t_recurrence_rhs(nu: u32) -> TdExpr {
    let mut e = TdExpr::term(TdSymbol::t(nu), KPoly::monomial(Coeff::from_int(-1), 2));
    e.add_term(TdSymbol::t(nu + 1), &KPoly::monomial(Coeff::new(BigRational::zero(), BigRational::from_integer(2.into())), 1));
    for mu in 1..=nu {
        let c = Coeff::real(BigRational::from_integer(binomial(nu, mu)));
        e.add_term(TdSymbol::d(mu, nu - mu), &KPoly::monomial(c, 0));
    }
    e
}

/// `(i d/dt)³ T_{k,0}` by iterating the recurrence; no term is discarded.
pub fn third_iterate_t() -> TdExpr {
    TdExpr::symbol(TdSymbol::t(0)).idot().idot().idot()
}

/// `∂ₜ^{n+3} ∫x²|Ψ|²` at `t = 0`, from `−∂ₖ²` of `∂ₜ³T_{k,0} = i·(i d/dt)³T_{k,0}`
/// at `k = 0`, then `∂ₜⁿ`:
/// `8i·∂ₜⁿ(2D_{0,1,1} + D_{0,2,0}) + 4i·∂ₜ^{n+1}∂ₖD_{k,1,0}|_{k=0}`.
pub fn x2_moment_identity(n: u32) -> TdExpr {
    third_iterate_t()
        .scale(&Coeff::i())
        .dk_at_zero(2)
        .scale(&Coeff::from_int(-1))
        .dt(n)
}

/// Integrand (before `∫ dx dy`) of a symbol at `k = 0`, in the atoms.
/// `∂ₖ^j` brings down `(ix)^j`; `∂ₜ^m` is `(−i)^m (i∂ₜ)^m` under `evolution`.
pub fn td_integrand(s: &TdSymbol, r: &Poly, evolution: &Evolution) -> Result<Poly, LocalityError> {
    let x = Var::Coord(Coord::X);
    let p = Poly::field(FieldAtom::base(FieldKind::P));
    let pb = Poly::field(FieldAtom::base(FieldKind::PB));
    let nth = |mut q: Poly, n: u32| {
        for _ in 0..n {
            q = q.derivative(&x);
        }
        q
    };
    let mut e = match s.kind {
        TdKind::T { nu } => pb.mul(&nth(p.clone(), nu)),
        TdKind::D { mu, nu } => nth(r.clone(), mu).mul(&pb).mul(&nth(p.clone(), nu)),
    };
    let ix = Poly::coord(Coord::X).scale(&Coeff::i());
    for _ in 0..s.dk {
        e = e.mul(&ix);
    }
    let minus_i = Coeff::new(BigRational::zero(), -BigRational::one());
    for _ in 0..s.dt {
        e = evolution.apply(&e.derivative(&Var::Coord(Coord::T)))?.scale(&minus_i);
    }
    Ok(e)
}

/// Exact value of `expr` (constant coefficients) on a specialized state,
/// grouped by monomials in the remaining parameters.
pub fn evaluate_td(
    expr: &TdExpr,
    r: &Poly,
    evolution: &Evolution,
    bindings: &Bindings,
) -> Result<BTreeMap<Monomial, ExactComplex>, LocalityError> {
    let mut integrand = Poly::zero();
    for (s, a) in expr.terms() {
        let c = a.coefficient(0);
        integrand.add_assign(&td_integrand(s, r, evolution)?.scale(&c));
    }
    Ok(integrate_by_parameters(&integrand.substitute(bindings)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(c: Coeff, p: u32) -> KPoly {
        KPoly::monomial(c, p)
    }

    fn ci(n: i64) -> Coeff {
        Coeff::new(BigRational::zero(), BigRational::from_integer(n.into()))
    }

    #[test]
    fn recurrence_examples() {
        let r0 = t_recurrence_rhs(0);
        assert_eq!(r0.coefficient(&TdSymbol::t(0)), k(Coeff::from_int(-1), 2));
        assert_eq!(r0.coefficient(&TdSymbol::t(1)), k(ci(2), 1));
        assert_eq!(r0.terms().count(), 2);
        let r1 = t_recurrence_rhs(1);
        assert_eq!(r1.coefficient(&TdSymbol::d(1, 0)), k(Coeff::one(), 0));
        let r2 = t_recurrence_rhs(2);
        assert_eq!(r2.coefficient(&TdSymbol::d(1, 1)), k(Coeff::from_int(2), 0));
        assert_eq!(r2.coefficient(&TdSymbol::d(2, 0)), k(Coeff::one(), 0));
    }

    #[test]
    fn third_iterate_matches_displayed_formula() {
        let e = third_iterate_t();
        let mut expected = TdExpr::zero();
        expected.add_term(TdSymbol::t(0), &k(Coeff::from_int(-1), 6));
        expected.add_term(TdSymbol::t(1), &k(ci(6), 5));
        expected.add_term(TdSymbol::t(2), &k(Coeff::from_int(12), 4));
        expected.add_term(TdSymbol::t(3), &k(ci(-8), 3));
        expected.add_term(TdSymbol::d(1, 0), &k(ci(-4), 3));
        expected.add_term(TdSymbol::d(1, 1), &k(Coeff::from_int(-8), 2));
        expected.add_term(TdSymbol::d(2, 0), &k(Coeff::from_int(-4), 2));
        // (i d/dt) D = i ∂ₜD, so −2k ∂ₜD appears as coefficient 2ik·i.
        expected.add_term(TdSymbol::d(1, 0).with_dt(1), &k(Coeff::from_int(-2), 1));
        assert_eq!(e, expected, "{e}");
        assert!(e.at_k_zero().is_zero());
    }

    #[test]
    fn x2_identity_structure() {
        let e = x2_moment_identity(0);
        assert_eq!(e.coefficient(&TdSymbol::d(1, 1)), k(ci(16), 0));
        assert_eq!(e.coefficient(&TdSymbol::d(2, 0)), k(ci(8), 0));
        assert_eq!(e.coefficient(&TdSymbol::d(1, 0).with_dt(1).with_dk(1)), k(ci(4), 0));
        assert_eq!(e.terms().count(), 3);
        let shown = e.without_k_derivative_terms();
        assert_eq!(shown.terms().count(), 2);
        let e2 = x2_moment_identity(2);
        assert_eq!(e2.coefficient(&TdSymbol::d(1, 1).with_dt(2)), k(ci(16), 0));
    }

    #[test]
    fn dk_of_pure_t_terms_vanishes_at_zero() {
        let e = third_iterate_t().pure_t_part().dk_at_zero(2);
        assert!(e.is_zero());
    }
}
