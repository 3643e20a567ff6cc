//! Rational normal form.
//!
//! A [`Poly`] is a finite sum of `Coeff × Monomial`, a [`Monomial`] a sorted
//! product of [`Factor`] powers with non-zero integer exponents. Invariants
//! maintained by every constructor in this module:
//!
//! * no zero coefficients, no zero exponents;
//! * at most one `Exp` factor per monomial, always to the power 1 (powers are
//!   folded into the exponent), never `exp(0)`;
//! * `Sum` factors (non-monomial polynomials) only appear with negative
//!   exponents; their polynomial has at least two terms, leading coefficient 1
//!   and no common atom factor;
//! * `Ln` factors hold either a single atom or a canonical `Sum` polynomial;
//!   logs of products are always split.

use std::collections::BTreeMap;

use super::{Coeff, Coord, Expr, FieldAtom, SymbolicError, Symbol, Var};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    Field(FieldAtom),
    Potential { order: u32, arg: Poly },
    Coord(Coord),
    Param(Symbol),
    Ln(Poly),
    Exp(Poly),
    Sum(Poly),
}

impl Factor {
    /// Whether the factor can vary with `var`. Field atoms depend on every
    /// coordinate and on no parameter.
    pub fn depends_on(&self, var: &Var) -> bool {
        match self {
            Factor::Field(_) => matches!(var, Var::Coord(_)),
            Factor::Coord(c) => *var == Var::Coord(*c),
            Factor::Param(s) => *var == Var::Param(s.clone()),
            Factor::Potential { arg, .. } => arg.depends_on(var),
            Factor::Ln(p) | Factor::Exp(p) | Factor::Sum(p) => p.depends_on(var),
        }
    }

    fn is_exp(&self) -> bool {
        matches!(self, Factor::Exp(_))
    }

    fn is_sum(&self) -> bool {
        matches!(self, Factor::Sum(_))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Factor, i64)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Factor, i64)] {
        &self.0
    }

    pub fn exponent_of(&self, f: &Factor) -> i64 {
        self.0
            .binary_search_by(|(g, _)| g.cmp(f))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    fn single(f: Factor, e: i64) -> Self {
        Monomial::one().mul(&Monomial(vec![(f, e)]))
    }

    /// Product with exponent merging; `Exp` factors fold into one.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out: Vec<(Factor, i64)> = Vec::with_capacity(a.len() + b.len());
        let mut exp_acc: Option<Poly> = None;
        let mut push = |f: &Factor, e: i64, out: &mut Vec<(Factor, i64)>| {
            if let Factor::Exp(q) = f {
                let add = q.scale(&Coeff::from_int(e));
                exp_acc = Some(match exp_acc.take() {
                    Some(acc) => acc.add(&add),
                    None => add,
                });
            } else if let Some(last) = out.last_mut().filter(|(g, _)| g == f) {
                last.1 += e;
            } else {
                out.push((f.clone(), e));
            }
        };
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 <= b[j].0);
            if take_a {
                push(&a[i].0, a[i].1, &mut out);
                i += 1;
            } else {
                push(&b[j].0, b[j].1, &mut out);
                j += 1;
            }
        }
        out.retain(|(_, e)| *e != 0);
        if let Some(q) = exp_acc.filter(|q| !q.is_zero()) {
            let f = Factor::Exp(q);
            let pos = out.partition_point(|(g, _)| *g < f);
            out.insert(pos, (f, 1));
        }
        Monomial(out)
    }

    /// `self` with the exponent of `f` shifted by `delta`.
    fn shifted(&self, f: &Factor, delta: i64) -> Monomial {
        let mut v = self.0.clone();
        match v.binary_search_by(|(g, _)| g.cmp(f)) {
            Ok(i) => {
                v[i].1 += delta;
                if v[i].1 == 0 {
                    v.remove(i);
                }
            }
            Err(i) => v.insert(i, (f.clone(), delta)),
        }
        Monomial(v)
    }

    /// `self^e` as a polynomial; positive powers of `Sum` factors expand.
    pub fn pow(&self, e: i64) -> Poly {
        let mut mono = Monomial::one();
        let mut expanded = Poly::one();
        for (f, k) in &self.0 {
            let n = k * e;
            match f {
                Factor::Sum(p) if n > 0 => expanded = expanded.mul(&p.pow_nonneg(n as u64)),
                Factor::Exp(q) => mono = mono.mul(&Monomial::single(Factor::Exp(q.scale(&Coeff::from_int(n))), 1)),
                _ => mono = mono.mul(&Monomial(vec![(f.clone(), n)])),
            }
        }
        Poly::from_monomial(mono, Coeff::one()).mul(&expanded)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        Poly::from_monomial(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(Coeff::from_int(n))
    }

    pub fn from_monomial(m: Monomial, c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    /// A single atom-like factor to the first power. `Exp`, `Ln` and `Sum`
    /// factors should go through [`Poly::exp`], [`Poly::ln`] and
    /// [`Poly::powi`] so that their invariants hold.
    pub fn from_factor(f: Factor) -> Self {
        Poly::from_monomial(Monomial::single(f, 1), Coeff::one())
    }

    pub fn field(a: FieldAtom) -> Self {
        Poly::from_factor(Factor::Field(a))
    }

    pub fn coord(c: Coord) -> Self {
        Poly::from_factor(Factor::Coord(c))
    }

    pub fn param(name: &str) -> Self {
        Poly::from_factor(Factor::Param(Symbol::new(name)))
    }

    /// `V^(order)(arg)`.
    pub fn potential(order: u32, arg: Poly) -> Self {
        Poly::from_factor(Factor::Potential { order, arg })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    /// The constant value, if the polynomial has no non-constant term.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<(&Monomial, &Coeff)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&Coeff::from_int(-1))
    }

    pub fn scale(&self, c: &Coeff) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    fn mul_monomial(&self, m: &Monomial, c: &Coeff) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            out.add_term(ma.mul(m), ca * c);
        }
        out
    }

    fn pow_nonneg(&self, mut n: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Integer power. Negative powers of a multi-term polynomial become a
    /// canonical `Sum` factor.
    pub fn powi(&self, e: i64) -> Result<Poly, SymbolicError> {
        if e >= 0 {
            return Ok(self.pow_nonneg(e as u64));
        }
        if self.is_zero() {
            return Err(SymbolicError::DivisionByZero);
        }
        if let Some((m, c)) = self.as_monomial() {
            let c = c.pow(e).ok_or(SymbolicError::DivisionByZero)?;
            return Ok(m.pow(e).scale(&c));
        }
        let (c, g, rest) = self.split_content();
        let c = c.pow(e).ok_or(SymbolicError::DivisionByZero)?;
        Ok(g.pow(e).mul_monomial(&Monomial::single(Factor::Sum(rest), e), &c))
    }

    /// Splits `self = c · g · rest` with `rest` monic and free of common atom
    /// factors. Only meaningful for two or more terms.
    fn split_content(&self) -> (Coeff, Monomial, Poly) {
        let lead = self.terms.values().next().cloned().unwrap_or_else(Coeff::one);
        let mut gcd: BTreeMap<Factor, i64> = BTreeMap::new();
        let mut common_exp: Option<Option<&Factor>> = None;
        for (idx, m) in self.terms.keys().enumerate() {
            let exp_f = m.0.iter().find(|(f, _)| f.is_exp()).map(|(f, _)| f);
            common_exp = Some(match common_exp {
                None => exp_f,
                Some(prev) if prev == exp_f => prev,
                Some(_) => None,
            });
            if idx == 0 {
                for (f, e) in &m.0 {
                    if !f.is_exp() && !f.is_sum() {
                        gcd.insert(f.clone(), *e);
                    }
                }
                continue;
            }
            for (f, g) in gcd.iter_mut() {
                *g = (*g).min(m.exponent_of(f));
            }
            for (f, e) in &m.0 {
                if *e < 0 && !f.is_exp() && !f.is_sum() && !gcd.contains_key(f) {
                    gcd.insert(f.clone(), *e);
                }
            }
        }
        let mut content: Vec<(Factor, i64)> = gcd.into_iter().filter(|(_, e)| *e != 0).collect();
        if let Some(Some(f)) = common_exp {
            content.push((f.clone(), 1));
            content.sort_by(|a, b| a.0.cmp(&b.0));
        }
        let g = Monomial(content);
        let inv_lead = lead.inv().unwrap_or_else(Coeff::one);
        let mut rest = Poly::zero();
        for (m, c) in &self.terms {
            let mut q = m.clone();
            for (f, e) in &g.0 {
                q = q.shifted(f, -e);
            }
            rest.add_term(q, c * &inv_lead);
        }
        (lead, g, rest)
    }

    /// Natural logarithm; products are split, `ln(exp(q)) = q`.
    pub fn ln(&self) -> Result<Poly, SymbolicError> {
        if self.is_zero() {
            return Err(SymbolicError::LogOfZero);
        }
        let (c, m, opaque) = match self.as_monomial() {
            Some((m, c)) => (c.clone(), m.clone(), None),
            None => {
                let (c, g, rest) = self.split_content();
                (c, g, Some(rest))
            }
        };
        let mut out = Poly::zero();
        if !c.is_one() {
            out.add_assign(&Poly::from_factor(Factor::Ln(Poly::constant(c))));
        }
        for (f, e) in &m.0 {
            let term = match f {
                Factor::Exp(q) => q.clone(),
                Factor::Sum(p) => Poly::from_factor(Factor::Ln(p.clone())),
                other => Poly::from_factor(Factor::Ln(Poly::from_factor(other.clone()))),
            };
            out.add_assign(&term.scale(&Coeff::from_int(*e)));
        }
        if let Some(rest) = opaque {
            out.add_assign(&Poly::from_factor(Factor::Ln(rest)));
        }
        Ok(out)
    }

    /// Exponential; integer multiples of single logs fold back to powers.
    pub fn exp(&self) -> Result<Poly, SymbolicError> {
        let mut out = Poly::one();
        let mut rest = Poly::zero();
        for (m, c) in &self.terms {
            let folded = match m.0.as_slice() {
                [(Factor::Ln(inner), 1)] if c.is_real() && c.re.is_integer() => {
                    let n: i64 = c.re.to_integer().try_into().unwrap_or(i64::MAX);
                    (n != i64::MAX).then_some((inner, n))
                }
                _ => None,
            };
            match folded {
                Some((inner, n)) => out = out.mul(&inner.powi(n)?),
                None => rest.add_term(m.clone(), c.clone()),
            }
        }
        if !rest.is_zero() {
            out = out.mul_monomial(&Monomial(vec![(Factor::Exp(rest), 1)]), &Coeff::one());
        }
        Ok(out)
    }

    pub fn depends_on(&self, var: &Var) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(f, _)| f.depends_on(var)))
    }

    /// Exact partial derivative.
    pub fn derivative(&self, var: &Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (f, e) in &m.0 {
                let df = factor_derivative(f, var);
                if df.is_zero() {
                    continue;
                }
                let rest = m.shifted(f, -1);
                let term = df.mul_monomial(&rest, &(c * &Coeff::from_int(*e)));
                out.add_assign(&term);
            }
        }
        out
    }

    /// Applies `coeff_map` to every coefficient and `factor_map` to every
    /// factor, then re-multiplies through the canonicalizing constructors.
    pub(crate) fn rebuild(
        &self,
        coeff_map: &dyn Fn(&Coeff) -> Coeff,
        factor_map: &mut dyn FnMut(&Factor) -> Result<Poly, SymbolicError>,
    ) -> Result<Poly, SymbolicError> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(coeff_map(c));
            for (f, e) in &m.0 {
                let fp = factor_map(f)?;
                acc = acc.mul(&fp.powi(*e)?);
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign(&acc);
        }
        Ok(out)
    }

    /// Complex conjugate: `P ↔ PB`, coefficients conjugated; parameters and
    /// coordinates are real.
    pub fn conj(&self) -> Poly {
        fn conj_factor(f: &Factor) -> Result<Poly, SymbolicError> {
            Ok(match f {
                Factor::Field(a) => Poly::field(a.conj()),
                Factor::Potential { order, arg } => Poly::potential(*order, arg.conj()),
                Factor::Coord(_) | Factor::Param(_) => Poly::from_factor(f.clone()),
                Factor::Ln(p) => p.conj().ln()?,
                Factor::Exp(q) => q.conj().exp()?,
                Factor::Sum(p) => p.conj(),
            })
        }
        self.rebuild(&|c| c.conj(), &mut conj_factor)
            .expect("conjugation of a canonical polynomial cannot divide by zero")
    }

    /// Coefficients as a polynomial in `vars`: maps exponent vectors to
    /// coefficient polynomials free of `vars`. `None` if some term is not
    /// polynomial in `vars` (negative powers, atoms, exponentials, ...).
    pub fn coefficients_in(&self, vars: &[Coord]) -> Option<BTreeMap<Vec<u32>, Poly>> {
        let mut out: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut key = vec![0u32; vars.len()];
            let mut rest = Vec::new();
            for (f, e) in &m.0 {
                match f {
                    Factor::Coord(cd) if vars.contains(cd) => {
                        if *e < 0 {
                            return None;
                        }
                        let idx = vars.iter().position(|v| v == cd)?;
                        key[idx] = *e as u32;
                    }
                    other => {
                        if vars.iter().any(|v| other.depends_on(&Var::Coord(*v))) {
                            return None;
                        }
                        rest.push((other.clone(), *e));
                    }
                }
            }
            let mut entry = out.remove(&key).unwrap_or_default();
            entry.add_term(Monomial(rest), c.clone());
            if !entry.is_zero() {
                out.insert(key, entry);
            }
        }
        Some(out)
    }

    /// Builds the normal form of a tree.
    pub fn from_expr(e: &Expr) -> Result<Poly, SymbolicError> {
        Ok(match e {
            Expr::Const(c) => Poly::constant(c.clone()),
            Expr::Param(s) => Poly::from_factor(Factor::Param(s.clone())),
            Expr::Coord(c) => Poly::coord(*c),
            Expr::Field(a) => Poly::field(*a),
            Expr::Potential { order, arg } => Poly::potential(*order, Poly::from_expr(arg)?),
            Expr::Add(v) => {
                let mut out = Poly::zero();
                for t in v {
                    out.add_assign(&Poly::from_expr(t)?);
                }
                out
            }
            Expr::Mul(v) => {
                let mut out = Poly::one();
                for f in v {
                    out = out.mul(&Poly::from_expr(f)?);
                    if out.is_zero() {
                        break;
                    }
                }
                out
            }
            Expr::Pow(b, n) => Poly::from_expr(b)?.powi(*n)?,
            Expr::Ln(a) => Poly::from_expr(a)?.ln()?,
            Expr::Exp(a) => Poly::from_expr(a)?.exp()?,
        })
    }

    /// Canonical tree: `Add` of terms in monomial order, each term
    /// `Mul([Const(c)?, factors...])` with the constant omitted when it is 1.
    pub fn to_expr(&self) -> Expr {
        let mut terms: Vec<Expr> = self.terms.iter().map(|(m, c)| term_expr(m, c)).collect();
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::Add(terms),
        }
    }
}

fn factor_expr(f: &Factor) -> Expr {
    match f {
        Factor::Field(a) => Expr::Field(*a),
        Factor::Potential { order, arg } => Expr::Potential { order: *order, arg: Box::new(arg.to_expr()) },
        Factor::Coord(c) => Expr::Coord(*c),
        Factor::Param(s) => Expr::Param(s.clone()),
        Factor::Ln(p) => Expr::Ln(Box::new(p.to_expr())),
        Factor::Exp(q) => Expr::Exp(Box::new(q.to_expr())),
        Factor::Sum(p) => p.to_expr(),
    }
}

fn term_expr(m: &Monomial, c: &Coeff) -> Expr {
    let mut factors: Vec<Expr> = m
        .0
        .iter()
        .map(|(f, e)| if *e == 1 { factor_expr(f) } else { Expr::Pow(Box::new(factor_expr(f)), *e) })
        .collect();
    if factors.is_empty() {
        return Expr::Const(c.clone());
    }
    if c.is_one() && factors.len() == 1 {
        return factors.pop().unwrap();
    }
    if !c.is_one() {
        factors.insert(0, Expr::Const(c.clone()));
    }
    Expr::Mul(factors)
}

fn factor_derivative(f: &Factor, var: &Var) -> Poly {
    match f {
        Factor::Field(a) => match var {
            Var::Coord(c) => Poly::field(FieldAtom { tag: a.tag.bump(*c), kind: a.kind }),
            Var::Param(_) => Poly::zero(),
        },
        Factor::Potential { order, arg } => {
            let da = arg.derivative(var);
            if da.is_zero() {
                Poly::zero()
            } else {
                Poly::potential(order + 1, arg.clone()).mul(&da)
            }
        }
        Factor::Coord(c) => {
            if *var == Var::Coord(*c) {
                Poly::one()
            } else {
                Poly::zero()
            }
        }
        Factor::Param(s) => {
            if *var == Var::Param(s.clone()) {
                Poly::one()
            } else {
                Poly::zero()
            }
        }
        Factor::Ln(p) => {
            let dp = p.derivative(var);
            if dp.is_zero() {
                Poly::zero()
            } else {
                dp.mul(&p.powi(-1).expect("log argument is non-zero"))
            }
        }
        Factor::Exp(q) => {
            let dq = q.derivative(var);
            if dq.is_zero() {
                Poly::zero()
            } else {
                Poly::from_monomial(Monomial(vec![(f.clone(), 1)]), Coeff::one()).mul(&dq)
            }
        }
        Factor::Sum(p) => p.derivative(var),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::FieldKind;

    fn x() -> Poly {
        Poly::coord(Coord::X)
    }
    fn y() -> Poly {
        Poly::coord(Coord::Y)
    }
    fn p() -> Poly {
        Poly::field(FieldAtom::base(FieldKind::P))
    }
    fn pb() -> Poly {
        Poly::field(FieldAtom::base(FieldKind::PB))
    }

    #[test]
    fn exp_factors_merge() {
        let a = x().exp().unwrap();
        let b = y().exp().unwrap();
        let prod = a.mul(&b);
        assert_eq!(prod, x().add(&y()).exp().unwrap());
        let inv = a.powi(-1).unwrap();
        assert_eq!(a.mul(&inv), Poly::one());
    }

    #[test]
    fn ln_splits_products_and_cancels_exp() {
        let l = pb().mul(&p()).ln().unwrap();
        assert_eq!(l, p().ln().unwrap().add(&pb().ln().unwrap()));
        let q = x().mul(&x()).neg();
        assert_eq!(q.exp().unwrap().ln().unwrap(), q);
    }

    #[test]
    fn exp_of_integer_log_folds() {
        let l = p().ln().unwrap().scale(&Coeff::from_int(2));
        assert_eq!(l.exp().unwrap(), p().mul(&p()));
    }

    #[test]
    fn sum_inverse_is_canonical() {
        let s = x().scale(&Coeff::from_int(2)).add(&y().scale(&Coeff::from_int(2)));
        let a = s.powi(-1).unwrap();
        let b = x().add(&y()).powi(-1).unwrap().scale(&Coeff::from_ratio(1, 2));
        assert_eq!(a, b);
        let with_atom = x().mul(&p()).add(&y().mul(&p())).powi(-1).unwrap();
        let expected = x().add(&y()).powi(-1).unwrap().mul(&p().powi(-1).unwrap());
        assert_eq!(with_atom, expected);
    }

    #[test]
    fn derivative_of_sum_inverse() {
        let s = x().add(&y()).powi(-1).unwrap();
        let d = s.derivative(&Var::Coord(Coord::X));
        assert_eq!(d, x().add(&y()).powi(-2).unwrap().neg());
    }

    #[test]
    fn coefficients_extraction() {
        let lam = Poly::param("lambda");
        let e = lam.mul(&y()).mul(&y()).add(&x().scale(&Coeff::from_int(3)));
        let c = e.coefficients_in(&[Coord::X, Coord::Y]).unwrap();
        assert_eq!(c[&vec![0, 2]], lam);
        assert_eq!(c[&vec![1, 0]], Poly::int(3));
        assert!(p().coefficients_in(&[Coord::X]).is_none());
    }
}
