//! Expression trees over wavefunction atoms and the rewriting operations used
//! by the exact locality pipeline.
//!
//! Two representations coexist:
//!
//! * [`Expr`], an ordinary tree that the parser produces, the printer consumes
//!   and [`differentiate`] walks without simplifying;
//! * [`Poly`], the rational normal form: a sum of coefficient × monomial terms
//!   where monomials may carry negative powers of atoms. Every denominator the
//!   pipeline produces is a product of atoms, so this Laurent form is closed
//!   under all the operations we need.
//!
//! [`normalize`] maps a tree to its canonical tree by round-tripping through
//! [`Poly`].

mod coeff;
mod diff;
mod eval;
mod parse;
mod poly;
mod print;
mod subst;

use std::fmt;
use std::sync::Arc;

pub use coeff::Coeff;
pub use diff::differentiate;
pub use eval::{EvalError, Scalar};
pub use parse::{parse_expression, ParseError, Parser};
pub use poly::{Factor, Monomial, Poly};
pub use subst::{
    substitute, substitute_time_derivatives, substitute_time_derivatives_with, Bindings,
    Evolution, ToPoly,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolicError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of zero")]
    LogOfZero,
    #[error("time-derivative order {order} on {atom} (differentiate and substitute one order at a time)")]
    HigherTimeDerivative { atom: FieldAtom, order: u32 },
    #[error("binding for derivative atom {0} without a binding for its base atom")]
    DerivativeBindingWithoutBase(FieldAtom),
    #[error("binding for {0} disagrees with the derivative of the base binding")]
    IncoherentBinding(FieldAtom),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Spatial and time coordinates of the two-particle configuration space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    X,
    Y,
    T,
}

impl Coord {
    pub fn name(self) -> &'static str {
        match self {
            Coord::X => "x",
            Coord::Y => "y",
            Coord::T => "t",
        }
    }
}

/// `P` stands for Ψ, `PB` for its complex conjugate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldKind {
    P,
    PB,
}

impl FieldKind {
    pub fn conj(self) -> Self {
        match self {
            FieldKind::P => FieldKind::PB,
            FieldKind::PB => FieldKind::P,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldKind::P => "P",
            FieldKind::PB => "PB",
        }
    }
}

/// Orders of differentiation carried by a field atom.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DerivTag {
    pub x: u32,
    pub y: u32,
    pub t: u32,
}

impl DerivTag {
    pub fn new(x: u32, y: u32, t: u32) -> Self {
        DerivTag { x, y, t }
    }

    pub fn is_base(&self) -> bool {
        self.x == 0 && self.y == 0 && self.t == 0
    }

    pub fn bump(mut self, c: Coord) -> Self {
        match c {
            Coord::X => self.x += 1,
            Coord::Y => self.y += 1,
            Coord::T => self.t += 1,
        }
        self
    }

    pub fn order(&self, c: Coord) -> u32 {
        match c {
            Coord::X => self.x,
            Coord::Y => self.y,
            Coord::T => self.t,
        }
    }
}

/// A (possibly differentiated) wavefunction atom. Field order makes the
/// derived ordering `P < PB < derivative atoms`, the latter lexicographic in
/// their orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldAtom {
    pub tag: DerivTag,
    pub kind: FieldKind,
}

impl FieldAtom {
    pub fn base(kind: FieldKind) -> Self {
        FieldAtom { tag: DerivTag::default(), kind }
    }

    pub fn new(kind: FieldKind, x: u32, y: u32, t: u32) -> Self {
        FieldAtom { tag: DerivTag::new(x, y, t), kind }
    }

    pub fn conj(self) -> Self {
        FieldAtom { tag: self.tag, kind: self.kind.conj() }
    }
}

impl fmt::Display for FieldAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tag.is_base() {
            return write!(f, "{}", self.kind.name());
        }
        write!(f, "diff({}", self.kind.name())?;
        for c in [Coord::X, Coord::Y, Coord::T] {
            match self.tag.order(c) {
                0 => {}
                1 => write!(f, ",{}", c.name())?,
                n => write!(f, ",{},{}", c.name(), n)?,
            }
        }
        write!(f, ")")
    }
}

/// Interned parameter name (λ is spelled `lambda`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A differentiation variable: a coordinate or a named parameter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Coord(Coord),
    Param(Symbol),
}

impl From<Coord> for Var {
    fn from(c: Coord) -> Self {
        Var::Coord(c)
    }
}

impl Var {
    pub fn param(name: &str) -> Self {
        Var::Param(Symbol::new(name))
    }
}

/// Symbolic expression tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(Coeff),
    Param(Symbol),
    Coord(Coord),
    Field(FieldAtom),
    /// `order`-th derivative of the external potential `V`, applied to `arg`.
    Potential { order: u32, arg: Box<Expr> },
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i64),
    Ln(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(Coeff::from_int(n))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::Const(Coeff::from_ratio(num, den))
    }

    pub fn i() -> Expr {
        Expr::Const(Coeff::i())
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(Symbol::new(name))
    }

    pub fn x() -> Expr {
        Expr::Coord(Coord::X)
    }

    pub fn y() -> Expr {
        Expr::Coord(Coord::Y)
    }

    pub fn t() -> Expr {
        Expr::Coord(Coord::T)
    }

    pub fn psi() -> Expr {
        Expr::Field(FieldAtom::base(FieldKind::P))
    }

    pub fn psi_bar() -> Expr {
        Expr::Field(FieldAtom::base(FieldKind::PB))
    }

    pub fn field(kind: FieldKind, x: u32, y: u32, t: u32) -> Expr {
        Expr::Field(FieldAtom::new(kind, x, y, t))
    }

    /// `V(arg)`.
    pub fn potential(arg: Expr) -> Expr {
        Expr::Potential { order: 0, arg: Box::new(arg) }
    }

    pub fn pow(self, e: i64) -> Expr {
        Expr::Pow(Box::new(self), e)
    }

    pub fn ln(self) -> Expr {
        Expr::Ln(Box::new(self))
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        Expr::Add(terms)
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        Expr::Mul(factors)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    /// Rational normal form of this tree.
    pub fn to_poly(&self) -> Result<Poly, SymbolicError> {
        Poly::from_expr(self)
    }

    /// True if any node is a logarithm.
    pub fn contains_ln(&self) -> bool {
        match self {
            Expr::Ln(_) => true,
            Expr::Const(_) | Expr::Param(_) | Expr::Coord(_) | Expr::Field(_) => false,
            Expr::Potential { arg, .. } => arg.contains_ln(),
            Expr::Add(v) | Expr::Mul(v) => v.iter().any(Expr::contains_ln),
            Expr::Pow(b, _) | Expr::Exp(b) => b.contains_ln(),
        }
    }

    /// Number of nodes, for diagnostics.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Param(_) | Expr::Coord(_) | Expr::Field(_) => 1,
            Expr::Potential { arg, .. } => 1 + arg.size(),
            Expr::Add(v) | Expr::Mul(v) => 1 + v.iter().map(Expr::size).sum::<usize>(),
            Expr::Pow(b, _) | Expr::Ln(b) | Expr::Exp(b) => 1 + b.size(),
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, rhs])
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Add(vec![self, Expr::Mul(vec![Expr::int(-1), rhs])])
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(vec![self, rhs])
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Mul(vec![Expr::int(-1), self])
    }
}

/// Canonical tree of `e`: collected terms over a single monomial denominator,
/// logs of products split, logs under derivatives eliminated.
///
/// Idempotent, and the result re-parses to an identical tree.
pub fn normalize(e: &Expr) -> Result<Expr, SymbolicError> {
    Ok(Poly::from_expr(e)?.to_expr())
}
