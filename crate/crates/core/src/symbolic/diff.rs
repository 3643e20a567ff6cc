//! Tree-level differentiation. Results are unsimplified apart from pruning of
//! zero branches; pass them through `normalize` for a canonical form.

use super::{Expr, Var};

fn depends(e: &Expr, v: &Var) -> bool {
    match e {
        Expr::Const(_) => false,
        Expr::Param(s) => matches!(v, Var::Param(p) if p == s),
        Expr::Coord(c) => matches!(v, Var::Coord(d) if d == c),
        Expr::Field(_) => matches!(v, Var::Coord(_)),
        Expr::Potential { arg, .. } => depends(arg, v),
        Expr::Add(xs) | Expr::Mul(xs) => xs.iter().any(|x| depends(x, v)),
        Expr::Pow(b, _) | Expr::Ln(b) | Expr::Exp(b) => depends(b, v),
    }
}

fn mul(mut factors: Vec<Expr>) -> Expr {
    if factors.iter().any(Expr::is_zero) {
        return Expr::zero();
    }
    factors.retain(|f| !matches!(f, Expr::Const(c) if c.is_one()));
    match factors.len() {
        0 => Expr::int(1),
        1 => factors.pop().unwrap(),
        _ => Expr::Mul(factors),
    }
}

fn add(mut terms: Vec<Expr>) -> Expr {
    terms.retain(|t| !t.is_zero());
    match terms.len() {
        0 => Expr::zero(),
        1 => terms.pop().unwrap(),
        _ => Expr::Add(terms),
    }
}

/// ∂e/∂v by the sum, product, power, chain and logarithm rules.
///
/// Field atoms depend on every coordinate: ∂/∂x of `diff(P,y)` is
/// `diff(P,x,y)`. The potential is a function of its argument only.
pub fn differentiate(e: &Expr, v: &Var) -> Expr {
    if !depends(e, v) {
        return Expr::zero();
    }
    match e {
        Expr::Const(_) | Expr::Param(_) | Expr::Coord(_) => Expr::int(1),
        Expr::Field(a) => {
            let c = match v {
                Var::Coord(c) => *c,
                Var::Param(_) => unreachable!("fields do not depend on parameters"),
            };
            Expr::Field(super::FieldAtom { tag: a.tag.bump(c), kind: a.kind })
        }
        Expr::Potential { order, arg } => mul(vec![
            Expr::Potential { order: order + 1, arg: arg.clone() },
            differentiate(arg, v),
        ]),
        Expr::Add(xs) => add(xs.iter().map(|x| differentiate(x, v)).collect()),
        Expr::Mul(xs) => {
            let mut terms = Vec::new();
            for (i, x) in xs.iter().enumerate() {
                let dx = differentiate(x, v);
                if dx.is_zero() {
                    continue;
                }
                let mut fs: Vec<Expr> = xs.clone();
                fs[i] = dx;
                terms.push(mul(fs));
            }
            add(terms)
        }
        Expr::Pow(b, n) => {
            let db = differentiate(b, v);
            let lowered = if *n - 1 == 1 { (**b).clone() } else { Expr::Pow(b.clone(), n - 1) };
            mul(vec![Expr::int(*n), lowered, db])
        }
        Expr::Ln(b) => mul(vec![differentiate(b, v), Expr::Pow(b.clone(), -1)]),
        Expr::Exp(b) => mul(vec![e.clone(), differentiate(b, v)]),
    }
}
