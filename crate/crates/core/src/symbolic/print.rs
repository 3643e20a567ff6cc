//! Deterministic serialization. For canonical trees (the output of
//! `normalize`) the printed text parses back to an identical tree.

use std::fmt::{self, Write};

use super::{Coeff, Expr};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Product,
    Power,
}

fn coeff_is_negative(c: &Coeff) -> bool {
    use num_traits::Signed;
    c.is_negative_real() || (num_traits::Zero::is_zero(&c.re) && c.im.is_negative())
}

/// Whether a term prints with a leading minus (so an enclosing sum can write
/// ` - ` instead of ` + -`).
fn is_negative(e: &Expr) -> bool {
    match e {
        Expr::Const(c) => coeff_is_negative(c),
        Expr::Mul(v) => matches!(v.first(), Some(Expr::Const(c)) if coeff_is_negative(c)),
        _ => false,
    }
}

fn negated(e: &Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Mul(v) => match v.split_first() {
            Some((Expr::Const(c), rest)) => {
                let c = -c;
                if c.is_one() {
                    if rest.len() == 1 {
                        rest[0].clone()
                    } else {
                        Expr::Mul(rest.to_vec())
                    }
                } else {
                    let mut out = vec![Expr::Const(c)];
                    out.extend_from_slice(rest);
                    Expr::Mul(out)
                }
            }
            _ => Expr::Mul(vec![Expr::int(-1), e.clone()]),
        },
        other => Expr::Mul(vec![Expr::int(-1), other.clone()]),
    }
}

fn write_expr(out: &mut String, e: &Expr, ctx: Prec) -> fmt::Result {
    match e {
        Expr::Const(c) => {
            let plain = c.is_real() && c.re.is_integer() && !c.is_negative_real();
            if ctx == Prec::Power && !plain {
                write!(out, "({c})")
            } else if ctx == Prec::Product && coeff_is_negative(c) {
                write!(out, "({c})")
            } else {
                write!(out, "{c}")
            }
        }
        Expr::Param(s) => write!(out, "{s}"),
        Expr::Coord(c) => write!(out, "{}", c.name()),
        Expr::Field(a) => write!(out, "{a}"),
        Expr::Potential { order, arg } => {
            write!(out, "V{}(", "'".repeat(*order as usize))?;
            write_expr(out, arg, Prec::Sum)?;
            write!(out, ")")
        }
        Expr::Ln(a) => {
            write!(out, "ln(")?;
            write_expr(out, a, Prec::Sum)?;
            write!(out, ")")
        }
        Expr::Exp(a) => {
            write!(out, "exp(")?;
            write_expr(out, a, Prec::Sum)?;
            write!(out, ")")
        }
        Expr::Add(terms) => {
            let paren = ctx > Prec::Sum;
            if paren {
                write!(out, "(")?;
            }
            if terms.is_empty() {
                write!(out, "0")?;
            }
            for (i, t) in terms.iter().enumerate() {
                if i == 0 {
                    write_expr(out, t, Prec::Sum)?;
                } else if is_negative(t) {
                    write!(out, " - ")?;
                    write_expr(out, &negated(t), Prec::Sum)?;
                } else {
                    write!(out, " + ")?;
                    write_expr(out, t, Prec::Sum)?;
                }
            }
            if paren {
                write!(out, ")")?;
            }
            Ok(())
        }
        Expr::Mul(factors) => {
            let paren = ctx > Prec::Product || (ctx == Prec::Product && is_negative(e));
            if paren {
                write!(out, "(")?;
            }
            if factors.is_empty() {
                write!(out, "1")?;
            }
            let mut first = true;
            for (i, f) in factors.iter().enumerate() {
                if i == 0 {
                    if let Expr::Const(c) = f {
                        if factors.len() > 1 && (-c).is_one() {
                            write!(out, "-")?;
                            continue;
                        }
                        if factors.len() > 1 {
                            write!(out, "{c}")?;
                            first = false;
                            continue;
                        }
                    }
                }
                if !first {
                    write!(out, "*")?;
                }
                first = false;
                write_expr(out, f, Prec::Product)?;
            }
            if paren {
                write!(out, ")")?;
            }
            Ok(())
        }
        Expr::Pow(b, n) => {
            let paren = ctx > Prec::Power;
            if paren {
                write!(out, "(")?;
            }
            write_expr(out, b, Prec::Power)?;
            if *n < 0 {
                write!(out, "^({n})")?;
            } else {
                write!(out, "^{n}")?;
            }
            if paren {
                write!(out, ")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self, Prec::Sum)?;
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use crate::symbolic::{normalize, parse_expression, Expr};

    fn canon(s: &str) -> String {
        normalize(&parse_expression(s).unwrap()).unwrap().to_string()
    }

    #[test]
    fn prints_sums_with_minus() {
        assert_eq!(canon("x - 3/2*y"), "x - 3/2*y");
        assert_eq!(canon("-x^2"), "-x^2");
        assert_eq!(canon("exp(-x^2-y^2-x*y)"), "exp(-x*y - x^2 - y^2)");
    }

    #[test]
    fn prints_negative_powers_and_derivatives() {
        assert_eq!(canon("diff(P,x)/P"), "P^(-1)*diff(P,x)");
        assert_eq!(canon("1/(x+y)"), "(x + y)^(-1)");
    }

    #[test]
    fn prints_complex_coefficients() {
        assert_eq!(canon("I*x/2 + x"), "(1+1/2*I)*x");
        assert_eq!(canon("-2*I*x"), "-2*I*x");
        assert_eq!(Expr::i().to_string(), "I");
    }

    #[test]
    fn prints_potential_derivatives() {
        let e = crate::symbolic::differentiate(&parse_expression("V(y)").unwrap(), &crate::symbolic::Coord::Y.into());
        assert_eq!(normalize(&e).unwrap().to_string(), "V'(y)");
    }
}
