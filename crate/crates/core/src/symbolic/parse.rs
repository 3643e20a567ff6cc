//! Recursive-descent parser for the expression grammar (see `docs/grammar.md`).
//!
//! `diff(e, v, n, ...)` of a bare `P`/`PB` yields a derivative atom; of any
//! other expression it is evaluated eagerly with [`differentiate`], so the
//! tree never contains an unevaluated derivative node.
//!
//! The builders fold constant subtrees and flatten nested sums and products,
//! which makes canonical trees survive a print/parse round trip unchanged.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use super::{differentiate, Coeff, Coord, DerivTag, Expr, FieldAtom, FieldKind, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { pos: usize, name: String },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Prime,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '\'' => Tok::Prime,
            d if d.is_ascii_digit() || d == '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let text = &src[start..i];
                out.push((Tok::Num(parse_decimal(text, start)?), start));
                continue;
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            other => {
                return Err(ParseError::Syntax { pos: start, msg: format!("unexpected character `{other}`") })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

fn parse_decimal(text: &str, pos: usize) -> Result<BigRational, ParseError> {
    let bad = || ParseError::Syntax { pos, msg: format!("malformed number `{text}`") };
    let (int_part, frac_part) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    if frac_part.contains('.') || (int_part.is_empty() && frac_part.is_empty()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    Ok(BigRational::new(numer, denom))
}

/// Parser with a configurable set of parameter names.
#[derive(Clone, Debug)]
pub struct Parser {
    params: BTreeSet<String>,
}

impl Default for Parser {
    fn default() -> Self {
        let params = ["lambda", "b", "k", "D", "c1", "c2", "c3", "c4", "c5"];
        Parser { params: params.iter().map(|s| s.to_string()).collect() }
    }
}

impl Parser {
    pub fn new() -> Self {
        Parser::default()
    }

    /// Adds parameter names on top of the defaults.
    pub fn with_params<I: IntoIterator<Item = S>, S: Into<String>>(mut self, names: I) -> Self {
        self.params.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn parse(&self, src: &str) -> Result<Expr, ParseError> {
        let toks = lex(src)?;
        let mut st = State { toks, pos: 0, params: &self.params };
        let e = st.expr()?;
        match st.peek() {
            Tok::End => Ok(e),
            t => Err(st.err(format!("unexpected {t:?} after expression"))),
        }
    }
}

/// Parses with the default parameter set
/// (`lambda`, `b`, `k`, `D`, `c1`..`c5`).
pub fn parse_expression(src: &str) -> Result<Expr, ParseError> {
    Parser::default().parse(src)
}

struct State<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    params: &'a BTreeSet<String>,
}

impl State<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: String) -> ParseError {
        ParseError::Syntax { pos: self.here(), msg }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {t:?}, found {:?}", self.peek())))
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    terms.push(negate(t));
                }
                _ => break,
            }
        }
        Ok(build_add(terms))
    }

    // term := unary (('*' | '/') unary)*
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    factors.push(self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    let at = self.here();
                    let d = self.unary()?;
                    match d {
                        Expr::Const(c) => {
                            let inv = c.inv().ok_or(ParseError::Syntax { pos: at, msg: "division by zero".into() })?;
                            factors.push(Expr::Const(inv));
                        }
                        other => factors.push(build_pow(other, -1)),
                    }
                }
                _ => break,
            }
        }
        Ok(build_mul(factors))
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(negate(self.unary()?));
        }
        self.power()
    }

    // power := primary ('^' exponent)?
    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let n = self.exponent()?;
        Ok(build_pow(base, n))
    }

    // exponent := ['-'] INT | '(' ['-'] INT ')'
    fn exponent(&mut self) -> Result<i64, ParseError> {
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let neg = *self.peek() == Tok::Minus;
        if neg {
            self.bump();
        }
        let n = self.integer()?;
        if paren {
            self.expect(Tok::RParen)?;
        }
        Ok(if neg { -n } else { n })
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        match self.peek().clone() {
            Tok::Num(q) if q.is_integer() => {
                let v: i64 = q
                    .to_integer()
                    .try_into()
                    .map_err(|_| self.err("integer out of range".into()))?;
                self.bump();
                Ok(v)
            }
            t => Err(self.err(format!("expected integer, found {t:?}"))),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.here();
        match self.bump() {
            Tok::Num(q) => Ok(Expr::Const(Coeff::real(q))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name, at),
            t => Err(ParseError::Syntax { pos: at, msg: format!("unexpected {t:?}") }),
        }
    }

    fn ident(&mut self, name: String, at: usize) -> Result<Expr, ParseError> {
        match name.as_str() {
            "x" => Ok(Expr::Coord(Coord::X)),
            "y" => Ok(Expr::Coord(Coord::Y)),
            "t" => Ok(Expr::Coord(Coord::T)),
            "I" => Ok(Expr::i()),
            "P" => Ok(Expr::Field(FieldAtom::base(FieldKind::P))),
            "PB" => Ok(Expr::Field(FieldAtom::base(FieldKind::PB))),
            "V" => {
                let mut order = 0;
                while *self.peek() == Tok::Prime {
                    self.bump();
                    order += 1;
                }
                self.expect(Tok::LParen)?;
                let arg = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Potential { order, arg: Box::new(arg) })
            }
            "ln" | "exp" => {
                self.expect(Tok::LParen)?;
                let arg = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(if name == "ln" { Expr::Ln(Box::new(arg)) } else { Expr::Exp(Box::new(arg)) })
            }
            "diff" => self.diff(),
            p if self.params.contains(p) => Ok(Expr::Param(super::Symbol::new(p))),
            _ => Err(ParseError::UnknownIdentifier { pos: at, name }),
        }
    }

    // diff '(' expr (',' coord [',' INT])+ ')'
    fn diff(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen)?;
        let target = self.expr()?;
        let mut orders: Vec<(Coord, u32)> = Vec::new();
        while *self.peek() == Tok::Comma {
            self.bump();
            let at = self.here();
            let coord = match self.bump() {
                Tok::Ident(v) if v == "x" => Coord::X,
                Tok::Ident(v) if v == "y" => Coord::Y,
                Tok::Ident(v) if v == "t" => Coord::T,
                t => {
                    return Err(ParseError::Syntax { pos: at, msg: format!("expected x, y or t, found {t:?}") })
                }
            };
            let mut n = 1;
            if *self.peek() == Tok::Comma && matches!(self.toks[self.pos + 1].0, Tok::Num(_)) {
                self.bump();
                let v = self.integer()?;
                if v < 0 {
                    return Err(self.err("negative derivative order".into()));
                }
                n = v as u32;
            }
            orders.push((coord, n));
        }
        if orders.is_empty() {
            return Err(self.err("diff needs at least one variable".into()));
        }
        self.expect(Tok::RParen)?;
        if let Expr::Field(a) = &target {
            let mut tag: DerivTag = a.tag;
            for (c, n) in &orders {
                for _ in 0..*n {
                    tag = tag.bump(*c);
                }
            }
            return Ok(Expr::Field(FieldAtom { tag, kind: a.kind }));
        }
        let mut e = target;
        for (c, n) in orders {
            for _ in 0..n {
                e = differentiate(&e, &Var::Coord(c));
            }
        }
        Ok(e)
    }
}

fn negate(e: Expr) -> Expr {
    build_mul(vec![Expr::int(-1), e])
}

fn build_add(terms: Vec<Expr>) -> Expr {
    let mut flat = Vec::with_capacity(terms.len());
    for t in terms {
        match t {
            Expr::Add(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    if flat.iter().all(|t| matches!(t, Expr::Const(_))) {
        let mut acc = Coeff::zero();
        for t in &flat {
            if let Expr::Const(c) = t {
                acc += c;
            }
        }
        return Expr::Const(acc);
    }
    if flat.len() == 1 {
        return flat.pop().unwrap();
    }
    Expr::Add(flat)
}

fn build_mul(factors: Vec<Expr>) -> Expr {
    let mut coeff = Coeff::one();
    let mut rest = Vec::with_capacity(factors.len());
    for f in factors {
        match f {
            Expr::Const(c) => coeff = &coeff * &c,
            Expr::Mul(inner) => {
                for g in inner {
                    match g {
                        Expr::Const(c) => coeff = &coeff * &c,
                        other => rest.push(other),
                    }
                }
            }
            other => rest.push(other),
        }
    }
    if rest.is_empty() || coeff.is_zero() {
        return Expr::Const(coeff);
    }
    if coeff.is_one() {
        if rest.len() == 1 {
            return rest.pop().unwrap();
        }
        return Expr::Mul(rest);
    }
    let mut out = vec![Expr::Const(coeff)];
    out.extend(rest);
    Expr::Mul(out)
}

fn build_pow(base: Expr, n: i64) -> Expr {
    if n == 1 {
        return base;
    }
    if let Expr::Const(c) = &base {
        if let Some(v) = c.pow(n) {
            return Expr::Const(v);
        }
    }
    if n == 0 {
        return Expr::Const(Coeff::real(BigRational::one()));
    }
    Expr::Pow(Box::new(base), n)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_power_of_coordinate() {
        assert_eq!(parse_expression("x^2").unwrap(), Expr::Pow(Box::new(Expr::x()), 2));
    }

    #[test]
    fn parses_potential_times_atom() {
        assert_eq!(parse_expression("V(y)*P").unwrap(), Expr::Mul(vec![Expr::potential(Expr::y()), Expr::psi()]));
    }

    #[test]
    fn derivative_atoms_accumulate_orders() {
        let e = parse_expression("diff(P,x,2,y)").unwrap();
        assert_eq!(e, Expr::field(FieldKind::P, 2, 1, 0));
        assert_eq!(e.to_string(), "diff(P,x,2,y)");
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_expression("0.25").unwrap(), Expr::ratio(1, 4));
    }

    #[test]
    fn unknown_identifier_reports_position() {
        match parse_expression("x + foo") {
            Err(ParseError::UnknownIdentifier { pos, name }) => {
                assert_eq!(pos, 4);
                assert_eq!(name, "foo");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_position() {
        match parse_expression("x + * y") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expression("(x"), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse_expression("x/0"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn extra_parameters() {
        assert!(parse_expression("C11*x").is_err());
        let p = Parser::new().with_params(["C11"]);
        assert!(p.parse("C11*x").is_ok());
    }
}
