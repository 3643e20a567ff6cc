//! Exact real numbers of the form `q·π^p·√r`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("result {0} is outside the q*pi^p*sqrt(r) class")]
    OutOfClass(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse exact scalar `{0}`")]
    Parse(String),
}

/// `q·π^p·√r` with `p ∈ {0, 1}` and `r` a square-free positive integer.
/// Zero is always `(0, 0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    q: BigRational,
    pi: u8,
    r: BigInt,
}

/// Splits `n > 0` into `(s, f)` with `n = s²·f` and `f` square-free.
fn square_free(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut outside = BigInt::one();
    let mut inside = BigInt::one();
    let mut p = BigInt::from(2u32);
    while &p * &p <= rest {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            outside *= num_traits::pow(p.clone(), (e / 2) as usize);
            if e % 2 == 1 {
                inside *= &p;
            }
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    inside *= rest;
    (outside, inside)
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar { q: BigRational::zero(), pi: 0, r: BigInt::one() }
    }

    pub fn rational(q: BigRational) -> Self {
        ExactScalar::new(q, 0, BigRational::one()).expect("rational input is always in class")
    }

    pub fn from_int(n: i64) -> Self {
        ExactScalar::rational(BigRational::from_integer(n.into()))
    }

    pub fn pi() -> Self {
        ExactScalar { q: BigRational::one(), pi: 1, r: BigInt::one() }
    }

    /// `q·π^pi·√r` for any positive rational `r`; square factors move into `q`.
    pub fn new(q: BigRational, pi: u8, r: BigRational) -> Result<Self, ExactError> {
        if pi > 1 {
            return Err(ExactError::OutOfClass(format!("pi^{pi}")));
        }
        if !r.is_positive() {
            return Err(ExactError::OutOfClass(format!("sqrt({r})")));
        }
        if q.is_zero() {
            return Ok(ExactScalar::zero());
        }
        // √(n/d) = √(n·d)/d
        let (n, d) = (r.numer().clone(), r.denom().clone());
        let (s, f) = square_free(&(&n * &d));
        let q = q * BigRational::new(s, d);
        Ok(ExactScalar { q, pi, r: f })
    }

    /// `√r` for a positive rational.
    pub fn sqrt(r: BigRational) -> Result<Self, ExactError> {
        ExactScalar::new(BigRational::one(), 0, r)
    }

    pub fn coefficient(&self) -> &BigRational {
        &self.q
    }

    pub fn pi_exponent(&self) -> u8 {
        self.pi
    }

    pub fn radicand(&self) -> &BigInt {
        &self.r
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.pi == 0 && self.r.is_one()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.q)
    }

    pub fn neg(&self) -> Self {
        ExactScalar { q: -self.q.clone(), pi: self.pi, r: self.r.clone() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return ExactScalar::zero();
        }
        ExactScalar { q: &self.q * c, pi: self.pi, r: self.r.clone() }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.pi != other.pi || self.r != other.r {
            return Err(ExactError::OutOfClass(format!("{self} + {other}")));
        }
        let q = &self.q + &other.q;
        if q.is_zero() {
            return Ok(ExactScalar::zero());
        }
        Ok(ExactScalar { q, pi: self.pi, r: self.r.clone() })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        if self.is_zero() || other.is_zero() {
            return Ok(ExactScalar::zero());
        }
        ExactScalar::new(
            &self.q * &other.q,
            self.pi + other.pi,
            BigRational::from_integer(&self.r * &other.r),
        )
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ExactError> {
        if other.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(ExactScalar::zero());
        }
        if self.pi < other.pi {
            return Err(ExactError::OutOfClass(format!("({self})/({other})")));
        }
        ExactScalar::new(
            &self.q / &other.q,
            self.pi - other.pi,
            BigRational::new(self.r.clone(), other.r.clone()),
        )
    }

    pub fn to_f64(&self) -> f64 {
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        let r = self.r.to_f64().unwrap_or(f64::NAN).sqrt();
        let pi = if self.pi == 1 { std::f64::consts::PI } else { 1.0 };
        q * pi * r
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = Vec::new();
        if self.pi == 1 {
            parts.push("pi".into());
        }
        if !self.r.is_one() {
            parts.push(format!("sqrt({})", self.r));
        }
        if parts.is_empty() {
            return write!(f, "{}", self.q);
        }
        if self.q.is_one() {
            write!(f, "{}", parts.join("*"))
        } else if (-&self.q).is_one() {
            write!(f, "-{}", parts.join("*"))
        } else {
            write!(f, "{}*{}", self.q, parts.join("*"))
        }
    }
}

impl FromStr for ExactScalar {
    type Err = ExactError;

    /// Inverse of `Display`: `q`, `q*pi`, `q*sqrt(r)`, `q*pi*sqrt(r)`, with
    /// `q` optional (or a bare sign) when other factors are present.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExactError::Parse(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) if rest.starts_with("pi") || rest.starts_with("sqrt") => (true, rest),
            _ => (false, t),
        };
        let mut q = BigRational::one();
        let mut pi = 0u8;
        let mut r = BigRational::one();
        for (i, part) in body.split('*').enumerate() {
            if part == "pi" {
                pi += 1;
            } else if let Some(inner) = part.strip_prefix("sqrt(").and_then(|p| p.strip_suffix(')')) {
                r = inner.parse::<BigRational>().map_err(|_| bad())?;
            } else if i == 0 {
                q = part.parse::<BigRational>().map_err(|_| bad())?;
            } else {
                return Err(bad());
            }
        }
        if neg {
            q = -q;
        }
        ExactScalar::new(q, pi, r)
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `re + i·im` with both parts exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactComplex {
    pub re: ExactScalar,
    pub im: ExactScalar,
}

impl ExactComplex {
    pub fn zero() -> Self {
        ExactComplex { re: ExactScalar::zero(), im: ExactScalar::zero() }
    }

    pub fn real(re: ExactScalar) -> Self {
        ExactComplex { re, im: ExactScalar::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `(a + ib)·s` for complex rational `a + ib` and real exact `s`.
    pub fn from_parts(a: &BigRational, b: &BigRational, s: &ExactScalar) -> Self {
        ExactComplex { re: s.scale(a), im: s.scale(b) }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        Ok(ExactComplex { re: self.re.checked_add(&other.re)?, im: self.im.checked_add(&other.im)? })
    }

    /// Division by a real exact scalar.
    pub fn checked_div_real(&self, d: &ExactScalar) -> Result<Self, ExactError> {
        Ok(ExactComplex { re: self.re.checked_div(d)?, im: self.im.checked_div(d)? })
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        ExactComplex { re: self.re.scale(c), im: self.im.scale(c) }
    }

    /// The real part, if the imaginary part is exactly zero.
    pub fn into_real(self) -> Option<ExactScalar> {
        self.im.is_zero().then_some(self.re)
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "I*({})", self.im),
            (false, false) => write!(f, "{} + I*({})", self.re, self.im),
        }
    }
}
