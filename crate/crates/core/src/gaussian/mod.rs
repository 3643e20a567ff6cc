//! Exact integrals over ℝ² of polynomial × centered Gaussian integrands.

mod exact;

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use exact::{ExactComplex, ExactError, ExactScalar};

use crate::symbolic::{Coord, Expr, Factor, Monomial, Poly, SymbolicError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussianError {
    #[error("quadratic form is not positive definite")]
    NotPositiveDefinite,
    #[error("term has no Gaussian factor: {0}")]
    MissingGaussian(String),
    #[error("exponent is not a centered quadratic form in x, y: {0}")]
    NonGaussianExponential(String),
    #[error("integrand is not polynomial × Gaussian: {0}")]
    NonPolynomial(String),
    #[error("integral depends on unbound parameters: {0}")]
    ResidualParameter(String),
    #[error("integral has a nonzero imaginary part: {0}")]
    ComplexResult(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// Symmetric 2×2 rational matrix `M`, used as the exponent `−½ xᵀ M x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticForm2 {
    m11: BigRational,
    m12: BigRational,
    m22: BigRational,
}

impl QuadraticForm2 {
    pub fn new(m11: BigRational, m12: BigRational, m22: BigRational) -> Result<Self, GaussianError> {
        let det = &m11 * &m22 - &m12 * &m12;
        if !det.is_positive() || !(&m11 + &m22).is_positive() {
            return Err(GaussianError::NotPositiveDefinite);
        }
        Ok(QuadraticForm2 { m11, m12, m22 })
    }

    pub fn from_ints(m11: i64, m12: i64, m22: i64) -> Result<Self, GaussianError> {
        let r = |n: i64| BigRational::from_integer(n.into());
        QuadraticForm2::new(r(m11), r(m12), r(m22))
    }

    pub fn det(&self) -> BigRational {
        &self.m11 * &self.m22 - &self.m12 * &self.m12
    }

    pub fn entries(&self) -> [&BigRational; 3] {
        [&self.m11, &self.m12, &self.m22]
    }

    pub fn scaled(&self, c: &BigRational) -> Result<Self, GaussianError> {
        QuadraticForm2::new(&self.m11 * c, &self.m12 * c, &self.m22 * c)
    }

    /// `Σ = M⁻¹` as a row-major 2×2 array.
    pub fn covariance(&self) -> Vec<Vec<BigRational>> {
        let d = self.det();
        vec![
            vec![&self.m22 / &d, -&self.m12 / &d],
            vec![-&self.m12 / &d, &self.m11 / &d],
        ]
    }

    /// Reads `M` off a polynomial exponent `q = −½ xᵀ M x` in `x`, `y`.
    pub fn from_exponent(q: &Poly) -> Result<Self, GaussianError> {
        let bad = || GaussianError::NonGaussianExponential(q.to_expr().to_string());
        let coeffs = q.coefficients_in(&[Coord::X, Coord::Y]).ok_or_else(bad)?;
        let mut m = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
        for (key, c) in coeffs {
            let c = c.as_constant().filter(|c| c.is_real()).ok_or_else(bad)?.re;
            match (key[0], key[1]) {
                (2, 0) => m[0] = -c * BigRational::from_integer(2.into()),
                (1, 1) => m[1] = -c,
                (0, 2) => m[2] = -c * BigRational::from_integer(2.into()),
                _ => return Err(bad()),
            }
        }
        let [m11, m12, m22] = m;
        QuadraticForm2::new(m11, m12, m22)
    }
}

/// `∫_ℝ² exp(−½ xᵀ M x) = 2π/√det M`.
pub fn gaussian_normalization(m: &QuadraticForm2) -> ExactScalar {
    ExactScalar::new(BigRational::from_integer(2.into()), 1, m.det().recip())
        .expect("positive determinant gives an in-class value")
}

/// Centered Gaussian moment `E[∏ xᵢ^{αᵢ}]` for covariance `Σ`, by the
/// Isserlis recursion `E[xᵢ x^β] = Σⱼ βⱼ Σᵢⱼ E[x^{β−eⱼ}]`.
/// Works in any dimension.
pub fn isserlis_moment(sigma: &[Vec<BigRational>], alpha: &[u32]) -> BigRational {
    fn rec(
        sigma: &[Vec<BigRational>],
        alpha: Vec<u32>,
        memo: &mut HashMap<Vec<u32>, BigRational>,
    ) -> BigRational {
        let total: u32 = alpha.iter().sum();
        if total == 0 {
            return BigRational::one();
        }
        if total % 2 == 1 {
            return BigRational::zero();
        }
        if let Some(v) = memo.get(&alpha) {
            return v.clone();
        }
        let i = alpha.iter().position(|&a| a > 0).expect("nonzero total");
        let mut beta = alpha.clone();
        beta[i] -= 1;
        let mut acc = BigRational::zero();
        for j in 0..beta.len() {
            if beta[j] == 0 || sigma[i][j].is_zero() {
                continue;
            }
            let mut gamma = beta.clone();
            gamma[j] -= 1;
            let sub = rec(sigma, gamma, memo);
            acc += &sigma[i][j] * BigRational::from_integer(beta[j].into()) * sub;
        }
        memo.insert(alpha, acc.clone());
        acc
    }
    rec(sigma, alpha.to_vec(), &mut HashMap::new())
}

/// `∫_ℝ² x^a y^b exp(−½ xᵀ M x)`.
pub fn gaussian_moment(m: &QuadraticForm2, a: u32, b: u32) -> ExactScalar {
    let e = isserlis_moment(&m.covariance(), &[a, b]);
    gaussian_normalization(m).scale(&e)
}

/// Integral of a polynomial-times-Gaussian normal form, grouped by the
/// monomial in the remaining parameters.
pub fn integrate_by_parameters(p: &Poly) -> Result<BTreeMap<Monomial, ExactComplex>, GaussianError> {
    let mut out: BTreeMap<Monomial, ExactComplex> = BTreeMap::new();
    let mut forms: HashMap<Poly, (QuadraticForm2, Vec<Vec<BigRational>>, ExactScalar)> = HashMap::new();
    for (mono, c) in p.terms() {
        let (mut a, mut b) = (0u32, 0u32);
        let mut exponent: Option<&Poly> = None;
        let mut params = Poly::one();
        for (f, e) in mono.factors() {
            match f {
                Factor::Coord(Coord::X) if *e > 0 => a = *e as u32,
                Factor::Coord(Coord::Y) if *e > 0 => b = *e as u32,
                Factor::Param(_) => {
                    params = params.mul(&Poly::from_factor(f.clone()).powi(*e)?);
                }
                Factor::Exp(q) if *e == 1 => exponent = Some(q),
                other => {
                    return Err(GaussianError::NonPolynomial(
                        Poly::from_factor(other.clone()).to_expr().to_string(),
                    ))
                }
            }
        }
        let q = exponent.ok_or_else(|| {
            GaussianError::MissingGaussian(Poly::from_monomial(mono.clone(), c.clone()).to_expr().to_string())
        })?;
        if !forms.contains_key(q) {
            let m = QuadraticForm2::from_exponent(q)?;
            let sigma = m.covariance();
            let norm = gaussian_normalization(&m);
            forms.insert(q.clone(), (m, sigma, norm));
        }
        let (_, sigma, norm) = &forms[q];
        let moment = isserlis_moment(sigma, &[a, b]);
        if moment.is_zero() {
            continue;
        }
        let value = ExactComplex::from_parts(&(&c.re * &moment), &(&c.im * &moment), norm);
        let (pm, _) = params.as_monomial().expect("product of parameter powers is a monomial");
        let slot = out.entry(pm.clone()).or_insert_with(ExactComplex::zero);
        *slot = slot.checked_add(&value)?;
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Exact complex integral over ℝ²; parameters must cancel.
pub fn integrate_specialized_complex(e: &Expr) -> Result<ExactComplex, GaussianError> {
    let groups = integrate_by_parameters(&Poly::from_expr(e)?)?;
    let mut result = ExactComplex::zero();
    for (mono, v) in groups {
        if !mono.is_one() {
            return Err(GaussianError::ResidualParameter(
                Poly::from_monomial(mono, crate::symbolic::Coeff::one()).to_expr().to_string(),
            ));
        }
        result = v;
    }
    Ok(result)
}

/// Exact real integral over ℝ² of a fully specialized polynomial × Gaussian.
pub fn integrate_specialized(e: &Expr) -> Result<ExactScalar, GaussianError> {
    let v = integrate_specialized_complex(e)?;
    let shown = v.to_string();
    v.into_real().ok_or(GaussianError::ComplexResult(shown))
}
