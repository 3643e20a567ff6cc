//! Truncated Taylor series in `t` with exact complex-rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::symbolic::Coeff;

/// `Σ_{j<len} c_j t^j`; products truncate at the longer length.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSeries {
    c: Vec<Coeff>,
}

impl ExactSeries {
    pub fn constant(v: Coeff, len: usize) -> Self {
        let mut c = vec![Coeff::zero(); len.max(1)];
        c[0] = v;
        ExactSeries { c }
    }

    pub fn from_coefficients(c: Vec<Coeff>) -> Self {
        assert!(!c.is_empty(), "series needs at least one coefficient");
        ExactSeries { c }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn coefficient(&self, j: usize) -> Coeff {
        self.c.get(j).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn set_coefficient(&mut self, j: usize, v: Coeff) {
        self.c[j] = v;
    }

    /// `dʲ/dtʲ` at `t = 0`.
    pub fn derivative_at_zero(&self, j: usize) -> Coeff {
        let fact: BigInt = (1..=j as u64).map(BigInt::from).product();
        &self.coefficient(j) * &Coeff::real(BigRational::from_integer(fact))
    }

    pub fn conj(&self) -> Self {
        ExactSeries { c: self.c.iter().map(Coeff::conj).collect() }
    }

    /// Coefficient-wise real part (the real part of the function for real `t`).
    pub fn re(&self) -> Self {
        ExactSeries { c: self.c.iter().map(|z| Coeff::real(z.re.clone())).collect() }
    }

    pub fn scale(&self, s: &Coeff) -> Self {
        ExactSeries { c: self.c.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        ExactSeries { c: (0..n).map(|j| &self.coefficient(j) + &other.coefficient(j)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Coeff::from_int(-1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        let c = (0..n)
            .map(|j| {
                let mut acc = Coeff::zero();
                for i in 0..=j {
                    acc += &(&self.coefficient(i) * &other.coefficient(j - i));
                }
                acc
            })
            .collect();
        ExactSeries { c }
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut acc = ExactSeries::constant(Coeff::one(), self.len());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `exp` of a series with zero constant term, from `e′ = f′e`.
    pub fn exp_of_small(&self) -> Option<Self> {
        if !self.c[0].is_zero() {
            return None;
        }
        let n = self.len();
        let mut e = vec![Coeff::zero(); n];
        e[0] = Coeff::one();
        for j in 1..n {
            let mut s = Coeff::zero();
            for i in 1..=j {
                s += &(&(&self.c[i] * &Coeff::from_int(i as i64)) * &e[j - i]);
            }
            e[j] = &s * &Coeff::from_ratio(1, j as i64);
        }
        Some(ExactSeries { c: e })
    }

    /// `fᵅ` for a series with constant term 1 and rational `α`, from
    /// `f·g′ = α f′·g`.
    pub fn pow_of_unit(&self, alpha: &BigRational) -> Option<Self> {
        if !self.c[0].is_one() {
            return None;
        }
        let n = self.len();
        let alpha = Coeff::real(alpha.clone());
        let mut g = vec![Coeff::zero(); n];
        g[0] = Coeff::one();
        for k in 1..n {
            let mut s = Coeff::zero();
            for j in 1..=k {
                // ((α + 1)·j − k)·f_j·g_{k−j}
                let w = &(&(&alpha + &Coeff::one()) * &Coeff::from_int(j as i64)) - &Coeff::from_int(k as i64);
                s += &(&(&w * &self.c[j]) * &g[k - j]);
            }
            g[k] = &s * &Coeff::from_ratio(1, k as i64);
        }
        Some(ExactSeries { c: g })
    }
}

impl Default for ExactSeries {
    fn default() -> Self {
        ExactSeries::constant(Coeff::zero(), 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    fn s(v: &[(i64, i64)]) -> ExactSeries {
        ExactSeries::from_coefficients(v.iter().map(|&(a, b)| Coeff::from_ratio(a, b)).collect())
    }

    #[test]
    fn exp_of_t_is_exponential_series() {
        let t = s(&[(0, 1), (1, 1), (0, 1), (0, 1), (0, 1)]);
        assert_eq!(t.exp_of_small().unwrap(), s(&[(1, 1), (1, 1), (1, 2), (1, 6), (1, 24)]));
    }

    #[test]
    fn exp_needs_zero_constant() {
        assert!(s(&[(1, 1), (1, 1)]).exp_of_small().is_none());
    }

    #[test]
    fn binomial_series() {
        // (1 + t)^{-3/2} = 1 − 3/2 t + 15/8 t² − 35/16 t³
        let f = s(&[(1, 1), (1, 1), (0, 1), (0, 1)]);
        assert_eq!(f.pow_of_unit(&rational(-3, 2)).unwrap(), s(&[(1, 1), (-3, 2), (15, 8), (-35, 16)]));
        // (1 + t)² = 1 + 2t + t²
        assert_eq!(f.pow_of_unit(&rational(2, 1)).unwrap(), s(&[(1, 1), (2, 1), (1, 1), (0, 1)]));
    }

    #[test]
    fn product_truncates() {
        let f = s(&[(1, 1), (1, 1), (0, 1)]);
        assert_eq!(f.mul(&f), s(&[(1, 1), (2, 1), (1, 1)]));
        assert_eq!(f.powi(3), s(&[(1, 1), (3, 1), (3, 1)]));
    }

    #[test]
    fn derivative_at_zero_uses_factorials() {
        let f = s(&[(0, 1), (0, 1), (0, 1), (2, 1)]);
        assert_eq!(f.derivative_at_zero(3), Coeff::from_int(12));
    }

    #[test]
    fn real_part_and_conjugate() {
        let f = ExactSeries::from_coefficients(vec![Coeff::i(), Coeff::from_int(2)]);
        assert_eq!(f.re(), s(&[(0, 1), (2, 1)]));
        assert_eq!(f.add(&f.conj()), s(&[(0, 1), (4, 1)]));
    }
}
