//! One-sided finite-difference weights from exact Vandermonde solves.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Weights `w` with `f⁽ᵏ⁾(0) ≈ Σⱼ wⱼ f(jΔ) / Δᵏ` over nodes `j = 0..m`,
/// exact for polynomials of degree below `m`. Requires `m > k`.
pub fn one_sided_weights(k: usize, m: usize) -> Vec<f64> {
    exact_weights(k, m).iter().map(|w| w.to_f64().expect("finite weight")).collect()
}

pub fn exact_weights(k: usize, m: usize) -> Vec<BigRational> {
    assert!(m > k, "need more nodes than the derivative order");
    // Rows p = 0..m: Σⱼ wⱼ jᵖ = k!·δ_{pk}.
    let mut a: Vec<Vec<BigRational>> = (0..m)
        .map(|p| {
            (0..m)
                .map(|j| BigRational::from_integer(num_traits::pow(BigInt::from(j), p)))
                .collect()
        })
        .collect();
    let fact = (1..=k).fold(BigRational::one(), |acc, i| acc * BigRational::from_integer(BigInt::from(i)));
    let mut rhs: Vec<BigRational> = (0..m).map(|p| if p == k { fact.clone() } else { BigRational::zero() }).collect();
    for col in 0..m {
        let piv = (col..m).find(|&r| !a[r][col].is_zero()).expect("Vandermonde matrix is nonsingular");
        a.swap(col, piv);
        rhs.swap(col, piv);
        let inv = BigRational::one() / a[col][col].clone();
        for c in col..m {
            a[col][c] = &a[col][c] * &inv;
        }
        rhs[col] = &rhs[col] * &inv;
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..m {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
                let v = &f * &rhs[col];
                rhs[r] -= v;
            }
        }
    }
    rhs
}

/// Applies weights to samples spaced `dt` apart.
pub fn apply(weights: &[f64], samples: &[f64], k: usize, dt: f64) -> f64 {
    weights.iter().zip(samples).map(|(w, s)| w * s).sum::<f64>() / dt.powi(k as i32)
}
