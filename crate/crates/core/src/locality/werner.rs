//! Gaussian-ansatz test: for `Ψ = exp(γ − Σ C_jk x_j x_k / 2)` with
//! `V(y) = λy²` the evolution closes on `(γ, C)`. Exact time derivatives at
//! `t = 0` come from Taylor-solving the ODE; `∂λ` is a central difference.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::models::{decimal_rational, RFunctional};
use crate::symbolic::{Bindings, Coeff, Coord, EvalError, Factor, FieldKind, Poly, Var};

use super::report::{functional_point, SignalReport, TestId};
use super::series::ExactSeries;
use super::LocalityError;

/// Parameter names of the ansatz; `*b` names stand for complex conjugates.
pub const GAMMA: &str = "g";
pub const GAMMA_BAR: &str = "gb";
pub const C_NAMES: [&str; 3] = ["C11", "C12", "C22"];
pub const C_BAR_NAMES: [&str; 3] = ["C11b", "C12b", "C22b"];

/// Right-hand sides `d/dt` of `(γ, C₁₁, C₁₂, C₂₂)` as polynomials in the
/// ansatz parameters, their conjugates, `lambda` and any model parameters.
#[derive(Clone, Debug)]
pub struct GaussianOde {
    pub d_gamma: Poly,
    pub d_c11: Poly,
    pub d_c12: Poly,
    pub d_c22: Poly,
    /// `i∂ₜΨ/Ψ − (−ΔΨ + VΨ + RΨ)/Ψ` with the rates above; zero when the
    /// ansatz closes.
    pub residual: Poly,
}

impl GaussianOde {
    pub fn rates(&self) -> [&Poly; 4] {
        [&self.d_gamma, &self.d_c11, &self.d_c12, &self.d_c22]
    }
}

/// `γ − (C₁₁x² + 2C₁₂xy + C₂₂y²)/2`, or its conjugate.
pub fn gaussian_exponent(conjugate: bool) -> Poly {
    let (g, c) = if conjugate { (GAMMA_BAR, C_BAR_NAMES) } else { (GAMMA, C_NAMES) };
    let x = Poly::coord(Coord::X);
    let y = Poly::coord(Coord::Y);
    let quad = Poly::param(c[0])
        .mul(&x)
        .mul(&x)
        .add(&Poly::param(c[1]).mul(&x).mul(&y).scale(&Coeff::from_int(2)))
        .add(&Poly::param(c[2]).mul(&y).mul(&y));
    Poly::param(g).sub(&quad.scale(&Coeff::from_ratio(1, 2)))
}

/// Substitutes the ansatz into `i∂ₜΨ = (−Δ + λy² + R[Ψ])Ψ` and matches the
/// coefficients of `1, x², xy, y²`.
pub fn derive_gaussian_ode(r: &Poly) -> Result<GaussianOde, LocalityError> {
    let psi = gaussian_exponent(false).exp()?;
    let psi_bar = gaussian_exponent(true).exp()?;
    let bindings = Bindings::new().field(FieldKind::P, &psi)?.field(FieldKind::PB, &psi_bar)?;
    let r_psi = r.substitute(&bindings)?;
    let (dx, dy) = (Var::Coord(Coord::X), Var::Coord(Coord::Y));
    let lap = psi.derivative(&dx).derivative(&dx).add(&psi.derivative(&dy).derivative(&dy));
    let y = Poly::coord(Coord::Y);
    let v = Poly::param("lambda").mul(&y).mul(&y);
    let h_psi = lap.neg().add(&v.mul(&psi)).add(&r_psi.mul(&psi));
    let rhs = h_psi.mul(&psi.powi(-1)?);

    let coeffs = rhs
        .coefficients_in(&[Coord::X, Coord::Y])
        .ok_or_else(|| LocalityError::NotClosed(rhs.to_expr().to_string()))?;
    let mut extra = Poly::zero();
    for (key, c) in &coeffs {
        if !matches!(key.as_slice(), [0, 0] | [2, 0] | [1, 1] | [0, 2]) {
            extra.add_assign(c);
        }
    }
    if !extra.is_zero() {
        return Err(LocalityError::NotClosed(extra.to_expr().to_string()));
    }
    let get = |k: [u32; 2]| coeffs.get(k.as_slice()).cloned().unwrap_or_else(Poly::zero);
    let i = Coeff::i();
    let two_i = Coeff::new(BigRational::zero(), BigRational::from_integer(2.into()));
    let d_gamma = get([0, 0]).scale(&-&i);
    let d_c11 = get([2, 0]).scale(&two_i);
    let d_c12 = get([1, 1]).scale(&i);
    let d_c22 = get([0, 2]).scale(&two_i);

    // i∂ₜ of the exponent with the derived rates, minus the matched right side
    let x = Poly::coord(Coord::X);
    let dq = d_gamma.sub(
        &d_c11
            .mul(&x)
            .mul(&x)
            .add(&d_c12.mul(&x).mul(&y).scale(&Coeff::from_int(2)))
            .add(&d_c22.mul(&y).mul(&y))
            .scale(&Coeff::from_ratio(1, 2)),
    );
    let residual = dq.scale(&i).sub(&rhs);
    for p in [&d_gamma, &d_c11, &d_c12, &d_c22] {
        if p.terms().any(|(m, _)| m.factors().iter().any(|(f, e)| *e < 0 || !matches!(f, Factor::Param(_)))) {
            return Err(LocalityError::NotClosed(p.to_expr().to_string()));
        }
    }
    Ok(GaussianOde { d_gamma, d_c11, d_c12, d_c22, residual })
}

/// `(γ, C)` of the ansatz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianState {
    pub gamma: Complex64,
    pub c11: Complex64,
    pub c12: Complex64,
    pub c22: Complex64,
}

impl GaussianState {
    pub fn new(gamma: Complex64, c11: Complex64, c12: Complex64, c22: Complex64) -> Result<Self, LocalityError> {
        let s = GaussianState { gamma, c11, c12, c22 };
        let det = c11.re * c22.re - c12.re * c12.re;
        let finite = [gamma, c11, c12, c22].iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite || c11.re <= 0.0 || det <= 0.0 {
            return Err(LocalityError::InvalidGaussianState);
        }
        Ok(s)
    }

    /// Real `C` with `γ` fixed by `∫|Ψ|² = 1`.
    pub fn normalized_real(c: [[f64; 2]; 2]) -> Result<Self, LocalityError> {
        if c[0][1] != c[1][0] {
            return Err(LocalityError::InvalidGaussianState);
        }
        let det = c[0][0] * c[1][1] - c[0][1] * c[0][1];
        let gamma = 0.5 * (det.sqrt() / std::f64::consts::PI).ln();
        GaussianState::new(
            Complex64::new(gamma, 0.0),
            Complex64::new(c[0][0], 0.0),
            Complex64::new(c[0][1], 0.0),
            Complex64::new(c[1][1], 0.0),
        )
    }

    /// Default entangled state `C = [[2,1],[1,2]]`, normalized.
    pub fn default_entangled() -> Self {
        GaussianState::normalized_real([[2.0, 1.0], [1.0, 2.0]]).expect("positive definite")
    }
}

/// Moment of `ρ₁` tracked by the Gaussian-ansatz test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WernerObservable {
    /// `∫x₁²ρ₁`.
    SecondMoment,
    /// `∫x₁ρ₁`.
    FirstMoment,
}

impl WernerObservable {
    pub fn test_id(self) -> TestId {
        match self {
            WernerObservable::SecondMoment => TestId::Test1,
            WernerObservable::FirstMoment => TestId::Test3,
        }
    }
}

/// Exact rational image of a state (floats converted without rounding).
fn exact_state(state: &GaussianState) -> Result<[Coeff; 4], LocalityError> {
    let conv = |z: Complex64| -> Result<Coeff, LocalityError> {
        let re = BigRational::from_float(z.re).ok_or(LocalityError::NonFinite)?;
        let im = BigRational::from_float(z.im).ok_or(LocalityError::NonFinite)?;
        Ok(Coeff::new(re, im))
    };
    Ok([conv(state.gamma)?, conv(state.c11)?, conv(state.c12)?, conv(state.c22)?])
}

/// Evaluates a rate polynomial (parameters only, non-negative powers).
fn eval_rate(p: &Poly, env: &dyn Fn(&str) -> Option<ExactSeries>, len: usize) -> Result<ExactSeries, LocalityError> {
    let mut total = ExactSeries::constant(Coeff::zero(), len);
    for (m, c) in p.terms() {
        let mut acc = ExactSeries::constant(c.clone(), len);
        for (f, e) in m.factors() {
            let Factor::Param(sym) = f else {
                return Err(LocalityError::NotClosed(p.to_expr().to_string()));
            };
            let v = env(sym.as_str()).ok_or_else(|| EvalError::Unbound(sym.to_string()))?;
            acc = acc.mul(&v.powi(*e as u32));
        }
        total = total.add(&acc);
    }
    Ok(total)
}

/// Exact Taylor coefficients of `(γ, C₁₁, C₁₂, C₂₂)` up to `tⁿ` at fixed `λ`.
pub fn solve_taylor(
    ode: &GaussianOde,
    state: &GaussianState,
    lambda: &BigRational,
    n: usize,
) -> Result<[ExactSeries; 4], LocalityError> {
    let len = n + 1;
    let mut s = exact_state(state)?.map(|v| ExactSeries::constant(v, len));
    let lam = ExactSeries::constant(Coeff::real(lambda.clone()), len);
    for k in 0..n {
        let bars = s.clone().map(|x| x.conj());
        let env = |name: &str| -> Option<ExactSeries> {
            match name {
                GAMMA => Some(s[0].clone()),
                GAMMA_BAR => Some(bars[0].clone()),
                "lambda" => Some(lam.clone()),
                name => match C_NAMES.iter().position(|c| *c == name) {
                    Some(j) => Some(s[j + 1].clone()),
                    None => Some(bars[C_BAR_NAMES.iter().position(|c| *c == name)? + 1].clone()),
                },
            }
        };
        let rates: Vec<ExactSeries> =
            ode.rates().iter().map(|p| eval_rate(p, &env, len)).collect::<Result<_, _>>()?;
        for (j, r) in rates.iter().enumerate() {
            s[j].set_coefficient(k + 1, &r.coefficient(k) * &Coeff::from_ratio(1, (k + 1) as i64));
        }
    }
    Ok(s)
}

/// Observable series split as `K · S(t)` with a float constant `K` and an
/// exact series `S`. With `A = Re C`,
/// `∫x₁²ρ₁ = (π/2) e^{2Re γ} A₂₂ (det A)^{−3/2}`, so
/// `K = (π/2) e^{2Re γ₀} (det A₀)^{−3/2}` and
/// `S = A₂₂ (det A/det A₀)^{−3/2} e^{2Re(γ−γ₀)}`. The ansatz is centered, so
/// `∫x₁ρ₁ = 0`.
pub fn observable_series(s: &[ExactSeries; 4], obs: WernerObservable) -> Result<(f64, ExactSeries), LocalityError> {
    let len = s[0].len();
    match obs {
        WernerObservable::FirstMoment => Ok((0.0, ExactSeries::constant(Coeff::zero(), len))),
        WernerObservable::SecondMoment => {
            let (a11, a12, a22) = (s[1].re(), s[2].re(), s[3].re());
            let det = a11.mul(&a22).sub(&a12.mul(&a12));
            let det0 = det.coefficient(0).re;
            if det0 <= BigRational::zero() {
                return Err(LocalityError::InvalidGaussianState);
            }
            let rel = det.scale(&Coeff::real(det0.recip()));
            let det_pow = rel.pow_of_unit(&BigRational::new((-3).into(), 2.into())).ok_or(LocalityError::NonFinite)?;
            let g = s[0].re();
            let g0 = g.coefficient(0);
            let shifted = g.sub(&ExactSeries::constant(g0.clone(), len)).scale(&Coeff::from_int(2));
            let weight = shifted.exp_of_small().ok_or(LocalityError::NonFinite)?;
            let k = std::f64::consts::FRAC_PI_2 * (2.0 * g0.re.to_f64().unwrap_or(f64::NAN)).exp()
                * det0.to_f64().unwrap_or(f64::NAN).powf(-1.5);
            if !k.is_finite() {
                return Err(LocalityError::NonFinite);
            }
            Ok((k, a22.mul(&det_pow).mul(&weight)))
        }
    }
}

/// `∂ₜⁿ` of the observable at `t = 0` as `K · q` with exact rational `q`.
pub fn time_derivative_exact(
    ode: &GaussianOde,
    state: &GaussianState,
    lambda: &BigRational,
    n: usize,
    obs: WernerObservable,
) -> Result<(f64, BigRational), LocalityError> {
    let s = solve_taylor(ode, state, lambda, n)?;
    let (k, series) = observable_series(&s, obs)?;
    Ok((k, series.derivative_at_zero(n).re))
}

/// `∂ₜⁿ` of the observable at `t = 0` for fixed `λ`, as a float.
pub fn time_derivative(
    ode: &GaussianOde,
    state: &GaussianState,
    lambda: f64,
    n: usize,
    obs: WernerObservable,
) -> Result<f64, LocalityError> {
    let (k, q) = time_derivative_exact(ode, state, &decimal_rational(lambda), n, obs)?;
    Ok(k * q.to_f64().unwrap_or(f64::NAN))
}

/// Settings of the `λ` difference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WernerSettings {
    pub lambda: f64,
    pub delta: f64,
}

impl Default for WernerSettings {
    fn default() -> Self {
        WernerSettings { lambda: 1.0, delta: 1e-4 }
    }
}

/// Central difference at `δ` and `δ/2`, Richardson-combined, in exact
/// arithmetic. Returns the extrapolated value and the Richardson correction.
pub fn lambda_derivative(
    f: &dyn Fn(&BigRational) -> Result<BigRational, LocalityError>,
    lambda: &BigRational,
    delta: &BigRational,
) -> Result<(BigRational, BigRational), LocalityError> {
    let central = |h: &BigRational| -> Result<BigRational, LocalityError> {
        Ok((f(&(lambda + h))? - f(&(lambda - h))?) / (h * BigRational::from_integer(2.into())))
    };
    let half = delta / BigRational::from_integer(2.into());
    let d1 = central(delta)?;
    let d2 = central(&half)?;
    let value = (BigRational::from_integer(4.into()) * &d2 - d1) / BigRational::from_integer(3.into());
    let correction = (&value - d2).abs();
    Ok((value, correction))
}

/// `∂λ ∂ₜⁿ ∫x₁^{1,2} ρ₁` at `t = 0` for a Gaussian initial state. The error
/// bar is the Richardson correction plus the rounding of the final product.
pub fn werner_test(
    r: &RFunctional,
    c0: &GaussianState,
    n: usize,
    obs: WernerObservable,
    settings: WernerSettings,
) -> Result<SignalReport, LocalityError> {
    if n > 6 {
        return Err(LocalityError::OrderTooHigh(n));
    }
    if !(settings.lambda.is_finite() && settings.delta.is_finite() && settings.delta > 0.0) {
        return Err(LocalityError::NonFinite);
    }
    let ode = derive_gaussian_ode(&r.symbolic())?;
    let k = std::cell::Cell::new(0.0);
    let f = |lambda: &BigRational| {
        let (kk, q) = time_derivative_exact(&ode, c0, lambda, n, obs)?;
        k.set(kk);
        Ok(q)
    };
    let (q, corr) = lambda_derivative(&f, &decimal_rational(settings.lambda), &decimal_rational(settings.delta))?;
    let value = k.get() * q.to_f64().unwrap_or(f64::NAN);
    let error = k.get() * corr.to_f64().unwrap_or(f64::NAN) + 4.0 * f64::EPSILON * value.abs();
    let mut point = functional_point(r);
    point.insert("lambda".to_string(), settings.lambda);
    point.insert("delta".to_string(), settings.delta);
    Ok(SignalReport::numeric(obs.test_id(), n, point, value, error))
}
