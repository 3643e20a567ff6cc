//! Nonlinear functionals `R[Ψ]` and their parameter-class predicates.
//!
//! Units: `ħ = 1` and `ħ²/2m = 1`, so `m = 1/2` and the evolution reads
//! `i∂ₜΨ = (−Δ + V + R[Ψ])Ψ`. In these units the gauge-generated
//! Doebner-Goldin family is `c = (1, −D/2, 0, −1, D/4)`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symbolic::{Coeff, Coord, Expr, Factor, FieldAtom, FieldKind, Poly, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parameter `{name}` is not finite ({value})")]
    NonFinite { name: &'static str, value: f64 },
}

/// Doebner-Goldin parameters: diffusion coefficient `D` and `c₁..c₅`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DgParams {
    #[serde(rename = "D")]
    pub d: f64,
    pub c: [f64; 5],
}

impl DgParams {
    pub fn new(d: f64, c: [f64; 5]) -> Self {
        DgParams { d, c }
    }

    /// The member of the family generated by the gauge transformation `N_D`.
    pub fn from_gauge(d: f64) -> Self {
        DgParams { d, c: [1.0, -d / 2.0, 0.0, -1.0, d / 4.0] }
    }

    /// `c₃ = 0` and `c₁ + c₄ = 0`.
    pub fn is_galilei_covariant(&self) -> bool {
        let [c1, _, c3, c4, _] = self.c;
        c3 == 0.0 && c1 + c4 == 0.0
    }

    /// `Some(D)` if the parameters lie in the gauge-generated family, in which
    /// case `N_D` maps linear solutions onto solutions of this equation.
    /// `D = 0` is always linear (`R ≡ 0`). Comparisons are exact.
    pub fn is_linearizable(&self) -> Option<f64> {
        if self.d == 0.0 {
            return Some(0.0);
        }
        let [c1, c2, c3, c4, c5] = self.c;
        let in_family = c1 == 1.0 && c3 == 0.0 && c4 == -1.0 && c2 == -2.0 * c5 && self.d == -2.0 * c2;
        in_family.then_some(self.d)
    }

    fn validate(&self) -> Result<(), ModelError> {
        check("D", self.d)?;
        for (name, v) in ["c1", "c2", "c3", "c4", "c5"].into_iter().zip(self.c) {
            check(name, v)?;
        }
        Ok(())
    }
}

fn check(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonFinite { name, value })
    }
}

/// The nonlinear functional in the evolution equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RFunctional {
    None,
    DoebnerGoldin(DgParams),
    /// `R = −2b·ln|Ψ|`.
    Logarithmic { b: f64 },
}

/// Exact rational with the shortest decimal expansion that round-trips to
/// `x`, so `0.1` becomes `1/10`.
pub fn decimal_rational(x: f64) -> BigRational {
    let s = format!("{}", x.abs());
    let (int_part, frac) = s.split_once('.').unwrap_or((&s, ""));
    let digits: BigInt = format!("{int_part}{frac}").parse().expect("finite float prints as digits");
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let q = BigRational::new(digits, denom);
    if x < 0.0 {
        -q
    } else {
        q
    }
}

fn rat(x: f64) -> Poly {
    Poly::constant(Coeff::real(decimal_rational(x)))
}

/// Hydrodynamic building blocks in the atoms `P`, `PB`: `ρ = PB·P`,
/// `Jⱼ = (PB·∂ⱼP − P·∂ⱼPB)/(2i)` for `j ∈ {x, y}`.
struct Hydro {
    rho: Poly,
    grad_rho: [Poly; 2],
    lap_rho: Poly,
    j: [Poly; 2],
    div_j: Poly,
}

impl Hydro {
    fn new() -> Self {
        let p = Poly::field(FieldAtom::base(FieldKind::P));
        let pb = Poly::field(FieldAtom::base(FieldKind::PB));
        let rho = pb.mul(&p);
        let dx = Var::Coord(Coord::X);
        let dy = Var::Coord(Coord::Y);
        let grad_rho = [rho.derivative(&dx), rho.derivative(&dy)];
        let lap_rho = grad_rho[0].derivative(&dx).add(&grad_rho[1].derivative(&dy));
        let half_over_i = Poly::constant(Coeff::new(BigRational::from_integer(0.into()), BigRational::new((-1).into(), 2.into())));
        let current = |v: &Var| pb.mul(&p.derivative(v)).sub(&p.mul(&pb.derivative(v))).mul(&half_over_i);
        let j = [current(&dx), current(&dy)];
        let div_j = j[0].derivative(&dx).add(&j[1].derivative(&dy));
        Hydro { rho, grad_rho, lap_rho, j, div_j }
    }

    /// `[Δρ/ρ, ∇·J/ρ, J²/ρ², J·∇ρ/ρ², (∇ρ)²/ρ²]`.
    fn quotients(&self) -> [Poly; 5] {
        let inv = self.rho.powi(-1).expect("ρ is a nonzero monomial");
        let inv2 = inv.mul(&inv);
        let dot = |a: &[Poly; 2], b: &[Poly; 2]| a[0].mul(&b[0]).add(&a[1].mul(&b[1]));
        [
            self.lap_rho.mul(&inv),
            self.div_j.mul(&inv),
            dot(&self.j, &self.j).mul(&inv2),
            dot(&self.j, &self.grad_rho).mul(&inv2),
            dot(&self.grad_rho, &self.grad_rho).mul(&inv2),
        ]
    }
}

/// Doebner-Goldin functional with arbitrary coefficient polynomials:
/// `R = D·((i/2)Δρ/ρ + c₁∇·J/ρ + c₂Δρ/ρ + c₃J²/ρ² + c₄J·∇ρ/ρ² + c₅(∇ρ)²/ρ²)`.
pub fn doebner_goldin_poly(d: &Poly, c: &[Poly; 5]) -> Poly {
    let h = Hydro::new();
    let [lap, div_j, j2, j_grad, grad2] = h.quotients();
    let half_i = Poly::constant(Coeff::new(BigRational::from_integer(0.into()), BigRational::new(1.into(), 2.into())));
    let mut inner = half_i.mul(&lap);
    inner.add_assign(&c[0].mul(&div_j));
    inner.add_assign(&c[1].mul(&lap));
    inner.add_assign(&c[2].mul(&j2));
    inner.add_assign(&c[3].mul(&j_grad));
    inner.add_assign(&c[4].mul(&grad2));
    d.mul(&inner)
}

/// Doebner-Goldin functional in the symbolic parameters `D`, `c1`..`c5`.
pub fn doebner_goldin_symbolic() -> Poly {
    let c = ["c1", "c2", "c3", "c4", "c5"].map(Poly::param);
    doebner_goldin_poly(&Poly::param("D"), &c)
}

/// `−b·ln(PB·P)` in the symbolic parameter `b`.
pub fn logarithmic_symbolic() -> Poly {
    log_density().mul(&Poly::param("b")).neg()
}

fn log_density() -> Poly {
    let p = Poly::field(FieldAtom::base(FieldKind::P));
    let pb = Poly::field(FieldAtom::base(FieldKind::PB));
    pb.mul(&p).ln().expect("ln of a nonzero monomial")
}

impl RFunctional {
    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            RFunctional::None => Ok(()),
            RFunctional::DoebnerGoldin(p) => p.validate(),
            RFunctional::Logarithmic { b } => check("b", *b),
        }
    }

    /// `R` as a normal form in the atoms, parameters taken as exact decimals.
    pub fn symbolic(&self) -> Poly {
        match self {
            RFunctional::None => Poly::zero(),
            RFunctional::Logarithmic { b } => log_density().mul(&rat(*b)).neg(),
            RFunctional::DoebnerGoldin(p) => doebner_goldin_poly(&rat(p.d), &p.c.map(rat)),
        }
    }

    /// Whether `R` is real on every state, with a witness value of `Im R`
    /// on the sample state `exp(−x²−y²−xy)` otherwise.
    pub fn is_real_valued(&self) -> RealValuedness {
        match self {
            RFunctional::None | RFunctional::Logarithmic { .. } => RealValuedness { real: true, witness: None },
            RFunctional::DoebnerGoldin(p) if p.d == 0.0 => RealValuedness { real: true, witness: None },
            RFunctional::DoebnerGoldin(_) => {
                let point = (0.3, -0.2);
                let value = evaluate_on_sample(&self.symbolic(), point);
                RealValuedness { real: false, witness: Some(Witness { point, im_r: value.im }) }
            }
        }
    }
}

/// `R` evaluated at `point` on the state `exp(−x²−y²−xy)`.
pub fn evaluate_on_sample(r: &Poly, point: (f64, f64)) -> Complex64 {
    let psi = Expr::Exp(Box::new(
        crate::symbolic::parse_expression("-x^2-y^2-x*y").expect("fixed sample exponent"),
    ));
    let bindings = crate::symbolic::Bindings::new()
        .field(FieldKind::P, &psi)
        .and_then(|b| b.field(FieldKind::PB, &psi))
        .expect("sample bindings");
    let spec = r.substitute(&bindings).expect("sample state is nowhere zero");
    spec.eval(&mut |f| match f {
        Factor::Coord(Coord::X) => Some(Complex64::new(point.0, 0.0)),
        Factor::Coord(Coord::Y) => Some(Complex64::new(point.1, 0.0)),
        _ => None,
    })
    .expect("all leaves bound")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealValuedness {
    pub real: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub point: (f64, f64),
    pub im_r: f64,
}

/// Tree form of [`RFunctional::symbolic`].
pub fn evaluate_r_symbolic(f: &RFunctional) -> Expr {
    f.symbolic().to_expr()
}
