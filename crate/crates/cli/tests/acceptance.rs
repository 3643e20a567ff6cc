//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned
//! below. Exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nlqm_core::gaussian::{gaussian_moment, ExactScalar, QuadraticForm2};
use nlqm_core::locality::{
    appendix_signal, t_recurrence_rhs, third_iterate_t, werner_test, GaussianState, KPoly, TdExpr, TdKind, TdSymbol,
    WernerObservable, WernerSettings,
};
use nlqm_core::models::{DgParams, RFunctional};
use nlqm_core::symbolic::Coeff;
use nlqm_sim::{
    apply_gauge, evolve_with, identical_particle_experiment, lambda_sensitivity, moment, x0_independence_check,
    EvolveParams, Grid2D, IdenticalConfig, InitialSpec, Observable, PotentialSpec, Region, SensitivitySettings,
    SimSetup, WaveField, Weight,
};
use nlqm_tools::commands::{dg_werner, gauge_check, GaugeConfig, WernerConfig};

const APPENDIX_RUNTIME: Duration = Duration::from_secs(60);
const QUADRATURE_INSTANCES: usize = 50;
const QUADRATURE_REL: f64 = 1e-10;
const QUADRATURE_RUNTIME: Duration = Duration::from_secs(30);
const GAUGE_MODULUS_REL: f64 = 4.0 * f64::EPSILON;
const GAUGE_GAP: f64 = 1e-6;
const ORDER_RATIO: (f64, f64) = (3.5, 4.5);
const GALILEI_SIGNAL: f64 = 1e-8;
const NON_GALILEI_SIGNAL: f64 = 1e-3;
const BBM_DRIFT: f64 = 1e-8;
const FREE_GAUSSIAN_L2: f64 = 1e-6;
const PERIOD_REL: f64 = 1e-3;
const X0_DEVIATION: f64 = 1e-6;
const CROSS_TERM_FAR: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let s = appendix_signal().expect("appendix pipeline");
    let elapsed = start.elapsed();
    let exact = s.raw.to_string() == "-32/3*pi*sqrt(3)"
        && s.normalization.to_string() == "1/3*pi*sqrt(3)"
        && s.coefficient == ExactScalar::from_int(32);

    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_nlqm")).args(["bbm-signal", "--json"]).output().expect("spawn nlqm");
    let cli_elapsed = start.elapsed();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
    let cli = out.status.success()
        && v["raw"] == "-32/3*pi*sqrt(3)"
        && v["norm"] == "1/3*pi*sqrt(3)"
        && v["signal"] == "32*b";
    outcome(
        exact && cli && elapsed < APPENDIX_RUNTIME && cli_elapsed < APPENDIX_RUNTIME,
        format!(
            "raw {}, norm {}, signal {}*b; library {:.1?}, cli {:.1?} (limit {:?})",
            s.raw, s.normalization, s.coefficient, elapsed, cli_elapsed, APPENDIX_RUNTIME
        ),
    )
}

fn k(c: Coeff, p: u32) -> KPoly {
    KPoly::monomial(c, p)
}

fn ci(n: i64) -> Coeff {
    Coeff::new(BigRational::from_integer(0.into()), BigRational::from_integer(n.into()))
}

fn criterion_2() -> Outcome {
    // i d/dt T_{k,ν} = −k² T_{k,ν} + 2ik T_{k,ν+1} + Σ_{μ≥1} C(ν,μ) D_{k,μ,ν−μ}
    let mut recurrence = true;
    for nu in 0..=4u32 {
        let mut expected = TdExpr::term(TdSymbol::t(nu), k(Coeff::from_int(-1), 2))
            .add(&TdExpr::term(TdSymbol::t(nu + 1), k(ci(2), 1)));
        for mu in 1..=nu {
            let binom = (0..mu).fold(1i64, |acc, j| acc * (nu - j) as i64 / (j + 1) as i64);
            expected = expected.add(&TdExpr::term(TdSymbol::d(mu, nu - mu), k(Coeff::from_int(binom), 0)));
        }
        recurrence &= t_recurrence_rhs(nu) == expected;
    }
    let dt_d10 = TdSymbol { kind: TdKind::D { mu: 1, nu: 0 }, dk: 0, dt: 1 };
    let expected = [
        (TdSymbol::t(0), k(Coeff::from_int(-1), 6)),
        (TdSymbol::t(1), k(ci(6), 5)),
        (TdSymbol::t(2), k(Coeff::from_int(12), 4)),
        (TdSymbol::t(3), k(ci(-8), 3)),
        (TdSymbol::d(1, 0), k(ci(-4), 3)),
        (TdSymbol::d(1, 1), k(Coeff::from_int(-8), 2)),
        (TdSymbol::d(2, 0), k(Coeff::from_int(-4), 2)),
        // (i d/dt) acting on D gives i∂ₜD, so the −2k∂ₜD term carries 2ik·i.
        (dt_d10, k(Coeff::from_int(-2), 1)),
    ]
    .into_iter()
    .fold(TdExpr::zero(), |acc, (s, c)| acc.add(&TdExpr::term(s, c)));
    let third = third_iterate_t();
    let iterate = third == expected;
    outcome(recurrence && iterate, format!("recurrence ν = 0..4 {recurrence}; third iterate {iterate}: {third}"))
}

/// `∫∫ p(x,y) e^{−½xᵀMx}` by nested adaptive quadrature; the inner window
/// follows the conditional mean and both windows reach `e^{−90}` of the peak.
fn nested_quadrature(m: [f64; 3], p: &dyn Fn(f64, f64) -> f64, tol: f64) -> f64 {
    let [m11, m12, m22] = m;
    let schur = m11 - m12 * m12 / m22;
    let (wx, wy) = ((180.0 / schur).sqrt(), (180.0 / m22).sqrt());
    let inner = |x: f64| {
        let centre = -m12 / m22 * x;
        let f = |y: f64| p(x, y) * (-0.5 * (m11 * x * x + 2.0 * m12 * x * y + m22 * y * y)).exp();
        quadrature::integrate(f, centre - wy, centre + wy, tol).integral
    };
    quadrature::integrate(inner, -wx, wx, tol).integral
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let q = |n: i64| BigRational::new(n.into(), 4.into());
    let (mut checked, mut worst) = (0, 0.0f64);
    while checked < QUADRATURE_INSTANCES {
        let (a, b, c) = (rng.gen_range(2i64..=24), rng.gen_range(2i64..=24), rng.gen_range(-20i64..=20));
        if a * b <= c * c {
            continue;
        }
        let m = QuadraticForm2::new(q(a), q(c), q(b)).expect("positive definite");
        let terms: Vec<(f64, u32, u32)> = (0..rng.gen_range(1..=4))
            .map(|_| {
                let deg = rng.gen_range(0u32..=8);
                let ax = rng.gen_range(0..=deg);
                (rng.gen_range(-5i64..=5) as f64, ax, deg - ax)
            })
            .collect();
        let eval = |t: &[(f64, u32, u32)], x: f64, y: f64| -> f64 {
            t.iter().map(|&(c, i, j)| c * x.powi(i as i32) * y.powi(j as i32)).sum()
        };
        let exact: f64 = terms.iter().map(|&(c, i, j)| c * gaussian_moment(&m, i, j).to_f64()).sum();
        let mf = [a as f64 / 4.0, c as f64 / 4.0, b as f64 / 4.0];
        // Integrals that cancel by parity are measured against |p|.
        let abs: Vec<(f64, u32, u32)> = terms.iter().map(|&(c, i, j)| (c.abs(), i, j)).collect();
        let scale = nested_quadrature(mf, &|x, y| eval(&abs, x.abs(), y.abs()), 1e-12);
        let oracle = nested_quadrature(mf, &|x, y| eval(&terms, x, y), 1e-13 * scale);
        worst = worst.max((exact - oracle).abs() / scale);
        checked += 1;
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= QUADRATURE_REL && elapsed < QUADRATURE_RUNTIME,
        format!("{checked} instances, worst relative error {worst:.2e} (limit {QUADRATURE_REL:e}), {elapsed:.1?}"),
    )
}

fn harmonic_setup(grid: Grid2D, r: RFunctional, evolve: EvolveParams) -> SimSetup {
    SimSetup {
        grid,
        potential: PotentialSpec::Harmonic2 { lambda: 1.0, x0: 0.0 },
        initial: InitialSpec::ClosedForm { expr: "exp(-x^2 - y^2 - x*y)".into() },
        nonlinearity: r,
        evolve,
    }
}

fn criterion_4() -> Outcome {
    let s = appendix_signal().expect("appendix pipeline");
    let zero = s.at(&BigRational::from_integer(0.into())).is_zero();
    let linear = [(1, 2), (3, 7), (-5, 3), (11, 10)].iter().all(|&(n, d)| {
        let b = BigRational::new(n.into(), d.into());
        let two = BigRational::from_integer(2.into());
        s.at(&(&b * &two)) == s.at(&b).scale(&two)
    });
    let setup = harmonic_setup(Grid2D::new(64, 8.0).unwrap(), RFunctional::None, EvolveParams { dt: 1e-3, steps: 200, ..Default::default() });
    let mut null = true;
    let mut worst = 0.0f64;
    for obs in [Observable::SecondMoment, Observable::FirstMoment, Observable::Fourier { k: PI / 8.0 }] {
        for n in 1..=4 {
            let r = lambda_sensitivity(&setup, &obs, n, &SensitivitySettings::default()).expect("simulation");
            null &= r.value_f64().abs() <= r.error();
            worst = worst.max(r.value_f64().abs());
        }
    }
    outcome(
        zero && linear && null,
        format!("signal(0) = 0 {zero}; signal(2b) = 2 signal(b) {linear}; R = None null within error bars {null} (largest |value| {worst:.1e})"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grid = Grid2D::new(32, 4.0).unwrap();
    let mut worst_mod = 0.0f64;
    for _ in 0..20 {
        let d = rng.gen_range(-3.0..3.0);
        let field = WaveField {
            grid,
            data: (0..grid.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        };
        let g = apply_gauge(&field, d).expect("gauge");
        for (a, b) in field.data.iter().zip(&g.data) {
            worst_mod = worst_mod.max((a.norm() - b.norm()).abs() / a.norm());
        }
    }
    let modulus = worst_mod <= GAUGE_MODULUS_REL;
    let cfg = GaugeConfig::default();
    let r = match gauge_check(&cfg) {
        Ok(r) => r.data,
        Err(e) => return outcome(false, format!("gauge check failed: {e}")),
    };
    let gap = r.modulus_gap.unwrap_or(f64::INFINITY);
    let order = (ORDER_RATIO.0..=ORDER_RATIO.1).contains(&r.order_ratio);
    outcome(
        modulus && gap <= GAUGE_GAP && order,
        format!(
            "random-field modulus {worst_mod:.1e}; {}² L = {} D = {} t = {}: modulus gap {gap:.2e} (limit {GAUGE_GAP:e}); residual ratio {:.4} in [{}, {}]",
            cfg.grid.n, cfg.grid.l, cfg.d, cfg.dt * cfg.steps as f64, r.order_ratio, ORDER_RATIO.0, ORDER_RATIO.1
        ),
    )
}

fn criterion_6() -> (Outcome, String) {
    let galilei = vec![
        DgParams::from_gauge(1.0),
        DgParams::new(1.0, [0.5, 0.3, 0.0, -0.5, 0.2]),
        DgParams::new(0.7, [2.0, -1.0, 0.0, -2.0, 1.0]),
        DgParams::new(0.0, [0.0; 5]),
    ];
    let c3 = DgParams::new(1.0, [1.0, -0.5, 1.0, -1.0, 0.25]);
    let cfg = WernerConfig { tuples: galilei.iter().copied().chain([c3]).collect(), ..Default::default() };
    let rows = dg_werner(&cfg).expect("werner test").data.rows;
    let (g_rows, c_rows) = rows.split_at(galilei.len());
    let g_worst = g_rows.iter().map(|r| r.report.value_f64().abs()).fold(0.0, f64::max);
    let c3_value = c_rows[0].report.value_f64();
    let pass = g_worst < GALILEI_SIGNAL && c3_value.abs() > NON_GALILEI_SIGNAL;

    let complex_c0 = GaussianState::new(
        Complex64::new(0.0, 0.0),
        Complex64::new(2.0, 1.0),
        Complex64::new(1.0, 0.5),
        Complex64::new(2.0, -0.5),
    )
    .expect("valid state");
    let on_complex = werner_test(&RFunctional::DoebnerGoldin(c3), &complex_c0, 3, WernerObservable::SecondMoment, WernerSettings::default())
        .map(|r| r.value_f64())
        .unwrap_or(f64::NAN);
    let note = format!(
        "c3 = 1 tuple on the real C0 = [[2,1],[1,2]] is silent at n = 3 because J = 0 there; \
         on C0 = [[2+i, 1+i/2], [1+i/2, 2-i/2]] it gives {on_complex:.16e}"
    );
    (
        outcome(
            pass,
            format!(
                "Galilei max |signal| {g_worst:.1e} (limit {GALILEI_SIGNAL:e}); c3 = 1 signal {c3_value:.3e} (needs > {NON_GALILEI_SIGNAL:e})"
            ),
        ),
        note,
    )
}

/// `e^{−ax²}` evolved by `i∂ₜψ = −∂ₓ²ψ`.
fn free_gaussian_1d(a: f64, x: f64, t: f64) -> Complex64 {
    let s = Complex64::new(1.0, 4.0 * a * t);
    (-a * x * x / s).exp() / s.sqrt()
}

/// Period of `∫x₂²|Ψ|²` from the first interior minimum, refined by a parabola.
fn breathing_period(grid: Grid2D, lambda: f64, dt: f64, steps: usize) -> f64 {
    let psi0 = WaveField::from_fn(grid, |x, y| Complex64::new((-x * x - y * y).exp(), 0.0));
    let mut m2 = Vec::with_capacity(steps + 1);
    let params = EvolveParams { dt, steps, ..Default::default() };
    evolve_with(&psi0, &PotentialSpec::Harmonic2 { lambda, x0: 0.0 }, RFunctional::None, params, |_, _, psi| {
        m2.push(moment(psi, Weight::X2Squared, Region::All)?.re);
        Ok(())
    })
    .expect("harmonic run");
    let k = (1..m2.len() - 1).find(|&k| m2[k] < m2[k - 1] && m2[k] <= m2[k + 1]).expect("a minimum");
    let (a, b, c) = (m2[k - 1], m2[k], m2[k + 1]);
    (k as f64 + 0.5 * (a - c) / (a - 2.0 * b + c)) * dt
}

fn criterion_7() -> Outcome {
    let grid = Grid2D::default();
    let params = EvolveParams { dt: 1e-4, steps: 1000, ..Default::default() };

    let psi0 = InitialSpec::ClosedForm { expr: "exp(-x^2 - y^2 - x*y + I*x/3)".into() }.sample(&grid).expect("initial");
    let pot = PotentialSpec::Harmonic2 { lambda: 1.0, x0: 0.5 };
    let drift = evolve_with(&psi0, &pot, RFunctional::Logarithmic { b: 0.1 }, params, |_, _, _| Ok(()))
        .map(|(_, s)| s.max_drift)
        .unwrap_or(f64::INFINITY);

    let (a, b) = (1.0, 0.5);
    let psi0 = WaveField::from_fn(grid, |x, y| free_gaussian_1d(a, x, 0.0) * free_gaussian_1d(b, y, 0.0));
    let t = params.dt * params.steps as f64;
    let free = evolve_with(&psi0, &PotentialSpec::None, RFunctional::None, params, |_, _, _| Ok(()))
        .map(|(psi, _)| psi.l2_distance(&WaveField::from_fn(grid, |x, y| free_gaussian_1d(a, x, t) * free_gaussian_1d(b, y, t))))
        .unwrap_or(f64::INFINITY);

    let lambda = 1.0;
    let period = breathing_period(Grid2D::new(64, 8.0).unwrap(), lambda, 1e-3, 2000);
    let exact = PI / (2.0 * f64::sqrt(lambda));
    let rel = (period / exact - 1.0).abs();
    outcome(
        drift <= BBM_DRIFT && free <= FREE_GAUSSIAN_L2 && rel <= PERIOD_REL,
        format!(
            "logarithmic drift {drift:.1e}/1000 steps (limit {BBM_DRIFT:e}); free Gaussian L2 {free:.1e} at {}² t = {t} (limit {FREE_GAUSSIAN_L2:e}); period {period:.6} vs {exact:.6} (rel {rel:.1e})",
            grid.n
        ),
    )
}

fn criterion_8() -> Outcome {
    let shifts = [0.0, 0.75, -1.3, 2.0];
    let mut worst = 0.0f64;
    let mut ok = true;
    for r in [RFunctional::None, RFunctional::DoebnerGoldin(DgParams::from_gauge(0.5))] {
        let setup = harmonic_setup(Grid2D::new(128, 10.0).unwrap(), r, EvolveParams { dt: 1e-4, steps: 500, ..Default::default() });
        match x0_independence_check(&setup, &shifts, 1e-12) {
            Ok(rows) => {
                for row in rows {
                    worst = worst.max(row.deviation_t0).max(row.deviation_final);
                }
            }
            Err(_) => ok = false,
        }
    }
    outcome(ok && worst <= X0_DEVIATION, format!("linear and D = 0.5 gauge family, shifts {shifts:?}: max deviation of rho1 {worst:.1e} (limit {X0_DEVIATION:e})"))
}

fn criterion_9() -> Outcome {
    let cfg = IdenticalConfig { sigmas: vec![1.0], ..Default::default() };
    let cross: Vec<f64> = cfg.ds.iter().map(|&d| cfg.cross_term(d, 1.0).expect("cross term")).collect();
    let decreasing = cross.windows(2).all(|w| w[1] < w[0]);
    let far = cross.last().is_some_and(|c| c.abs() < CROSS_TERM_FAR);
    let negatives = cfg.ds.iter().all(|&d| cfg.cross_term(d, 1.0).unwrap() == -cfg.cross_term(d, -1.0).unwrap());
    let rows = match identical_particle_experiment(&cfg) {
        Ok(rows) => rows,
        Err(e) => return outcome(false, format!("experiment failed: {e}")),
    };
    let cross_s = cross.iter().map(|c| format!("{c:.3e}")).collect::<Vec<_>>().join(", ");
    let agree = rows.iter().all(|r| {
        let (a, b) = (&r.signal_chi, &r.signal_phi);
        (a.value_f64() - b.value_f64()).abs() <= a.error() + b.error()
    });
    outcome(
        decreasing && far && negatives && agree,
        format!(
            "{}² grid, d = {:?}: cross terms [{cross_s}] decreasing {decreasing}, last < {CROSS_TERM_FAR:e} {far}; sigma = ±1 negatives {negatives}; chi/phi agree {agree}",
            cfg.grid.n, cfg.ds
        ),
    )
}

fn main() {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, o: Outcome| {
        println!("{} criterion {id} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    };
    report(1, "reference signal reproduction", criterion_1());
    report(2, "recurrence formulas", criterion_2());
    report(3, "Gaussian calculus vs quadrature", criterion_3());
    report(4, "linearity and null properties", criterion_4());
    report(5, "gauge equivalence", criterion_5());
    let (o6, note6) = criterion_6();
    report(6, "Gaussian-ansatz test", o6);
    println!("NOTE criterion 6: {note6}");
    report(7, "simulator physics", criterion_7());
    report(8, "x0 independence", criterion_8());
    report(9, "identical-particle structure", criterion_9());
    println!("{failed} of 9 criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
