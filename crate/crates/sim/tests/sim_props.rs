use num_complex::Complex64;
use proptest::prelude::*;

use nlqm_sim::dump::{read_dump, write_dump};
use nlqm_sim::stencil::apply;
use nlqm_sim::{apply_gauge, inverse_gauge, marginal_density, one_sided_weights, Grid2D, WaveField};

fn random_field(values: Vec<(f64, f64)>) -> WaveField {
    let grid = Grid2D::new(32, 4.0).unwrap();
    WaveField { grid, data: values.into_iter().map(|(re, im)| Complex64::new(re, im)).collect() }
}

fn field_strategy() -> impl Strategy<Value = WaveField> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1024).prop_map(random_field)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gauge_preserves_modulus(f in field_strategy(), d in -3.0f64..3.0) {
        let g = apply_gauge(&f, d).unwrap();
        for (a, b) in f.data.iter().zip(&g.data) {
            prop_assert!((a.norm() - b.norm()).abs() <= 4.0 * f64::EPSILON * a.norm());
        }
    }

    #[test]
    fn inverse_gauge_undoes_gauge(f in field_strategy(), d in -3.0f64..3.0) {
        let back = inverse_gauge(&apply_gauge(&f, d).unwrap(), d).unwrap();
        let sup = f.data.iter().zip(&back.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(sup <= 1e-12, "{sup:e}");
    }

    #[test]
    fn marginal_integrates_to_norm(f in field_strategy()) {
        let rho1 = marginal_density(&f);
        prop_assert!(rho1.iter().all(|&r| r >= 0.0));
        let total = rho1.iter().sum::<f64>() * f.grid.h();
        prop_assert!((total - f.norm_sq()).abs() <= 1e-12 * f.norm_sq());
    }

    #[test]
    fn dump_round_trips(f in field_strategy(), t in -10.0f64..10.0) {
        let mut buf = Vec::new();
        write_dump(&mut buf, &f, t).unwrap();
        let (back, t2) = read_dump(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(back, f);
        prop_assert_eq!(t2, t);
    }

    #[test]
    fn stencils_are_exact_below_their_degree(
        k in 0usize..5,
        coeffs in prop::collection::vec(-2.0f64..2.0, 10),
        dt in 0.01f64..0.2,
    ) {
        let m = 2 * k + 2;
        let w = one_sided_weights(k, m);
        let p = |t: f64| coeffs[..m].iter().rev().fold(0.0, |acc, c| acc * t + c);
        let samples: Vec<f64> = (0..m).map(|j| p(j as f64 * dt)).collect();
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        let exact = coeffs[k] * fact;
        let got = apply(&w, &samples, k, dt);
        let scale: f64 = w.iter().map(|x| x.abs()).sum::<f64>() / dt.powi(k as i32);
        prop_assert!((got - exact).abs() <= 1e-12 * scale.max(1.0) * 10.0, "{got} vs {exact}");
    }
}
