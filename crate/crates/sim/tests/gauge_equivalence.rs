use nlqm_core::models::{DgParams, RFunctional};
use nlqm_sim::{apply_gauge, evolve_with, gauge_residual_run, EvolveParams, Grid2D, InitialSpec, PotentialSpec, WaveField};

fn initial(grid: &Grid2D) -> WaveField {
    InitialSpec::ClosedForm { expr: "exp(-x^2 - y^2 - x*y + I*(x/2 - y/5))".into() }.sample(grid).unwrap()
}

fn run(psi0: &WaveField, r: RFunctional, dt: f64, steps: usize) -> WaveField {
    let params = EvolveParams { dt, steps, ..Default::default() };
    evolve_with(psi0, &PotentialSpec::Harmonic2 { lambda: 1.0, x0: 0.0 }, r, params, |_, _, _| Ok(())).unwrap().0
}

/// `|N_D Ψ(t)|` from linear evolution against the Doebner-Goldin evolution
/// of `N_D Ψ₀`.
fn modulus_gap(grid: Grid2D, d: f64, dt: f64, steps: usize) -> f64 {
    let psi0 = initial(&grid);
    let linear = apply_gauge(&run(&psi0, RFunctional::None, dt, steps), d).unwrap();
    let dg = run(&apply_gauge(&psi0, d).unwrap(), RFunctional::DoebnerGoldin(DgParams::from_gauge(d)), dt, steps);
    linear.modulus_l2_distance(&dg)
}

#[test]
fn gauge_then_nonlinear_matches_linear_then_gauge() {
    let gap = modulus_gap(Grid2D::new(128, 8.0).unwrap(), 0.5, 1e-4, 200);
    assert!(gap <= 1e-6, "{gap:e}");
}

#[test]
fn gauge_residual_is_second_order_in_dt() {
    let grid = Grid2D::new(64, 8.0).unwrap();
    let psi0 = initial(&grid);
    let pot = PotentialSpec::Harmonic2 { lambda: 1.0, x0: 0.0 };
    let coarse = gauge_residual_run(&psi0, &pot, 0.5, EvolveParams { dt: 2e-3, steps: 10, ..Default::default() }).unwrap();
    let fine = gauge_residual_run(&psi0, &pot, 0.5, EvolveParams { dt: 1e-3, steps: 20, ..Default::default() }).unwrap();
    let ratio = coarse / fine;
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
}
