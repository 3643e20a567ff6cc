use nlqm_sim::{identical_particle_experiment, EvolveParams, Grid2D, IdenticalConfig};

fn config() -> IdenticalConfig {
    IdenticalConfig {
        grid: Grid2D::new(64, 10.0).unwrap(),
        evolve: EvolveParams { dt: 1e-3, ..Default::default() },
        ..Default::default()
    }
}

#[test]
fn overlap_decays_with_displacement() {
    let cfg = config();
    let cross: Vec<f64> = cfg.ds.iter().map(|&d| cfg.cross_term(d, 1.0).unwrap()).collect();
    assert!(cross.windows(2).all(|w| w[1] < w[0]), "{cross:?}");
    assert!(cross[2] < 1e-8, "{cross:?}");
    for &d in &cfg.ds {
        assert_eq!(cfg.cross_term(d, 1.0).unwrap(), -cfg.cross_term(d, -1.0).unwrap());
    }
}

#[test]
fn exchanged_components_give_the_same_signal() {
    let cfg = IdenticalConfig { ds: vec![2.0, 4.0], sigmas: vec![1.0], ..config() };
    let rows = identical_particle_experiment(&cfg).unwrap();
    for row in rows {
        let (a, b) = (&row.signal_chi, &row.signal_phi);
        let gap = (a.value_f64() - b.value_f64()).abs();
        assert!(gap <= a.error() + b.error(), "d = {}: {a:?} vs {b:?}", row.d);
    }
}
