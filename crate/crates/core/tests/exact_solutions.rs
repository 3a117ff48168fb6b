use std::f64::consts::PI;

use fglab::evolution::{self, log_grid};
use fglab::exact::{self, GoldenRecord, SchwarzschildParams};
use fglab::series;
use fglab::tensor::metric_of;
use fglab::{BoundaryModel, SymTensorField};
use proptest::prelude::*;

fn golden() -> GoldenRecord {
    let text = include_str!("data/schwarzschild_n3_m1.json");
    serde_json::from_str(text).unwrap()
}

#[test]
fn golden_schwarzschild_record() {
    let g = golden();
    let p = SchwarzschildParams::new(g.n, g.m).unwrap();
    assert!((p.r_plus - g.r_plus).abs() <= g.tolerances.r_plus);
    assert!((p.beta - g.beta).abs() <= g.tolerances.beta);

    let curve = exact::schwarzschild_fg_curve(&p, &log_grid(0.01, 0.3, 121)).unwrap();
    let model = p.boundary().unwrap();
    let s = series::expand(&metric_of(&model), &SymTensorField::zeros(&model), 8).unwrap();
    let g3 = exact::extract_coefficient(&curve, &s, 3).unwrap();
    let b = g3.blocks().unwrap();
    for (got, want) in b.iter().zip(&g.g3) {
        assert!((got - want).abs() <= g.tolerances.g3, "{got} vs {want}");
    }
    // trace-free with respect to the product metric
    assert!((b[0] + 2.0 * b[1]).abs() < 1e-6);
}

#[test]
fn schwarzschild_evolution_matches_closed_form() {
    let g = golden();
    let p = SchwarzschildParams::new(g.n, g.m).unwrap();
    let model = p.boundary().unwrap();
    let g3 = SymTensorField::from_blocks(&model, g.g3.clone()).unwrap();
    let s = series::expand(&metric_of(&model), &g3, 10).unwrap();
    let grid = log_grid(0.01, 0.8 * p.t_horizon(), 60);
    let evolved = evolution::evolve_on_grid(&s, &grid, 1e-11).unwrap();
    let exact_curve = exact::schwarzschild_fg_curve(&p, &grid).unwrap();
    for d in evolution::difference(&evolved, &exact_curve).unwrap() {
        assert!(d.trace_norm < 1e-7 && d.trace_free_norm < 1e-7, "{d:?}");
    }
}

#[test]
fn schwarzschild_curve_limits() {
    let p = SchwarzschildParams::new(3, 1.0).unwrap();
    let c = exact::schwarzschild_fg_curve(&p, &[1e-6]).unwrap();
    let b = c.values()[0].blocks().unwrap();
    assert!((b[0] - 1.0).abs() < 1e-10 && (b[1] - 1.0).abs() < 1e-10);
    match p.boundary().unwrap() {
        BoundaryModel::CircleSphere { circle_length, .. } => assert!((circle_length - PI).abs() < 1e-12),
        other => panic!("unexpected model {other:?}"),
    }
}

#[test]
fn schwarzschild_fit_parity() {
    let p = SchwarzschildParams::new(5, 0.7).unwrap();
    let curve = exact::schwarzschild_fg_curve(&p, &log_grid(0.01, 0.3, 121)).unwrap();
    let model = p.boundary().unwrap();
    let s = series::expand(&metric_of(&model), &SymTensorField::zeros(&model), 8).unwrap();
    for k in [1, 3] {
        let c = exact::extract_coefficient(&curve, &s, k).unwrap();
        assert!(c.max_abs() < 1e-6, "order {k}: {}", c.max_abs());
    }
}

#[test]
fn extraction_on_closed_forms() {
    let grid = log_grid(0.01, 0.3, 121);
    let sphere = BoundaryModel::round_sphere(3, 1.0).unwrap();
    let s = series::expand(&metric_of(&sphere), &SymTensorField::zeros(&sphere), 8).unwrap();
    let g2 = exact::extract_coefficient(&exact::poincare_curve(3, &grid).unwrap(), &s, 2).unwrap();
    assert!((g2.blocks().unwrap()[0] + 0.5).abs() < 1e-8);

    let torus = BoundaryModel::standard_torus(3, 8).unwrap();
    let flat = metric_of(&torus);
    let s = series::expand(&flat, &SymTensorField::zeros(&torus), 8).unwrap();
    let cusp = exact::cone_metric_curve(&flat, &grid).unwrap();
    assert!(exact::extract_coefficient(&cusp, &s, 3).unwrap().max_abs() < 1e-12);
}

#[test]
fn cone_over_flat_torus_is_the_cusp() {
    let torus = BoundaryModel::standard_torus(3, 8).unwrap();
    let flat = metric_of(&torus);
    let s = series::expand(&flat, &SymTensorField::zeros(&torus), 8).unwrap();
    let grid = log_grid(0.01, 1.0, 20);
    let evolved = evolution::evolve_on_grid(&s, &grid, 1e-10).unwrap();
    let cone = exact::cone_metric_curve(&flat, &grid).unwrap();
    for d in evolution::difference(&cone, &evolved).unwrap() {
        assert!(d.trace_norm < 1e-12 && d.trace_free_norm < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn beta_bounded_by_maximum(n in 3usize..=7, log_r in -4.0f64..4.0) {
        let beta = exact::schwarzschild_beta(n, 10f64.powf(log_r)).unwrap();
        prop_assert!(beta <= exact::schwarzschild_beta_max(n).unwrap().beta_max + 1e-10);
    }

    #[test]
    fn beta_unimodal_in_mass(n in 3usize..=7) {
        let betas: Vec<f64> = (0..80)
            .map(|i| {
                let m = 10f64.powf(-4.0 + 0.1 * i as f64);
                let r = exact::schwarzschild_rplus(n, m).unwrap();
                exact::schwarzschild_beta(n, r).unwrap()
            })
            .collect();
        let peak = betas.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        prop_assert!(peak > 0 && peak < betas.len() - 1);
        prop_assert!(betas[..=peak].windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(betas[peak..].windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn horizon_is_a_root(n in 3usize..=7, log_m in -3.0f64..3.0) {
        let m = 10f64.powf(log_m);
        let r = exact::schwarzschild_rplus(n, m).unwrap();
        let scale = 1.0 + r * r + 2.0 * m / r.powi(n as i32 - 2);
        prop_assert!(exact::schwarzschild_v(n, m, r).abs() <= 1e-12 * scale);
    }
}
