use std::f64::consts::PI;

use fglab::evolution::{self, constraint_residuals, log_grid};
use fglab::exact;
use fglab::series;
use fglab::tensor::metric_of;
use fglab::{BoundaryModel, Error, SymTensorField};
use proptest::prelude::*;

fn sphere_series(g3: f64) -> series::FGSeries {
    let m = BoundaryModel::circle_sphere(3, PI, 1.0).unwrap();
    let g_n = SymTensorField::from_blocks(&m, vec![g3, -0.5 * g3]).unwrap();
    series::expand(&metric_of(&m), &g_n, 8).unwrap()
}

#[test]
fn cusp_and_poincare_seeds() {
    let t3 = BoundaryModel::standard_torus(3, 8).unwrap();
    let flat = metric_of(&t3);
    let cusp = series::expand(&flat, &SymTensorField::zeros(&t3), 8).unwrap();
    let c = evolution::evolve(&cusp, 0.01, 1.0, 1e-10).unwrap();
    assert!(c.values().iter().all(|v| v.max_abs_diff(&flat).unwrap() <= 1e-10));
    assert!(constraint_residuals(&c).unwrap().max_all() < 1e-14);

    let tol = 1e-10;
    let s3 = BoundaryModel::round_sphere(3, 1.0).unwrap();
    let s = series::expand(&metric_of(&s3), &SymTensorField::zeros(&s3), 8).unwrap();
    let evolved = evolution::evolve(&s, 0.01, 1.0, tol).unwrap();
    let exact_curve = exact::poincare_curve(3, evolved.t_grid()).unwrap();
    for (a, b) in evolved.values().iter().zip(exact_curve.values()) {
        assert!(a.max_abs_diff(b).unwrap() <= 10.0 * tol);
    }
    assert!(constraint_residuals(&exact_curve).unwrap().max_all() <= 1e-10);
    assert!(constraint_residuals(&evolved).unwrap().max_all() <= 1e-7);
}

#[test]
fn difference_examples() {
    let a = evolution::evolve(&sphere_series(0.2), 0.01, 0.5, 1e-12).unwrap();
    assert!(evolution::difference(&a, &a)
        .unwrap()
        .iter()
        .all(|d| d.trace_norm == 0.0 && d.trace_free_norm == 0.0));

    let poincare = exact::poincare_curve(3, a.t_grid()).unwrap();
    assert!(matches!(evolution::difference(&poincare, &a), Err(Error::ModelMismatch)));

    let eps = 1e-3;
    let b = evolution::evolve(&sphere_series(0.0), 0.01, 0.5, 1e-12).unwrap();
    let c = evolution::evolve(&sphere_series(eps), 0.01, 0.5, 1e-12).unwrap();
    let d = evolution::difference(&b, &c).unwrap();
    let i = a.t_grid().iter().position(|t| *t >= 0.05).unwrap();
    let t = a.t_grid()[i];
    // |(ε, −ε/2)|_γ = ε√(3/2)
    let expect = eps * 1.5f64.sqrt() * t.powi(3);
    assert!((d[i].trace_free_norm / expect - 1.0).abs() < 0.05);
}

#[test]
fn recompactified_metric_is_einstein() {
    let tol = 1e-11;
    let grid = log_grid(0.01, 0.6, 2001);
    let c = evolution::evolve_on_grid(&sphere_series(0.3), &grid, tol).unwrap();
    for i in [100, 1000, 1900] {
        let r = evolution::einstein_residual(&c, i).unwrap();
        assert!(r < 1e-9, "Einstein residual {r} at sample {i}");
    }
}

#[test]
fn csv_export_has_header_and_rows() {
    let c = evolution::evolve(&sphere_series(0.2), 0.01, 0.5, 1e-10).unwrap();
    let report = constraint_residuals(&c).unwrap();
    let csv = c.to_csv(Some(&report)).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,block0,block1,divergence,hamiltonian,riccati");
    assert_eq!(lines.count(), c.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reseeding_reproduces_the_curve(g3 in -0.5f64..0.5, k in 20usize..80) {
        let tol = 1e-10;
        let s = sphere_series(g3);
        let grid = log_grid(0.01, 0.5, 100);
        let c = evolution::evolve_on_grid(&s, &grid, tol).unwrap();
        let again = evolution::evolve_from_state(
            s.gamma(),
            &c.values()[k],
            &c.derivs()[k],
            &grid[k..],
            tol,
        )
        .unwrap();
        for (a, b) in again.values().iter().zip(&c.values()[k..]) {
            prop_assert!(a.max_abs_diff(b).unwrap() <= 10.0 * tol);
        }
    }

    #[test]
    fn constraints_stay_bounded(g3 in -0.5f64..0.5, log_tol in -12.0f64..-8.0) {
        let tol = 10f64.powf(log_tol);
        let c = evolution::evolve(&sphere_series(g3), 0.01, 0.5, tol).unwrap();
        prop_assert!(constraint_residuals(&c).unwrap().max_all() <= 100.0 * tol);
    }

    #[test]
    fn difference_is_symmetric(a in -0.5f64..0.5, b in -0.5f64..0.5) {
        let x = evolution::evolve(&sphere_series(a), 0.01, 0.3, 1e-10).unwrap();
        let y = evolution::evolve(&sphere_series(b), 0.01, 0.3, 1e-10).unwrap();
        let xy = evolution::difference(&x, &y).unwrap();
        let yx = evolution::difference(&y, &x).unwrap();
        for (p, q) in xy.iter().zip(&yx) {
            prop_assert!((p.trace_norm - q.trace_norm).abs() <= 1e-15);
            prop_assert!((p.trace_free_norm - q.trace_free_norm).abs() <= 1e-15);
        }
    }
}
