use std::f64::consts::PI;

use fglab::constraints::{self, example53, ConstraintPair, IdentityDocument};
use fglab::tensor::{self, metric_of};
use fglab::{BoundaryModel, Error, SymTensorField, VectorField};
use proptest::prelude::*;

fn torus(res: usize) -> BoundaryModel {
    BoundaryModel::standard_torus(3, res).unwrap()
}

#[test]
fn membership_examples() {
    let m = torus(16);
    let g = metric_of(&m);
    let zero = ConstraintPair::new(g.clone(), SymTensorField::zeros(&m)).unwrap();
    let r = constraints::check_membership(&zero).unwrap();
    assert_eq!((r.divergence, r.trace), (0.0, 0.0));

    let tt = ConstraintPair::new(g.clone(), example53(&m, f64::sin).unwrap()).unwrap();
    assert!(constraints::check_membership(&tt).unwrap().is_member(1e-12));

    let bad = SymTensorField::from_fn(&m, |x| {
        let mut a = vec![0.0; 9];
        a[0] = x[0].sin();
        a
    })
    .unwrap();
    let r = constraints::check_membership(&ConstraintPair::new(g, bad).unwrap()).unwrap();
    assert!(r.divergence > 0.5 && !r.is_member(1e-8));
}

#[test]
fn canonical_identity_and_obstruction() {
    let m = torus(32);
    let g = metric_of(&m);
    let x = VectorField::constant(&m, &[1.0, 0.0, 0.0]).unwrap();
    let tau = example53(&m, f64::sin).unwrap();
    let h = tensor::lie_derivative(&x, &tau).unwrap();
    let r = constraints::verify_identity(&g, &x, &tau, &h).unwrap();
    let vol = (2.0 * PI).powi(3);
    assert!((r.lhs - vol).abs() <= 1e-8 * vol);
    assert!(r.relative_error() <= 1e-6);

    let p = constraints::obstruction_projection(&g, &tau, &h).unwrap();
    assert!((p[0] + 0.5 * vol).abs() <= 1e-6 * vol);
    assert!(p[1].abs() < 1e-9 && p[2].abs() < 1e-9);
    let scaled = constraints::obstruction_projection(&g, &tau, &h.scale(3.0)).unwrap();
    assert!((scaled[0] - 3.0 * p[0]).abs() <= 1e-8 * vol);

    let doc = IdentityDocument::new(&r, &g, &x, &tau, &h);
    let a = serde_json::to_string(&doc).unwrap();
    let b = serde_json::to_string(&IdentityDocument::new(&r, &g, &x, &tau, &h)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn identity_degenerate_cases() {
    let m = torus(12);
    let g = metric_of(&m);
    let x = VectorField::constant(&m, &[0.3, -1.0, 0.5]).unwrap();
    let h = example53(&m, f64::cos).unwrap();
    let r = constraints::verify_identity(&g, &x, &SymTensorField::zeros(&m), &h).unwrap();
    assert_eq!((r.lhs, r.rhs), (0.0, 0.0));

    let y = VectorField::from_fn(&m, |p| vec![p[1].sin(), (p[0] + p[2]).cos(), 0.2 * p[0].sin()]).unwrap();
    let h = tensor::killing_operator(&g, &y).unwrap();
    let tau = example53(&m, |t| t.sin() + 0.5 * (2.0 * t).cos()).unwrap();
    let r = constraints::verify_identity(&g, &x, &tau, &h).unwrap();
    assert!(r.normalized_error() <= 1e-6, "{r:?}");

    let not_killing = VectorField::from_fn(&m, |p| vec![p[0].sin(), 0.0, 0.0]).unwrap();
    assert!(matches!(
        constraints::verify_identity(&g, &not_killing, &tau, &h),
        Err(Error::NotKilling(_))
    ));
}

#[test]
fn constant_tau_has_no_obstruction() {
    let m = torus(12);
    let g = metric_of(&m);
    let tau = SymTensorField::constant(&m, &[0.0, 0.2, 0.0, 0.2, -0.4, 0.1, 0.0, 0.1, 0.4]).unwrap();
    let h = SymTensorField::from_fn(&m, |x| {
        let c = x[0].cos() * x[1].sin();
        vec![c, 0.1, 0.0, 0.1, -c, 0.3 * c, 0.0, 0.3 * c, 0.5]
    })
    .unwrap();
    let p = constraints::obstruction_projection(&g, &tau, &h).unwrap();
    assert!(p.iter().all(|c| c.abs() < 1e-9), "{p:?}");
}

#[test]
fn extension_criterion_examples() {
    let m = torus(16);
    let g = metric_of(&m);
    let g3 = example53(&m, f64::sin).unwrap();
    let e1 = VectorField::constant(&m, &[1.0, 0.0, 0.0]).unwrap();
    let e2 = VectorField::constant(&m, &[0.0, 1.0, 0.0]).unwrap();
    assert!(constraints::killing_extension_criterion(&g, &e2, &g3).unwrap() < 1e-12);
    let c1 = constraints::killing_extension_criterion(&g, &e1, &g3).unwrap();
    assert!((c1 - (2.0 * PI).powf(1.5)).abs() < 1e-9);
    let zero = SymTensorField::zeros(&m);
    assert_eq!(constraints::killing_extension_criterion(&g, &e1, &zero).unwrap(), 0.0);

    let cs = BoundaryModel::circle_sphere(3, PI, 1.0).unwrap();
    let rot = VectorField::killing_combination(&cs, vec![1.0]).unwrap();
    let tt = SymTensorField::from_blocks(&cs, vec![0.2, -0.1]).unwrap();
    assert_eq!(constraints::killing_extension_criterion(&metric_of(&cs), &rot, &tt).unwrap(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn randomized_identity_instances(seed in any::<u64>()) {
        let m = torus(12);
        let inst = constraints::random_identity_instance(&m, seed).unwrap();
        let r = constraints::verify_identity(&inst.gamma, &inst.x, &inst.tau, &inst.h).unwrap();
        prop_assert!(r.normalized_error() <= 1e-6, "{:?}", r);
    }

    #[test]
    fn stokes_integrals_vanish(seed in any::<u64>()) {
        let m = torus(12);
        let inst = constraints::random_identity_instance(&m, seed).unwrap();
        let s = constraints::stokes_check(&inst.gamma, &inst.tau, &inst.x, &inst.h, &[-1e-2, 0.0, 1e-2, 5e-2]).unwrap();
        let scale = tensor::volume(&inst.gamma) * inst.tau.max_abs() * inst.x.max_abs();
        prop_assert!(s.iter().all(|v| v.abs() <= 1e-10 * scale), "{:?}", s);
    }

    #[test]
    fn projection_is_linear_in_h(seed in any::<u64>(), c in -3.0f64..3.0) {
        let m = torus(12);
        let inst = constraints::random_identity_instance(&m, seed).unwrap();
        let p = constraints::obstruction_projection(&inst.gamma, &inst.tau, &inst.h).unwrap();
        let q = constraints::obstruction_projection(&inst.gamma, &inst.tau, &inst.h.scale(c)).unwrap();
        let noise = 1e-9 * tensor::volume(&inst.gamma) * inst.tau.max_abs() * inst.h.max_abs();
        let scale = p.iter().fold(noise, |a, v| a.max(v.abs()));
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((b - c * a).abs() <= 1e-6 * scale * c.abs().max(1.0), "{} vs {}", b, c * a);
        }
    }

    #[test]
    fn criterion_vanishes_iff_lie_derivative_vanishes(a in -1.0f64..1.0, b in -1.0f64..1.0, k in 0usize..3) {
        let m = torus(12);
        let g = metric_of(&m);
        let g3 = example53(&m, |t| a * t.sin() + b * (2.0 * t).cos()).unwrap();
        let mut v = [0.0; 3];
        v[k] = 1.0;
        let x = VectorField::constant(&m, &v).unwrap();
        let c = constraints::killing_extension_criterion(&g, &x, &g3).unwrap();
        let lie = tensor::lie_derivative(&x, &g3).unwrap().max_abs();
        prop_assert_eq!(c <= 1e-10, lie <= 1e-10);
    }
}
