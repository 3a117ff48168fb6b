use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fglab::constraints::{self, example53};
use fglab::evolution::{evolve_on_grid, log_grid};
use fglab::series;
use fglab::tensor::{self, metric_of};
use fglab::{BoundaryModel, SymTensorField, VectorField};

fn expansion(c: &mut Criterion) {
    let cs = BoundaryModel::circle_sphere(3, PI, 1.0).unwrap();
    let g = metric_of(&cs);
    let g3 = SymTensorField::from_blocks(&cs, vec![-4.0 / 3.0, 2.0 / 3.0]).unwrap();
    c.bench_function("expand circle-sphere order 12", |b| {
        b.iter(|| series::expand(black_box(&g), black_box(&g3), 12).unwrap())
    });

    let t3 = BoundaryModel::standard_torus(3, 8).unwrap();
    let g = metric_of(&t3);
    let tau = example53(&t3, f64::sin).unwrap();
    c.bench_function("expand torus 8^3 order 6", |b| {
        b.iter(|| series::expand(black_box(&g), black_box(&tau), 6).unwrap())
    });
}

fn evolution(c: &mut Criterion) {
    let cs = BoundaryModel::circle_sphere(3, PI, 1.0).unwrap();
    let g3 = SymTensorField::from_blocks(&cs, vec![0.2, -0.1]).unwrap();
    let s = series::expand(&metric_of(&cs), &g3, 8).unwrap();
    let grid = log_grid(0.01, 1.0, 121);
    c.bench_function("evolve circle-sphere to t=1", |b| {
        b.iter(|| evolve_on_grid(black_box(&s), &grid, 1e-10).unwrap())
    });
}

fn boundary_operators(c: &mut Criterion) {
    let t3 = BoundaryModel::standard_torus(3, 32).unwrap();
    let g = metric_of(&t3);
    let tau = example53(&t3, f64::sin).unwrap();
    let x = VectorField::constant(&t3, &[1.0, 0.0, 0.0]).unwrap();
    let h = tensor::lie_derivative(&x, &tau).unwrap();
    c.bench_function("spectral divergence 32^3", |b| {
        b.iter(|| tensor::divergence(black_box(&g), black_box(&tau)).unwrap())
    });
    let mut group = c.benchmark_group("identity");
    group.sample_size(10);
    group.bench_function("verify identity 32^3", |b| {
        b.iter(|| constraints::verify_identity(&g, &x, &tau, black_box(&h)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, expansion, evolution, boundary_operators);
criterion_main!(benches);
