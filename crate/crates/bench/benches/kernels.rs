//! Criterion benchmarks for the hot kernels: order-4 mixed partials,
//! curvature assembly, Newton inversion of the cost exponential, and a full
//! dual-ascent solve of the semidiscrete problem.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use nalgebra::DVector;

use crosscurv_core::envelopes::{solve_semidiscrete, AscentConfig, Grid2d, SemidiscreteProblem};
use crosscurv_core::geodesics::{c_exp, NewtonConfig};
use crosscurv_core::geometry::{cross_curvature, mixed_riemann};
use crosscurv_core::{CostChart, Covector, MultiIndex};

fn bench_mixed_partial(c: &mut Criterion) {
    let chart = CostChart::sphere_squared().unwrap();
    let x = [1.3, 0.8];
    let xb = [1.7, 1.9];
    let idx = MultiIndex::new(vec![0, 1], vec![0, 1], 2).unwrap();
    c.bench_function("mixed_partial order 4, sphere", |b| {
        b.iter(|| {
            chart
                .mixed_partial(black_box(&x), black_box(&xb), &idx)
                .unwrap()
        })
    });
}

fn bench_curvature(c: &mut Criterion) {
    let chart = CostChart::sphere_squared().unwrap();
    let x = [1.3, 0.8];
    let xb = [1.7, 1.9];
    let p = [0.6, -0.3];
    let pb = [0.2, 0.9];
    c.bench_function("mixed Riemann tensor, sphere", |b| {
        b.iter(|| mixed_riemann(&chart, black_box(&x), black_box(&xb)).unwrap())
    });
    c.bench_function("cross-curvature, sphere", |b| {
        b.iter(|| cross_curvature(&chart, black_box(&x), black_box(&xb), &p, &pb).unwrap())
    });
}

fn bench_c_exp(c: &mut Criterion) {
    let chart = CostChart::sphere_squared().unwrap();
    let x = [1.3, 0.8];
    let pstar = Covector::source(DVector::from_column_slice(&[0.4, 0.25]));
    let cfg = NewtonConfig::default();
    c.bench_function("c-exponential Newton solve, sphere", |b| {
        b.iter(|| c_exp(&chart, black_box(&x), &pstar, &x, &cfg).unwrap())
    });
}

fn bench_semidiscrete(c: &mut Criterion) {
    let chart = CostChart::euclid_quadratic(2).unwrap();
    let grid = Grid2d::new(128, 128, [[-1.0, 1.0], [-1.0, 1.0]]).unwrap();
    let dir = [0.9393727128473789, 0.3428978074554514];
    let targets: Vec<Vec<f64>> = [-0.6f64, 0.0, 0.6]
        .iter()
        .map(|s| vec![s * dir[0], s * dir[1]])
        .collect();
    let problem = SemidiscreteProblem::uniform_geodesic_disk(
        chart,
        grid,
        &[0.0, 0.0],
        1.0,
        targets,
        vec![1.0 / 3.0; 3],
    )
    .unwrap();
    c.bench_function("semidiscrete solve, 128^2 three targets", |b| {
        b.iter(|| solve_semidiscrete(black_box(&problem), &AscentConfig::default()).unwrap())
    });
}

criterion_group!(
    benches,
    bench_mixed_partial,
    bench_curvature,
    bench_c_exp,
    bench_semidiscrete
);
criterion_main!(benches);
