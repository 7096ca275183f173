//! Newton cost exponentials and segments checked against closed-form
//! great-circle geometry, plus the segment invariants: nullity of the
//! velocity, endpoint inverses, affine reparameterization, and the
//! second-order convergence of the geodesic-equation residual.

mod common;

use approx::assert_relative_eq;
use common::*;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crosscurv_core::cost::{sample_pair, DomainSpec};
use crosscurv_core::geodesics::{
    c_exp, c_segment, c_star_exp, geodesic_residual, horizontal_geodesic, NewtonConfig,
};
use crosscurv_core::geometry::h_inner;
use crosscurv_core::{CostChart, Covector};

fn cfg() -> NewtonConfig {
    NewtonConfig::default()
}

fn sphere_metric(x: &[f64]) -> [f64; 2] {
    [1.0, x[0].sin() * x[0].sin()]
}

#[test]
fn sphere_c_exp_is_riemannian_exponential() {
    let chart = CostChart::sphere_squared().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..25 {
        let x = [rng.gen_range(0.8..2.3), rng.gen_range(0.3..5.9)];
        let p = [rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)];
        let g = sphere_metric(&x);
        let pstar = Covector::source(DVector::from_column_slice(&[g[0] * p[0], g[1] * p[1]]));
        let got = c_exp(&chart, &x, &pstar, &x, &cfg()).unwrap();
        let want = great_circle_exp(&x, &p);
        // compare on the sphere itself: φ branches may differ by 2π
        assert!(
            chordal_dist(&got, &want) < 1e-8,
            "c_exp mismatch: {got:?} vs {want:?}"
        );
    }
}

#[test]
fn sphere_c_star_exp_mirrors() {
    let chart = CostChart::sphere_squared().unwrap();
    let xb = [1.4, 2.0];
    let p = [0.3, -0.4];
    let g = sphere_metric(&xb);
    let qstar = Covector::target(DVector::from_column_slice(&[g[0] * p[0], g[1] * p[1]]));
    let got = c_star_exp(&chart, &xb, &qstar, &xb, &cfg()).unwrap();
    let want = great_circle_exp(&xb, &p);
    assert!(coord_dist(&got, &want) < 1e-8);
}

#[test]
fn left_right_inverse_on_bitwisted_builtins() {
    // pairs are drawn from a narrowed band, but the solves run on the full
    // working box so Newton has room to move
    let sampler = CostChart::sphere_squared().unwrap().with_domain(
        DomainSpec::symmetric(&[(0.8, std::f64::consts::PI - 0.8), (0.8, 5.5)], 0.3),
    );
    let charts = vec![
        (
            CostChart::euclid_quadratic(2).unwrap(),
            CostChart::euclid_quadratic(2).unwrap(),
        ),
        (CostChart::log_euclid(2).unwrap(), CostChart::log_euclid(2).unwrap()),
        (sampler, CostChart::sphere_squared().unwrap()),
        (
            CostChart::hyperbolic_squared(2).unwrap(),
            CostChart::hyperbolic_squared(2).unwrap(),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for (sampler, chart) in &charts {
        let mut done = 0;
        while done < 15 {
            let Some((x, xb)) = sample_pair(sampler, &mut rng) else {
                break;
            };
            done += 1;
            let q = Covector::target(-chart.grad_xb(&x, &xb).unwrap());
            // seed the solve away from the reflected cost's singular set
            let guess: Vec<f64> = if chart.in_domain(&xb, &xb) {
                xb.clone()
            } else {
                (0..chart.n())
                    .map(|k| 0.5 * (chart.domain.lo_x[k] + chart.domain.hi_x[k]))
                    .collect()
            };
            let back = c_star_exp(chart, &xb, &q, &guess, &cfg()).unwrap();
            let err = if chart.kind() == "sphere_squared" {
                chordal_dist(&back, &x)
            } else {
                coord_dist(&back, &x)
            };
            assert!(
                err < 1e-8,
                "{}: inverse failed: {back:?} vs {x:?}",
                chart.kind()
            );
        }
        assert!(done > 0);
    }
}

#[test]
fn sphere_segment_is_radial_interpolation() {
    // the cotangent line from x maps to radial interpolation in T_x then the
    // great-circle exponential
    let chart = CostChart::sphere_squared().unwrap();
    let x = [1.3, 2.2];
    let v0 = [0.5, 0.25];
    let v1 = [-0.3, 0.55];
    let xb0 = great_circle_exp(&x, &v0);
    let xb1 = great_circle_exp(&x, &v1);
    let seg = c_segment(&chart, &x, &xb0, &xb1, 33, &cfg()).unwrap();
    for (t, xbt) in &seg.samples {
        let vt = [(1.0 - t) * v0[0] + t * v1[0], (1.0 - t) * v0[1] + t * v1[1]];
        let want = great_circle_exp(&x, &vt);
        assert!(
            coord_dist(xbt, &want) < 1e-8,
            "segment sample off the radial interpolation at t = {t}"
        );
    }
}

#[test]
fn segment_velocity_is_null() {
    let charts = vec![
        CostChart::euclid_quadratic(2).unwrap(),
        CostChart::sphere_squared().unwrap(),
        CostChart::hyperbolic_squared(2).unwrap(),
    ];
    let configs: Vec<([f64; 2], [f64; 2], [f64; 2])> = vec![
        ([0.0, 0.0], [-0.5, 0.3], [0.5, -0.2]),
        ([1.5, 2.0], [1.2, 2.5], [1.9, 1.7]),
        ([0.1, -0.1], [-0.4, 0.2], [0.45, 0.3]),
    ];
    for (chart, (x, xb0, xb1)) in charts.iter().zip(configs) {
        let seg = c_segment(chart, &x, &xb0, &xb1, 33, &cfg()).unwrap();
        let dt = seg.samples[1].0 - seg.samples[0].0;
        for k in 1..seg.samples.len() - 1 {
            let prev = &seg.samples[k - 1].1;
            let next = &seg.samples[k + 1].1;
            let vel: Vec<f64> = (0..2).map(|i| (next[i] - prev[i]) / (2.0 * dt)).collect();
            // vertical tangent 0 ⊕ ẋ̄ pairs to zero against itself
            let tangent = [0.0, 0.0, vel[0], vel[1]];
            let h = h_inner(chart, &x, &seg.samples[k].1, &tangent, &tangent).unwrap();
            let scale = 1.0 + vel.iter().map(|v| v * v).sum::<f64>();
            assert!(
                h.abs() <= 1e-8 * scale,
                "{}: segment velocity not null: {h}",
                chart.kind()
            );
        }
    }
}

#[test]
fn affine_reparameterization() {
    let chart = CostChart::sphere_squared().unwrap();
    let x = [1.4, 1.0];
    let xb0 = [1.1, 1.5];
    let xb1 = [1.8, 0.7];
    let fwd = c_segment(&chart, &x, &xb0, &xb1, 17, &cfg()).unwrap();
    let bwd = c_segment(&chart, &x, &xb1, &xb0, 17, &cfg()).unwrap();
    for k in 0..17 {
        let a = &fwd.samples[k].1;
        let b = &bwd.samples[16 - k].1;
        assert!(coord_dist(a, b) < 1e-8);
    }
}

#[test]
fn residual_shrinks_quadratically() {
    let chart = CostChart::sphere_squared().unwrap();
    let x = [1.2, 0.7];
    let xb0 = great_circle_exp(&x, &[0.5, 0.3]);
    let xb1 = great_circle_exp(&x, &[-0.2, 0.8]);
    let r65 = geodesic_residual(&chart, &c_segment(&chart, &x, &xb0, &xb1, 65, &cfg()).unwrap())
        .unwrap();
    let r129 = geodesic_residual(&chart, &c_segment(&chart, &x, &xb0, &xb1, 129, &cfg()).unwrap())
        .unwrap();
    assert!(r65 <= 1e-4, "coarse residual too large: {r65}");
    let ratio = r65 / r129;
    assert!(
        (2.5..6.0).contains(&ratio),
        "expected ~4x shrink under halving, got {ratio}"
    );

    let le = CostChart::log_euclid(2).unwrap();
    let lx = [0.0, 0.0];
    let l0 = [2.5, -0.5];
    let l1 = [2.5, 0.7];
    let r65 = geodesic_residual(&le, &c_segment(&le, &lx, &l0, &l1, 65, &cfg()).unwrap()).unwrap();
    let r129 =
        geodesic_residual(&le, &c_segment(&le, &lx, &l0, &l1, 129, &cfg()).unwrap()).unwrap();
    assert!(r65 <= 1e-4);
    let ratio = r65 / r129;
    assert!((2.5..6.0).contains(&ratio));
}

#[test]
fn horizontal_geodesic_velocity_matches() {
    // ẋ(0) = p within 1e−6 by central differences on the samples
    let cases: Vec<(CostChart, [f64; 2], [f64; 2], [f64; 2])> = vec![
        (
            CostChart::log_euclid(2).unwrap(),
            [0.1, -0.2],
            [2.7, 0.3],
            [0.6, 0.8],
        ),
        (
            CostChart::sphere_squared().unwrap(),
            [1.4, 2.0],
            [1.1, 2.6],
            [0.4, -0.3],
        ),
        (
            CostChart::hyperbolic_squared(2).unwrap(),
            [0.1, 0.0],
            [-0.3, 0.35],
            [0.5, 0.2],
        ),
    ];
    for (chart, x, xb, p) in cases {
        let h = 1e-4;
        let grid = [-h, 0.0, h];
        let pts = horizontal_geodesic(&chart, &x, &xb, &p, &grid, &cfg()).unwrap();
        for i in 0..2 {
            let v = (pts[2].1[i] - pts[0].1[i]) / (2.0 * h);
            assert!(
                (v - p[i]).abs() < 1e-6,
                "{}: initial velocity {v} vs {}",
                chart.kind(),
                p[i]
            );
        }
        assert!(coord_dist(&pts[1].1, &x) < 1e-9);
    }
}

#[test]
fn horizontal_geodesic_through_base_is_great_circle() {
    // with the target on the curve's own great circle the horizontal
    // geodesic coincides with the Riemannian one
    let chart = CostChart::sphere_squared().unwrap();
    let x = [1.3, 1.0];
    let dir = [0.6, -0.2];
    let xb = great_circle_exp(&x, &dir);
    // initial velocity along the same great circle
    let norm = {
        let g = sphere_metric(&x);
        (g[0] * dir[0] * dir[0] + g[1] * dir[1] * dir[1]).sqrt()
    };
    let p = [dir[0] / norm, dir[1] / norm];
    let grid: Vec<f64> = (0..9).map(|k| -0.4 + 0.1 * k as f64).collect();
    let pts = horizontal_geodesic(&chart, &x, &xb, &p, &grid, &cfg()).unwrap();
    for (s, xs) in &pts {
        let want = great_circle_exp(&x, &[p[0] * s, p[1] * s]);
        assert!(
            coord_dist(xs, &want) < 1e-7,
            "s = {s}: {xs:?} vs {want:?}"
        );
    }
}
