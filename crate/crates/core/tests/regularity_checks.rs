//! Classification of the built-in costs, agreement of the two curvature
//! routes, maximum-principle scans, the critical-point second-derivative
//! signs, quantitative constants, and the law-of-cosines fits.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::great_circle_exp;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crosscurv_core::cost::{sample_pair, DomainSpec};
use crosscurv_core::geodesics::NewtonConfig;
use crosscurv_core::geometry::cross_curvature;
use crosscurv_core::regularity::*;
use crosscurv_core::CostChart;

fn cfg() -> NewtonConfig {
    NewtonConfig::default()
}

fn sphere_band() -> CostChart {
    CostChart::sphere_squared()
        .unwrap()
        .with_domain(DomainSpec::symmetric(
            &[(0.9, PI - 0.9), (0.5, 5.7)],
            0.1,
        ))
}

#[test]
fn classify_the_three_models() {
    let sph = sphere_band();
    let r = classify_regularity(&sph, 10, 8, 1e-9, 7).unwrap();
    assert_eq!(r.classification, Classification::A3s);
    assert!(r.min_normalized > 0.0);

    let le = CostChart::log_euclid(2).unwrap();
    let r = classify_regularity(&le, 10, 8, 1e-9, 7).unwrap();
    assert_eq!(r.classification, Classification::A3s);

    let hyp = CostChart::hyperbolic_squared(2).unwrap();
    let r = classify_regularity(&hyp, 10, 8, 1e-9, 7).unwrap();
    assert_eq!(r.classification, Classification::Violated);
    let w = r.witness.expect("violated classification carries a witness");
    let v = cross_curvature(&hyp, &w.x, &w.xb, &w.p, &w.pb).unwrap();
    assert!(v < 0.0);
}

#[test]
fn classification_is_stable_under_refinement() {
    for chart in [sphere_band(), CostChart::log_euclid(2).unwrap()] {
        let coarse = classify_regularity(&chart, 8, 6, 1e-9, 13).unwrap();
        let fine = classify_regularity(&chart, 16, 6, 1e-9, 13).unwrap();
        assert_eq!(coarse.classification, fine.classification);
        let rel = (coarse.min_normalized - fine.min_normalized).abs()
            / coarse.min_normalized.abs().max(1e-12);
        assert!(
            rel <= 0.10,
            "{}: min-cross moved by {rel:.3} under refinement",
            chart.kind()
        );
    }
}

#[test]
fn two_curvature_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let charts = vec![
        CostChart::euclid_quadratic(2).unwrap(),
        CostChart::log_euclid(2).unwrap().with_domain(DomainSpec::two_sided(
            &[(-0.6, 0.6), (-0.6, 0.6)],
            &[(2.2, 3.8), (-0.6, 0.6)],
            0.5,
        )),
        sphere_band(),
        CostChart::hyperbolic_squared(2)
            .unwrap()
            .with_domain(DomainSpec::symmetric(&[(-0.45, 0.45), (-0.45, 0.45)], 0.0)),
        CostChart::one_dim_family(1.0, false)
            .unwrap()
            .with_domain(DomainSpec::symmetric(&[(-0.7, 0.7)], 0.0)),
    ];
    for chart in &charts {
        let n = chart.n();
        let mut done = 0;
        let mut attempts = 0;
        while done < 50 && attempts < 400 {
            attempts += 1;
            let Some((x, xb)) = sample_pair(chart, &mut rng) else {
                break;
            };
            if chart.cross_hessian(&x, &xb).is_err() {
                continue;
            }
            let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let pb: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let tensor = cross_curvature(chart, &x, &xb, &p, &pb).unwrap();
            let fd = match cross_curvature_via_fd(chart, &x, &xb, &p, &pb, 0.05, &cfg()) {
                Ok(v) => v,
                Err(_) => continue, // stencil clipped by the domain
            };
            done += 1;
            let tol = (1e-2 * tensor.abs()).max(1e-3);
            assert!(
                (tensor - fd).abs() <= tol,
                "{}: tensor {tensor} vs fd {fd} at ({x:?}, {xb:?})",
                chart.kind()
            );
        }
        assert!(done >= 25, "{}: only {done} comparable samples", chart.kind());
    }
}

#[test]
fn diagonal_law_ties_cross_curvature_to_the_fit() {
    for (chart, x) in [
        (sphere_band(), vec![FRAC_PI_2, 2.0]),
        (
            CostChart::hyperbolic_squared(2).unwrap(),
            vec![0.05, -0.1],
        ),
    ] {
        let fit = law_of_cosines_fit(&chart, &x, FRAC_PI_2, 0.12, 5, &cfg()).unwrap();
        let scan = diagonal_constant_scan(&chart, 8, 5).unwrap();
        let lhs = 0.5 * (scan.min + scan.max);
        let rhs = 4.0 / 3.0 * fit.k;
        assert!(
            (lhs - rhs).abs() <= 5e-2,
            "{}: diagonal cross {lhs} vs (4/3)·k {rhs}",
            chart.kind()
        );
    }
}

#[test]
fn law_of_cosines_three_models() {
    let flat = CostChart::euclid_quadratic(2).unwrap();
    let k0 = law_of_cosines_fit(&flat, &[0.0, 0.0], FRAC_PI_2, 0.2, 4, &cfg()).unwrap();
    assert!(k0.k.abs() <= 1e-6);

    let sph = CostChart::sphere_squared().unwrap();
    let k1 = law_of_cosines_fit(&sph, &[FRAC_PI_2, 1.0], FRAC_PI_2, 0.12, 5, &cfg()).unwrap();
    assert!((k1.k - 1.0).abs() <= 5e-2);

    let hyp = CostChart::hyperbolic_squared(2).unwrap();
    let k2 = law_of_cosines_fit(&hyp, &[0.08, -0.03], FRAC_PI_2, 0.12, 5, &cfg()).unwrap();
    assert!((k2.k + 1.0).abs() <= 5e-2);

    // convergence of the fit as the window shrinks
    let k3 = law_of_cosines_fit(&hyp, &[0.08, -0.03], FRAC_PI_2, 0.06, 5, &cfg()).unwrap();
    assert!((k3.k + 1.0).abs() < (k2.k + 1.0).abs() + 1e-3);

    // a non-distance cost is refused
    assert!(law_of_cosines_fit(
        &CostChart::one_dim_family(1.0, false).unwrap(),
        &[0.0],
        FRAC_PI_2,
        0.1,
        4,
        &cfg()
    )
    .is_err());
}

fn sphere_config(rng: &mut ChaCha8Rng) -> ([f64; 2], [f64; 2], [f64; 2]) {
    let x = [rng.gen_range(1.1..2.0), rng.gen_range(1.5..4.7)];
    let v0 = [rng.gen_range(-0.55..0.55), rng.gen_range(-0.55..0.55)];
    let v1 = [rng.gen_range(-0.55..0.55), rng.gen_range(-0.55..0.55)];
    (x, great_circle_exp(&x, &v0), great_circle_exp(&x, &v1))
}

#[test]
fn sliding_mountain_holds_on_the_sphere() {
    let chart = CostChart::sphere_squared().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    // y-grid on a band around the configurations
    let ys: Vec<Vec<f64>> = {
        let mut v = Vec::new();
        for i in 0..8 {
            for j in 0..8 {
                v.push(vec![
                    0.8 + (PI - 1.6) * (i as f64 + 0.5) / 8.0,
                    1.0 + 4.0 * (j as f64 + 0.5) / 8.0,
                ]);
            }
        }
        v
    };
    let mut checked = 0;
    while checked < 12 {
        let (x, xb0, xb1) = sphere_config(&mut rng);
        match sliding_mountain_check(&chart, &x, &xb0, &xb1, &ys, 17, &cfg()) {
            Ok(scan) => {
                checked += 1;
                assert!(
                    scan.max_violation <= 1e-8,
                    "violation {} at t={} y={:?}",
                    scan.max_violation,
                    scan.argmax_t,
                    scan.argmax_y
                );
            }
            Err(_) => continue,
        }
    }
}

#[test]
fn contact_connectivity_on_the_sphere() {
    let chart = CostChart::sphere_squared().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4096);
    let ys: Vec<Vec<f64>> = (0..6)
        .flat_map(|i| {
            (0..6).map(move |j| {
                vec![
                    1.0 + 1.1 * (i as f64 + 0.5) / 6.0,
                    1.4 + 2.6 * (j as f64 + 0.5) / 6.0,
                ]
            })
        })
        .collect();
    let mut checked = 0;
    while checked < 8 {
        let (x, xb0, xb1) = sphere_config(&mut rng);
        match contact_connectivity_check(&chart, &x, &xb0, &xb1, &ys, 17, 1e-8, &cfg()) {
            Ok(report) => {
                checked += 1;
                assert!(report.pass, "deficit {}", report.max_deficit);
            }
            Err(_) => continue,
        }
    }
}

#[test]
fn hyperbolic_witness_violates_the_principle() {
    let chart = CostChart::hyperbolic_squared(2).unwrap();
    let w = fixtures::hyperbolic_sliding_witness();
    let v = sliding_violation_at(&chart, &w, 33, &cfg()).unwrap();
    assert!(v >= 1e-4, "stored witness no longer violates: {v}");

    // contact connectivity fails on the same configuration
    let report = contact_connectivity_check(
        &chart,
        &w.x,
        &w.xb0,
        &w.xb1,
        std::slice::from_ref(&w.y),
        33,
        1e-8,
        &cfg(),
    )
    .unwrap();
    assert!(!report.pass);
    assert!(report.max_deficit >= 1e-4);
}

#[test]
fn seeded_search_rediscovers_a_violation() {
    let chart = CostChart::hyperbolic_squared(2).unwrap();
    let (_w, v) = search_sliding_violation(&chart, 20240817, 400, 9, &cfg()).unwrap();
    assert!(v >= 1e-4, "search found only {v}");
}

#[test]
fn critical_points_convex_on_sphere_concave_on_hyperbolic() {
    // mirror-symmetric configurations force a critical point at t = 1/2
    let sph = CostChart::sphere_squared().unwrap();
    let x = [FRAC_PI_2, 0.5];
    let y = [FRAC_PI_2, 2.0];
    let xb0 = [FRAC_PI_2 - 0.45, 1.2];
    let xb1 = [FRAC_PI_2 + 0.45, 1.2];
    let pts = critical_point_convexity(&sph, &x, &y, &xb0, &xb1, 33, &cfg()).unwrap();
    assert!(!pts.is_empty(), "no interior critical point found");
    let (t0, f2) = pts[0];
    assert!((t0 - 0.5).abs() < 1e-3, "critical point at {t0}");
    assert!(f2 > 0.0, "second derivative {f2} not positive");

    let hyp = CostChart::hyperbolic_squared(2).unwrap();
    let hx = [-0.32, 0.0];
    let hy = [0.52, 0.0];
    let hxb0 = [0.1, -0.45];
    let hxb1 = [0.1, 0.45];
    let pts = critical_point_convexity(&hyp, &hx, &hy, &hxb0, &hxb1, 33, &cfg()).unwrap();
    assert!(!pts.is_empty());
    let (t0, f2) = pts[0];
    assert!((t0 - 0.5).abs() < 1e-3);
    assert!(f2 < 0.0, "second derivative {f2} not negative");

    // generic flat configurations have no interior critical point
    let flat = CostChart::euclid_quadratic(2).unwrap();
    let pts = critical_point_convexity(
        &flat,
        &[0.0, 0.0],
        &[0.3, 0.7],
        &[-0.5, 0.1],
        &[0.5, 0.3],
        33,
        &cfg(),
    )
    .unwrap();
    assert!(pts.is_empty());
}

#[test]
fn sliding_consistency_with_classification() {
    // wherever classification reports non-negative curvature, scans stay
    // within tolerance
    let charts = vec![CostChart::euclid_quadratic(2).unwrap(), sphere_band()];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for chart in &charts {
        let report = classify_regularity(chart, 8, 6, 1e-9, 3).unwrap();
        assert_ne!(report.classification, Classification::Violated);
        let ys = source_grid(chart, 6);
        let mut done = 0;
        while done < 5 {
            let Some((x, xb0)) = sample_pair(chart, &mut rng) else {
                break;
            };
            let Some((_, xb1)) = sample_pair(chart, &mut rng) else {
                break;
            };
            match sliding_mountain_check(chart, &x, &xb0, &xb1, &ys, 17, &cfg()) {
                Ok(scan) => {
                    done += 1;
                    assert!(scan.max_violation <= 1e-8, "{}", chart.kind());
                }
                Err(_) => continue,
            }
        }
    }
}

#[test]
fn constants_and_local_estimate_on_models() {
    let sph = CostChart::sphere_squared().unwrap().with_domain(
        DomainSpec::symmetric(&[(FRAC_PI_2 - 0.35, FRAC_PI_2 + 0.35), (0.8, 1.9)], 0.1),
    );
    let consts = estimate_constants(&sph, 10, 8, 5).unwrap();
    assert!(consts.c0 > 0.0);
    assert!(consts.c1 > 0.0);
    let deficit = local_estimate_check(
        &sph,
        &[FRAC_PI_2, 1.3],
        &[FRAC_PI_2 - 0.2, 1.1],
        &[FRAC_PI_2 + 0.25, 1.5],
        &consts,
        0.05,
        7,
        17,
        &cfg(),
    )
    .unwrap();
    assert!(deficit <= 1e-6, "sphere deficit {deficit}");

    let le = CostChart::log_euclid(2).unwrap();
    let consts = estimate_constants(&le, 10, 8, 5).unwrap();
    assert!(consts.c0 > 0.0);
    let deficit = local_estimate_check(
        &le,
        &[0.1, -0.2],
        &[2.6, -0.5],
        &[3.1, 0.6],
        &consts,
        0.05,
        7,
        17,
        &cfg(),
    )
    .unwrap();
    assert!(deficit <= 1e-6, "log deficit {deficit}");

    // violated costs are refused
    let hyp = CostChart::hyperbolic_squared(2).unwrap();
    let bad = estimate_constants(&hyp, 8, 6, 5).unwrap();
    assert!(local_estimate_check(
        &hyp,
        &[0.0, 0.0],
        &[-0.2, 0.0],
        &[0.2, 0.0],
        &bad,
        0.05,
        5,
        9,
        &cfg()
    )
    .is_err());
}
