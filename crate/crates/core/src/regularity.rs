//! Regularity classification of costs, the non-tensorial finite-difference
//! curvature oracle, sliding-mountain and contact-connectivity checks,
//! quantitative constants for the local estimate, and the law-of-cosines
//! coefficient fit.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{CostChart, Covector};
use crate::error::{Error, Result};
use crate::geodesics::{c_exp, c_segment, horizontal_geodesic, NewtonConfig};
use crate::geometry::{cross_curvature, mixed_riemann, raise_covector, CROSS_NORMALIZATION};

/// Outcome of sampling the null cross-curvature over a box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Strictly positive null cross-curvature on every sample.
    A3s,
    /// Non-negative within tolerance.
    A3w,
    /// A negative null cross-curvature was found.
    Violated,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::A3s => "A3s",
            Classification::A3w => "A3w",
            Classification::Violated => "violated",
        }
    }
}

/// A sampled witness configuration `(x, x̄, p, p̄)`.
#[derive(Clone, Debug)]
pub struct CurvatureWitness {
    pub x: Vec<f64>,
    pub xb: Vec<f64>,
    pub p: Vec<f64>,
    pub pb: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct RegularityReport {
    pub samples_examined: usize,
    pub degenerate_skipped: usize,
    pub out_of_domain_skipped: usize,
    /// Minimum of cross-curvature ÷ (|p|²|p̄|²) over sampled null vectors.
    pub min_normalized: f64,
    pub classification: Classification,
    pub witness: Option<CurvatureWitness>,
    pub tol: f64,
    pub seed: u64,
}

/// Sample null vectors `p ⊕ p̄` via the exact parameterization: `p` a unit
/// vector, `q` a unit covector with `q·p = 0`, and `p̄^k̄ = c^{k̄e} q_e`, which
/// is null because `c_{ij̄} pⁱ p̄^j̄ = −p·q = 0`.
pub fn classify_regularity(
    chart: &CostChart,
    points_per_side: usize,
    directions_per_point: usize,
    tol: f64,
    seed: u64,
) -> Result<RegularityReport> {
    let n = chart.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_normalized = f64::INFINITY;
    let mut witness = None;
    let mut examined = 0usize;
    let mut degenerate = 0usize;
    let mut out_of_domain = 0usize;

    if n < 2 {
        // one-dimensional charts have no nonzero null vectors with both
        // components present; the null condition is vacuous
        return Ok(RegularityReport {
            samples_examined: 0,
            degenerate_skipped: 0,
            out_of_domain_skipped: 0,
            min_normalized: 0.0,
            classification: Classification::A3w,
            witness: None,
            tol,
            seed,
        });
    }

    // deterministic anchors (box corners and center) so the sampled minimum
    // is stable under refinement, plus seeded random fill
    let side_points = |rng: &mut ChaCha8Rng, lo: &[f64], hi: &[f64]| -> Vec<Vec<f64>> {
        let mut pts = Vec::with_capacity(points_per_side);
        let corners = 1usize << n;
        for c in 0..corners.min(points_per_side) {
            pts.push(
                (0..n)
                    .map(|k| if c >> k & 1 == 1 { hi[k] } else { lo[k] })
                    .collect(),
            );
        }
        if pts.len() < points_per_side {
            pts.push((0..n).map(|k| 0.5 * (lo[k] + hi[k])).collect());
        }
        while pts.len() < points_per_side {
            pts.push((0..n).map(|k| rng.gen_range(lo[k]..=hi[k])).collect());
        }
        pts
    };
    let xs = side_points(&mut rng, &chart.domain.lo_x, &chart.domain.hi_x);
    let xbs = side_points(&mut rng, &chart.domain.lo_xb, &chart.domain.hi_xb);

    for x in &xs {
        for xb in &xbs {
            if !chart.in_domain(x, xb) {
                out_of_domain += 1;
                continue;
            }
            let ch = match chart.cross_hessian(x, xb) {
                Ok(ch) => ch,
                Err(Error::NondegeneracyFailure { .. }) => {
                    degenerate += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let riemann = mixed_riemann(chart, x, xb)?;
            for _ in 0..directions_per_point {
                let p = random_unit(&mut rng, n);
                let q = random_unit_orthogonal(&mut rng, &p);
                let pb = raise_covector(&ch, &q);
                let pb_norm2: f64 = pb.iter().map(|v| v * v).sum();
                if pb_norm2 < 1e-20 {
                    degenerate += 1;
                    continue;
                }
                examined += 1;
                let value = CROSS_NORMALIZATION * riemann.contract_cross(&p, &pb) / pb_norm2;
                if value < min_normalized {
                    min_normalized = value;
                    witness = Some(CurvatureWitness {
                        x: x.clone(),
                        xb: xb.clone(),
                        p: p.clone(),
                        pb,
                    });
                }
            }
        }
    }
    if examined == 0 {
        return Err(Error::InvalidParameter(
            "no admissible samples in the domain box".into(),
        ));
    }
    let classification = if min_normalized > tol {
        Classification::A3s
    } else if min_normalized < -tol {
        Classification::Violated
    } else {
        Classification::A3w
    };
    Ok(RegularityReport {
        samples_examined: examined,
        degenerate_skipped: degenerate,
        out_of_domain_skipped: out_of_domain,
        min_normalized,
        classification,
        witness,
        tol,
        seed,
    })
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let norm2: f64 = v.iter().map(|a| a * a).sum();
        if norm2 > 1e-3 {
            let norm = norm2.sqrt();
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

fn random_unit_orthogonal(rng: &mut ChaCha8Rng, p: &[f64]) -> Vec<f64> {
    loop {
        let mut q = random_unit(rng, p.len());
        let dot: f64 = q.iter().zip(p).map(|(a, b)| a * b).sum();
        for (qi, pi) in q.iter_mut().zip(p) {
            *qi -= dot * pi;
        }
        let norm2: f64 = q.iter().map(|a| a * a).sum();
        if norm2 > 1e-6 {
            let norm = norm2.sqrt();
            return q.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// Diagonal scan for squared-distance costs: cross-curvature at sampled
/// diagonal points over metric-orthonormal frames. For constant-curvature
/// models the value is the constant `4/3 · sec`.
#[derive(Clone, Debug)]
pub struct DiagonalScan {
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

pub fn diagonal_constant_scan(
    chart: &CostChart,
    points: usize,
    seed: u64,
) -> Result<DiagonalScan> {
    let n = chart.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(points);
    let mut tries = 0usize;
    while values.len() < points && tries < points * 200 {
        tries += 1;
        let x: Vec<f64> = (0..n)
            .map(|k| rng.gen_range(chart.domain.lo_x[k]..=chart.domain.hi_x[k]))
            .collect();
        if !chart.in_domain(&x, &x) {
            continue;
        }
        let ch = match chart.cross_hessian(&x, &x) {
            Ok(ch) => ch,
            Err(Error::NondegeneracyFailure { .. }) => continue,
            Err(e) => return Err(e),
        };
        // metric on the diagonal: g = −c_{ij̄}(x, x)
        let g = -&ch.a;
        let p = g_orthonormalize(&mut rng, &g, None)?;
        let pb = g_orthonormalize(&mut rng, &g, Some(&p))?;
        values.push(cross_curvature(chart, &x, &x, &p, &pb)?);
    }
    if values.is_empty() {
        return Err(Error::InvalidParameter(
            "no admissible diagonal points found".into(),
        ));
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(DiagonalScan { values, min, max })
}

fn g_orthonormalize(
    rng: &mut ChaCha8Rng,
    g: &nalgebra::DMatrix<f64>,
    against: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let n = g.nrows();
    for _ in 0..100 {
        let mut v = random_unit(rng, n);
        if let Some(w) = against {
            let gw = g * DVector::from_column_slice(w);
            let vd = DVector::from_column_slice(&v);
            let num = vd.dot(&gw);
            let den = DVector::from_column_slice(w).dot(&gw);
            for k in 0..n {
                v[k] -= num / den * w[k];
            }
        }
        let vd = DVector::from_column_slice(&v);
        let norm2 = vd.dot(&(g * &vd));
        if norm2 > 1e-8 {
            let norm = norm2.sqrt();
            return Ok(v.into_iter().map(|a| a / norm).collect());
        }
    }
    Err(Error::InvalidParameter(
        "failed to build a metric-orthonormal frame".into(),
    ))
}

/// Independent curvature oracle: −2·∂⁴/∂s²∂t² of `c(x(s), x̄(t))` at the
/// base pair, where `x(s)` is the horizontal geodesic with velocity `p` and
/// `x̄(t) = x̄ + t·p̄` a straight coordinate line. Fourth derivative by
/// 5-point central stencils in each variable; the step is validated by a
/// two-step halving consistency test.
pub fn cross_curvature_via_fd(
    chart: &CostChart,
    x: &[f64],
    xb: &[f64],
    p: &[f64],
    pb: &[f64],
    step: f64,
    cfg: &NewtonConfig,
) -> Result<f64> {
    let e1 = fd_fourth(chart, x, xb, p, pb, step, cfg)?;
    let e2 = fd_fourth(chart, x, xb, p, pb, step / 2.0, cfg)?;
    let scale = e1.abs().max(e2.abs()).max(1e-5);
    if (e1 - e2).abs() > 0.1 * scale {
        return Err(Error::StencilInconsistent(e1, e2));
    }
    Ok(-2.0 * e2)
}

fn fd_fourth(
    chart: &CostChart,
    x: &[f64],
    xb: &[f64],
    p: &[f64],
    pb: &[f64],
    h: f64,
    cfg: &NewtonConfig,
) -> Result<f64> {
    let n = chart.n();
    // x(s) on s ∈ {0, ±h, ±2h} by continuation outward from 0
    let pos: Vec<f64> = vec![0.0, h, 2.0 * h];
    let neg: Vec<f64> = vec![0.0, -h, -2.0 * h];
    let xs_pos = horizontal_geodesic(chart, x, xb, p, &pos, cfg)?;
    let xs_neg = horizontal_geodesic(chart, x, xb, p, &neg, cfg)?;
    let x_at = |i: i32| -> &Vec<f64> {
        match i {
            0 => &xs_pos[0].1,
            1 => &xs_pos[1].1,
            2 => &xs_pos[2].1,
            -1 => &xs_neg[1].1,
            -2 => &xs_neg[2].1,
            _ => unreachable!(),
        }
    };
    let g = |i: i32, j: i32| -> Result<f64> {
        let xs = x_at(i);
        let xbt: Vec<f64> = (0..n).map(|k| xb[k] + j as f64 * h * pb[k]).collect();
        if !chart.in_domain(xs, &xbt) {
            return Err(Error::StencilOutOfDomain);
        }
        chart.eval(xs, &xbt)
    };
    // O(h⁴) five-point second derivative in t for each s, then in s
    let d2t = |i: i32| -> Result<f64> {
        Ok(
            (-g(i, -2)? + 16.0 * g(i, -1)? - 30.0 * g(i, 0)? + 16.0 * g(i, 1)? - g(i, 2)?)
                / (12.0 * h * h),
        )
    };
    Ok(
        (-d2t(-2)? + 16.0 * d2t(-1)? - 30.0 * d2t(0)? + 16.0 * d2t(1)? - d2t(2)?)
            / (12.0 * h * h),
    )
}

// ---------------------------------------------------------------------------
// sliding mountains

/// Result of scanning `f(t, y) = −c(y, x̄(t)) + c(x, x̄(t))` against its
/// endpoint values over a (t, y) grid.
#[derive(Clone, Debug)]
pub struct SlidingReport {
    /// max over admissible (t, y) of `f(t,y) − max{f(0,y), f(1,y)}`
    pub max_violation: f64,
    pub argmax_t: f64,
    pub argmax_y: Vec<f64>,
    pub skipped_y: usize,
    pub evaluated_y: usize,
}

pub fn sliding_mountain_check(
    chart: &CostChart,
    x: &[f64],
    xb0: &[f64],
    xb1: &[f64],
    y_grid: &[Vec<f64>],
    t_samples: usize,
    cfg: &NewtonConfig,
) -> Result<SlidingReport> {
    let seg = c_segment(chart, x, xb0, xb1, t_samples, cfg)?;
    let base: Vec<f64> = seg
        .samples
        .iter()
        .map(|(_, xbt)| chart.eval(x, xbt))
        .collect::<Result<_>>()?;
    let mut max_violation = f64::NEG_INFINITY;
    let mut argmax_t = 0.0;
    let mut argmax_y = Vec::new();
    let mut skipped = 0usize;
    let mut evaluated = 0usize;
    for y in y_grid {
        if seg
            .samples
            .iter()
            .any(|(_, xbt)| !chart.in_domain(y, xbt))
        {
            skipped += 1;
            continue;
        }
        evaluated += 1;
        let f: Vec<f64> = seg
            .samples
            .iter()
            .zip(&base)
            .map(|((_, xbt), b)| chart.eval(y, xbt).map(|c| b - c))
            .collect::<Result<_>>()?;
        let cap = f[0].max(*f.last().unwrap());
        for (k, (t, _)) in seg.samples.iter().enumerate() {
            let v = f[k] - cap;
            if v > max_violation {
                max_violation = v;
                argmax_t = *t;
                argmax_y = y.clone();
            }
        }
    }
    if evaluated == 0 {
        return Err(Error::InvalidParameter(
            "every grid point was skipped as out of domain".into(),
        ));
    }
    Ok(SlidingReport {
        max_violation,
        argmax_t,
        argmax_y,
        skipped_y: skipped,
        evaluated_y: evaluated,
    })
}

/// Contact-set connectivity: with the two-mountain envelope normalized so
/// both mountains touch at `x`, every interpolating focus `x̄(t)` must remain
/// in the contact set at `x`. The deficit coincides with the sliding-mountain
/// violation for this normalization.
#[derive(Clone, Debug)]
pub struct ContactReport {
    pub pass: bool,
    pub max_deficit: f64,
    pub argmax_t: f64,
    pub argmax_y: Vec<f64>,
    pub skipped_y: usize,
}

pub fn contact_connectivity_check(
    chart: &CostChart,
    x: &[f64],
    xb0: &[f64],
    xb1: &[f64],
    y_grid: &[Vec<f64>],
    t_samples: usize,
    tol: f64,
    cfg: &NewtonConfig,
) -> Result<ContactReport> {
    let scan = sliding_mountain_check(chart, x, xb0, xb1, y_grid, t_samples, cfg)?;
    Ok(ContactReport {
        pass: scan.max_violation <= tol,
        max_deficit: scan.max_violation,
        argmax_t: scan.argmax_t,
        argmax_y: scan.argmax_y,
        skipped_y: scan.skipped_y,
    })
}

/// Interior critical points of `t ↦ f(t) = −c(y, x̄(t)) + c(x, x̄(t))` located
/// by sign changes of the difference quotient and refined by bisection;
/// reports the second difference at each.
pub fn critical_point_convexity(
    chart: &CostChart,
    x: &[f64],
    y: &[f64],
    xb0: &[f64],
    xb1: &[f64],
    t_samples: usize,
    cfg: &NewtonConfig,
) -> Result<Vec<(f64, f64)>> {
    let seg = c_segment(chart, x, xb0, xb1, t_samples, cfg)?;
    let p0 = &seg.pstar0;
    let p1 = &seg.pstar1;
    let eval_f = |t: f64, guess: &[f64]| -> Result<(f64, Vec<f64>)> {
        let pt = Covector::source(p0 * (1.0 - t) + p1 * t);
        let xbt = c_exp(chart, x, &pt, guess, cfg)?;
        if !chart.in_domain(y, &xbt) {
            return Err(Error::OutOfDomain);
        }
        let f = chart.eval(x, &xbt)? - chart.eval(y, &xbt)?;
        Ok((f, xbt))
    };
    // f on the sample grid
    let mut fs = Vec::with_capacity(seg.samples.len());
    for (_, xbt) in &seg.samples {
        if !chart.in_domain(y, xbt) {
            return Err(Error::OutOfDomain);
        }
        fs.push(chart.eval(x, xbt)? - chart.eval(y, xbt)?);
    }
    let m = fs.len();
    let dt = 1.0 / (m - 1) as f64;
    let slope = |k: usize| (fs[k + 1] - fs[k]) / dt;
    let mut out = Vec::new();
    for k in 0..m - 2 {
        let s0 = slope(k);
        let s1 = slope(k + 1);
        if s0 == 0.0 || s0 * s1 > 0.0 {
            continue;
        }
        // bisect on the centered difference quotient
        let mut lo = seg.samples[k].0 + 0.5 * dt;
        let mut hi = seg.samples[k + 1].0 + 0.5 * dt;
        let mut guess = seg.samples[k + 1].1.clone();
        let delta = 1e-5;
        let fprime = |t: f64, guess: &[f64]| -> Result<(f64, Vec<f64>)> {
            let (fp, g1) = eval_f(t + delta, guess)?;
            let (fm, _) = eval_f(t - delta, &g1)?;
            Ok(((fp - fm) / (2.0 * delta), g1))
        };
        let (mut flo, g) = fprime(lo, &guess)?;
        guess = g;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let (fmid, g) = fprime(mid, &guess)?;
            guess = g;
            if flo * fmid <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
                flo = fmid;
            }
            if hi - lo < 1e-9 {
                break;
            }
        }
        let t0 = 0.5 * (lo + hi);
        let d2 = 1e-4;
        let (fp, g1) = eval_f(t0 + d2, &guess)?;
        let (f0, g2) = eval_f(t0, &g1)?;
        let (fm, _) = eval_f(t0 - d2, &g2)?;
        out.push((t0, (fp - 2.0 * f0 + fm) / (d2 * d2)));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// quantitative constants

/// Quantitative constants for the local sliding-mountain estimate.
#[derive(Clone, Debug)]
pub struct ConstantsEstimate {
    /// Half the minimum normalized null cross-curvature over the sampled box.
    pub c0: f64,
    /// `C₁ = C₀ · ‖2 DD̄c‖⁻² · ‖[DD̄c]⁻¹‖⁻²`
    pub c1: f64,
    pub norm_2ddc: f64,
    pub norm_ddc_inv: f64,
    pub c2_norm: f64,
    pub c3_norm: f64,
    pub min_normalized_cross: f64,
    pub samples: usize,
}

pub fn estimate_constants(
    chart: &CostChart,
    points_per_side: usize,
    directions_per_point: usize,
    seed: u64,
) -> Result<ConstantsEstimate> {
    let report = classify_regularity(chart, points_per_side, directions_per_point, 1e-9, seed)?;
    let n = chart.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let mut norm_a: f64 = 0.0;
    let mut norm_inv: f64 = 0.0;
    let mut c2: f64 = 0.0;
    let mut c3: f64 = 0.0;
    let mut samples = 0usize;
    let indices = crate::cost::all_multi_indices(n, 3);
    let mut tries = 0usize;
    let budget = points_per_side * points_per_side;
    while samples < budget && tries < budget * 50 {
        tries += 1;
        let x: Vec<f64> = (0..n)
            .map(|k| rng.gen_range(chart.domain.lo_x[k]..=chart.domain.hi_x[k]))
            .collect();
        let xb: Vec<f64> = (0..n)
            .map(|k| rng.gen_range(chart.domain.lo_xb[k]..=chart.domain.hi_xb[k]))
            .collect();
        if !chart.in_domain(&x, &xb) {
            continue;
        }
        let ch = match chart.cross_hessian(&x, &xb) {
            Ok(ch) => ch,
            Err(Error::NondegeneracyFailure { .. }) => continue,
            Err(e) => return Err(e),
        };
        samples += 1;
        norm_a = norm_a.max(spectral_norm(&ch.a));
        norm_inv = norm_inv.max(spectral_norm(&ch.a_inv));
        let c0v = chart.eval(&x, &xb)?.abs();
        c2 = c2.max(c0v);
        c3 = c3.max(c0v);
        for idx in &indices {
            let v = chart.mixed_partial(&x, &xb, idx)?.abs();
            if idx.order() <= 2 {
                c2 = c2.max(v);
            }
            c3 = c3.max(v);
        }
    }
    if samples == 0 {
        return Err(Error::InvalidParameter(
            "no admissible pairs while estimating constants".into(),
        ));
    }
    let c0 = 0.5 * report.min_normalized;
    let norm_2ddc = 2.0 * norm_a;
    let c1 = c0 * norm_2ddc.powi(-2) * norm_inv.powi(-2);
    Ok(ConstantsEstimate {
        c0,
        c1,
        norm_2ddc,
        norm_ddc_inv: norm_inv,
        c2_norm: c2,
        c3_norm: c3,
        min_normalized_cross: report.min_normalized,
        samples,
    })
}

fn spectral_norm(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

/// Checks the local quantitative inequality
/// `max[f(0,y), f(1,y)] ≥ f(t,y) + C₁ t(1−t)|x̄₁−x̄₀|²|y−x|² − ‖c‖_{C³}|y−x|³`
/// over a ball of radius `y_radius` around `x`; returns the maximum deficit
/// (non-positive means the inequality held everywhere sampled).
pub fn local_estimate_check(
    chart: &CostChart,
    x: &[f64],
    xb0: &[f64],
    xb1: &[f64],
    consts: &ConstantsEstimate,
    y_radius: f64,
    y_per_axis: usize,
    t_samples: usize,
    cfg: &NewtonConfig,
) -> Result<f64> {
    if consts.min_normalized_cross < -1e-9 {
        return Err(Error::NotStrictlyRegular(consts.min_normalized_cross));
    }
    let n = chart.n();
    let seg = c_segment(chart, x, xb0, xb1, t_samples, cfg)?;
    let base: Vec<f64> = seg
        .samples
        .iter()
        .map(|(_, xbt)| chart.eval(x, xbt))
        .collect::<Result<_>>()?;
    let dxb2: f64 = xb0
        .iter()
        .zip(xb1)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    // tensor grid over the coordinate ball around x
    let mut ys: Vec<Vec<f64>> = vec![vec![]];
    for k in 0..n {
        let mut next = Vec::new();
        for partial in &ys {
            for j in 0..y_per_axis {
                let frac = if y_per_axis == 1 {
                    0.0
                } else {
                    -1.0 + 2.0 * j as f64 / (y_per_axis - 1) as f64
                };
                let mut p = partial.clone();
                p.push(x[k] + frac * y_radius);
                next.push(p);
            }
        }
        ys = next;
    }
    let mut max_deficit = f64::NEG_INFINITY;
    let mut any = false;
    for y in &ys {
        let r2: f64 = y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
        if r2 > y_radius * y_radius {
            continue;
        }
        if seg.samples.iter().any(|(_, xbt)| !chart.in_domain(y, xbt)) {
            continue;
        }
        any = true;
        let r = r2.sqrt();
        let f: Vec<f64> = seg
            .samples
            .iter()
            .zip(&base)
            .map(|((_, xbt), b)| chart.eval(y, xbt).map(|c| b - c))
            .collect::<Result<_>>()?;
        let cap = f[0].max(*f.last().unwrap());
        for (k, (t, _)) in seg.samples.iter().enumerate() {
            let lower = f[k] + consts.c1 * t * (1.0 - t) * dxb2 * r2 - consts.c3_norm * r2 * r;
            max_deficit = max_deficit.max(lower - cap);
        }
    }
    if !any {
        return Err(Error::InvalidParameter(
            "no admissible sample points in the y-ball".into(),
        ));
    }
    Ok(max_deficit)
}

// ---------------------------------------------------------------------------
// law of cosines

#[derive(Clone, Debug)]
pub struct KFit {
    /// Fitted curvature of the plane spanned by the two geodesic velocities.
    pub k: f64,
    /// Raw fitted coefficient of s²t².
    pub coef: f64,
    pub ill_conditioned: bool,
}

/// Fit of the fourth-order correction in the geodesic law of cosines
/// `d²(x(s), x̄(t)) = s² + t² − 2st·cosθ − (k/3) s²t² sin²θ + O(5)` for a
/// squared-distance cost, using cost exponentials for both geodesics.
pub fn law_of_cosines_fit(
    chart: &CostChart,
    x: &[f64],
    theta: f64,
    s_max: f64,
    m_per_axis: usize,
    cfg: &NewtonConfig,
) -> Result<KFit> {
    match chart.kind() {
        "euclid_quadratic" | "sphere_squared" | "hyperbolic_squared" => {}
        other => return Err(Error::NotSquaredDistance(other.to_string())),
    }
    let n = chart.n();
    let ch = chart.cross_hessian(x, x)?;
    let g = -ch.a.clone();
    // metric-orthonormal pair (u, w), then v at angle θ from u
    let gnorm = |v: &DVector<f64>| (v.dot(&(&g * v))).sqrt();
    let mut u = DVector::zeros(n);
    u[0] = 1.0;
    u /= gnorm(&u);
    let mut w = DVector::zeros(n);
    w[if n > 1 { 1 } else { 0 }] = 1.0;
    let proj = u.dot(&(&g * &w));
    w -= proj * &u;
    let wn = gnorm(&w);
    if wn < 1e-12 {
        return Err(Error::InvalidParameter(
            "could not build a second frame direction".into(),
        ));
    }
    w /= wn;
    let v = theta.cos() * &u + theta.sin() * &w;

    let ray = |dir: &DVector<f64>, smax: f64, m: usize| -> Result<Vec<(f64, Vec<f64>)>> {
        let mut pts = Vec::new();
        for sign in [1.0f64, -1.0] {
            let mut guess = x.to_vec();
            for j in 1..=m {
                let s = sign * smax * j as f64 / m as f64;
                let pstar = Covector::source(&g * (dir * s));
                let xs = c_exp(chart, x, &pstar, &guess, cfg)?;
                guess = xs.clone();
                pts.push((s, xs));
            }
        }
        Ok(pts)
    };
    let xs = ray(&u, s_max, m_per_axis)?;
    let xbs = ray(&v, s_max, m_per_axis)?;

    let mut num = 0.0;
    let mut den = 0.0;
    let mut count = 0usize;
    for (s, xp) in &xs {
        for (t, xq) in &xbs {
            if !chart.in_domain(xp, xq) {
                continue;
            }
            let d2 = 2.0 * chart.eval(xp, xq)?;
            let r = d2 - (s * s + t * t - 2.0 * s * t * theta.cos());
            let wgt = s * s * t * t;
            num += r * wgt;
            den += wgt * wgt;
            count += 1;
        }
    }
    if count < 4 || den <= 0.0 {
        return Err(Error::TooFewSamples { need: 4, got: count });
    }
    let coef = num / den;
    let sin2 = theta.sin().powi(2);
    let ill = sin2 < 1e-6;
    let k = if ill { f64::NAN } else { -3.0 * coef / sin2 };
    Ok(KFit {
        k,
        coef,
        ill_conditioned: ill,
    })
}

// ---------------------------------------------------------------------------
// randomized violation search

/// A stored configuration violating the sliding-mountain principle.
#[derive(Clone, Debug)]
pub struct ViolationWitness {
    pub x: Vec<f64>,
    pub xb0: Vec<f64>,
    pub xb1: Vec<f64>,
    pub y: Vec<f64>,
}

/// Violation of `f(t,y) ≤ max{f(0,y), f(1,y)}` at a single configuration,
/// scanning a fixed t-grid.
pub fn sliding_violation_at(
    chart: &CostChart,
    w: &ViolationWitness,
    t_samples: usize,
    cfg: &NewtonConfig,
) -> Result<f64> {
    let scan = sliding_mountain_check(
        chart,
        &w.x,
        &w.xb0,
        &w.xb1,
        std::slice::from_ref(&w.y),
        t_samples,
        cfg,
    )?;
    Ok(scan.max_violation)
}

/// Simulated-annealing search for a sliding-mountain violation, used on
/// costs that fail weak regularity. Deterministic for a fixed seed.
pub fn search_sliding_violation(
    chart: &CostChart,
    seed: u64,
    iters: usize,
    t_samples: usize,
    cfg: &NewtonConfig,
) -> Result<(ViolationWitness, f64)> {
    let n = chart.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let widths: Vec<f64> = (0..n)
        .map(|k| chart.domain.hi_x[k] - chart.domain.lo_x[k])
        .collect();
    let sample_point = |rng: &mut ChaCha8Rng, lo: &[f64], hi: &[f64]| -> Vec<f64> {
        (0..n).map(|k| rng.gen_range(lo[k]..=hi[k])).collect()
    };
    let objective = |w: &ViolationWitness| -> f64 {
        sliding_violation_at(chart, w, t_samples, cfg).unwrap_or(f64::NEG_INFINITY)
    };
    let dom = &chart.domain;
    let mut current = ViolationWitness {
        x: sample_point(&mut rng, &dom.lo_x, &dom.hi_x),
        xb0: sample_point(&mut rng, &dom.lo_xb, &dom.hi_xb),
        xb1: sample_point(&mut rng, &dom.lo_xb, &dom.hi_xb),
        y: sample_point(&mut rng, &dom.lo_x, &dom.hi_x),
    };
    let mut cur_val = objective(&current);
    let mut best = current.clone();
    let mut best_val = cur_val;
    for it in 0..iters {
        let temp = 0.3 * (1e-3f64 / 0.3).powf(it as f64 / iters.max(1) as f64);
        let mut cand = current.clone();
        {
            let fields: [&mut Vec<f64>; 4] =
                [&mut cand.x, &mut cand.xb0, &mut cand.xb1, &mut cand.y];
            for f in fields {
                for k in 0..n {
                    let sigma = 0.4 * temp.sqrt() * widths[k];
                    *f.get_mut(k).unwrap() += sigma * (rng.gen_range(-1.0..=1.0));
                }
            }
        }
        let clamp = |v: &mut Vec<f64>, lo: &[f64], hi: &[f64]| {
            for k in 0..n {
                v[k] = v[k].clamp(lo[k], hi[k]);
            }
        };
        clamp(&mut cand.x, &dom.lo_x, &dom.hi_x);
        clamp(&mut cand.y, &dom.lo_x, &dom.hi_x);
        clamp(&mut cand.xb0, &dom.lo_xb, &dom.hi_xb);
        clamp(&mut cand.xb1, &dom.lo_xb, &dom.hi_xb);
        let val = objective(&cand);
        let accept = val > cur_val || {
            let d = (val - cur_val) / temp.max(1e-12);
            d.exp() > rng.gen_range(0.0..1.0)
        };
        if accept && val.is_finite() {
            current = cand;
            cur_val = val;
            if val > best_val {
                best_val = val;
                best = current.clone();
            }
        }
    }
    Ok((best, best_val))
}

/// Regression fixtures: configurations frozen from seeded searches.
pub mod fixtures {
    use super::ViolationWitness;

    /// Sliding-mountain violation on the Poincaré-disk squared-distance
    /// cost: a mirror-symmetric configuration (violation ≈ 0.446 on a
    /// 33-sample scan) kept as the regression witness. The seeded
    /// `search_sliding_violation` finds larger, less interpretable ones.
    pub fn hyperbolic_sliding_witness() -> ViolationWitness {
        ViolationWitness {
            x: vec![-0.32, 0.0],
            xb0: vec![0.1, -0.45],
            xb1: vec![0.1, 0.45],
            y: vec![0.52, 0.0],
        }
    }
}

/// Uniform tensor grid over the source-side box of a domain.
pub fn source_grid(chart: &CostChart, per_axis: usize) -> Vec<Vec<f64>> {
    let n = chart.n();
    let mut pts: Vec<Vec<f64>> = vec![vec![]];
    for k in 0..n {
        let lo = chart.domain.lo_x[k];
        let hi = chart.domain.hi_x[k];
        let mut next = Vec::new();
        for p in &pts {
            for j in 0..per_axis {
                let frac = (j as f64 + 0.5) / per_axis as f64;
                let mut q = p.clone();
                q.push(lo + frac * (hi - lo));
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn euclid_classifies_a3w() {
        let chart = CostChart::euclid_quadratic(2).unwrap();
        let r = classify_regularity(&chart, 6, 4, 1e-9, 7).unwrap();
        assert_eq!(r.classification, Classification::A3w);
        assert!(r.min_normalized.abs() < 1e-10);
    }

    #[test]
    fn euclid_via_fd_vanishes() {
        let chart = CostChart::euclid_quadratic(2).unwrap();
        let v = cross_curvature_via_fd(
            &chart,
            &[0.0, 0.0],
            &[0.2, 0.1],
            &[1.0, 0.0],
            &[0.0, 1.0],
            0.05,
            &NewtonConfig::default(),
        )
        .unwrap();
        assert!(v.abs() < 1e-8);
    }

    #[test]
    fn one_dim_via_fd_matches_tensor_route() {
        let chart = CostChart::one_dim_family(1.0, false).unwrap();
        let v = cross_curvature_via_fd(
            &chart,
            &[0.0],
            &[0.0],
            &[1.0],
            &[1.0],
            0.05,
            &NewtonConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-4);
    }

    #[test]
    fn euclid_sliding_violation_nonpositive() {
        let chart = CostChart::euclid_quadratic(2).unwrap();
        let ys = source_grid(&chart, 6);
        let scan = sliding_mountain_check(
            &chart,
            &[0.0, 0.0],
            &[-0.5, 0.2],
            &[0.5, -0.1],
            &ys,
            9,
            &NewtonConfig::default(),
        )
        .unwrap();
        assert!(scan.max_violation <= 1e-12);
        // equality is attained: f is affine in t
        assert!(scan.max_violation >= -1e-12);
    }

    #[test]
    fn euclid_law_of_cosines_flat() {
        let chart = CostChart::euclid_quadratic(2).unwrap();
        let fit = law_of_cosines_fit(
            &chart,
            &[0.0, 0.0],
            std::f64::consts::FRAC_PI_2,
            0.2,
            4,
            &NewtonConfig::default(),
        )
        .unwrap();
        assert!(fit.k.abs() < 1e-6);
    }

    #[test]
    fn euclid_constants_degenerate_but_inequality_holds() {
        let chart = CostChart::euclid_quadratic(2).unwrap();
        let consts = estimate_constants(&chart, 6, 4, 3).unwrap();
        assert!(consts.c0.abs() < 1e-9);
        let deficit = local_estimate_check(
            &chart,
            &[0.0, 0.0],
            &[-0.4, 0.1],
            &[0.5, -0.2],
            &consts,
            0.2,
            5,
            9,
            &NewtonConfig::default(),
        )
        .unwrap();
        assert!(deficit <= 1e-10);
    }
}
