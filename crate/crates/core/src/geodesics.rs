//! Cost exponentials by damped Newton inversion, vertical c-segments and
//! horizontal reflected-cost segments, and geodesic-equation residuals.

use nalgebra::{DMatrix, DVector};

use crate::cost::{check_point, CostChart, Covector, MultiIndex, Side};
use crate::error::{Error, Result};

/// Newton solve configuration.
#[derive(Clone, Copy, Debug)]
pub struct NewtonConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub backtrack: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tol: 1e-10,
            max_iter: 50,
            backtrack: 0.5,
        }
    }
}

/// A vertical geodesic `t ↦ (x, x̄(t))` stored as cotangent endpoints plus
/// sampled points. Each sample solves `(1−t)p*₀ + t p*₁ = −Dc(x, x̄(t))`
/// within Newton tolerance.
#[derive(Clone, Debug)]
pub struct CSegment {
    pub x: Vec<f64>,
    pub xb0: Vec<f64>,
    pub xb1: Vec<f64>,
    pub pstar0: DVector<f64>,
    pub pstar1: DVector<f64>,
    pub samples: Vec<(f64, Vec<f64>)>,
}

impl CSegment {
    /// Sampled target point at parameter index `k`.
    pub fn point(&self, k: usize) -> &[f64] {
        &self.samples[k].1
    }
}

fn newton_solve(
    chart: &CostChart,
    fixed: &[f64],
    fixed_side: Side,
    target_covector: &DVector<f64>,
    guess: &[f64],
    cfg: &NewtonConfig,
) -> Result<Vec<f64>> {
    let n = chart.n();
    let residual = |y: &[f64]| -> Result<DVector<f64>> {
        let g = match fixed_side {
            Side::Source => chart.grad_x(fixed, y)?,
            Side::Target => chart.grad_xb(y, fixed)?,
        };
        Ok(g + target_covector)
    };
    let jacobian = |y: &[f64]| -> Result<DMatrix<f64>> {
        match fixed_side {
            // ∂/∂x̄^j of c_i(x, x̄) = c_{ij̄}
            Side::Source => chart.cross_matrix(fixed, y),
            // ∂/∂x^j of c_ī(x, x̄) = c_{jī}
            Side::Target => Ok(chart.cross_matrix(y, fixed)?.transpose()),
        }
    };
    let mut y = guess.to_vec();
    let mut f = residual(&y)?;
    let mut fnorm = f.norm();
    for _ in 0..cfg.max_iter {
        if fnorm <= cfg.tol {
            return Ok(y);
        }
        let j = jacobian(&y)?;
        let delta = j
            .lu()
            .solve(&(-&f))
            .ok_or_else(|| Error::SingularJacobian { at: y.clone() })?;
        // damped step: backtrack on the residual norm
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<f64> = (0..n).map(|k| y[k] + alpha * delta[k]).collect();
            if chart.in_domain(match fixed_side {
                Side::Source => fixed,
                Side::Target => &cand,
            }, match fixed_side {
                Side::Source => &cand,
                Side::Target => fixed,
            }) {
                let fc = residual(&cand)?;
                if fc.norm() < fnorm {
                    y = cand;
                    f = fc;
                    fnorm = f.norm();
                    accepted = true;
                    break;
                }
            }
            alpha *= cfg.backtrack;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                iters: cfg.max_iter,
                residual: fnorm,
                at: y,
            });
        }
    }
    if fnorm <= cfg.tol {
        Ok(y)
    } else {
        Err(Error::NoConvergence {
            iters: cfg.max_iter,
            residual: fnorm,
            at: y,
        })
    }
}

/// The c-exponential at `x`: the target point `x̄` with `−Dc(x, x̄) = p*`,
/// found as the Newton basin limit from `guess` (a single-valued local
/// branch).
pub fn c_exp(
    chart: &CostChart,
    x: &[f64],
    pstar: &Covector,
    guess: &[f64],
    cfg: &NewtonConfig,
) -> Result<Vec<f64>> {
    let n = chart.n();
    check_point(x, n)?;
    check_point(guess, n)?;
    if pstar.side != Side::Source {
        return Err(Error::InvalidParameter(
            "c_exp takes a source-side covector".into(),
        ));
    }
    if !chart.in_domain(x, guess) {
        return Err(Error::OutOfDomain);
    }
    newton_solve(chart, x, Side::Source, &pstar.comps, guess, cfg)
}

/// The reflected-cost exponential at `x̄`: the source point `x` with
/// `−D̄c(x, x̄) = q*`.
pub fn c_star_exp(
    chart: &CostChart,
    xb: &[f64],
    qstar: &Covector,
    guess: &[f64],
    cfg: &NewtonConfig,
) -> Result<Vec<f64>> {
    let n = chart.n();
    check_point(xb, n)?;
    check_point(guess, n)?;
    if qstar.side != Side::Target {
        return Err(Error::InvalidParameter(
            "c_star_exp takes a target-side covector".into(),
        ));
    }
    if !chart.in_domain(guess, xb) {
        return Err(Error::OutOfDomain);
    }
    newton_solve(chart, xb, Side::Target, &qstar.comps, guess, cfg)
}

/// Vertical geodesic through `(x, x̄₀)` and `(x, x̄₁)`: linear interpolation
/// of the cotangent endpoints, inverted by continuation (each sample seeds
/// the next Newton solve).
pub fn c_segment(
    chart: &CostChart,
    x: &[f64],
    xb0: &[f64],
    xb1: &[f64],
    num_samples: usize,
    cfg: &NewtonConfig,
) -> Result<CSegment> {
    let n = chart.n();
    check_point(x, n)?;
    if num_samples < 2 {
        return Err(Error::TooFewSamples {
            need: 2,
            got: num_samples,
        });
    }
    if !chart.in_domain(x, xb0) || !chart.in_domain(x, xb1) {
        return Err(Error::OutOfDomain);
    }
    let p0 = -chart.grad_x(x, xb0)?;
    let p1 = -chart.grad_x(x, xb1)?;
    let mut samples = Vec::with_capacity(num_samples);
    let mut guess = xb0.to_vec();
    for k in 0..num_samples {
        let t = k as f64 / (num_samples - 1) as f64;
        let pt = Covector::source(&p0 * (1.0 - t) + &p1 * t);
        let xb = c_exp(chart, x, &pt, &guess, cfg).map_err(|e| Error::SegmentFailure {
            t,
            source: Box::new(e),
        })?;
        guess = xb.clone();
        samples.push((t, xb));
    }
    // endpoints must be reproduced by the two Newton limits
    let end_err = samples
        .last()
        .map(|(_, xb)| {
            xb.iter()
                .zip(xb1)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .unwrap();
    if end_err > 1e-6 {
        return Err(Error::SegmentFailure {
            t: 1.0,
            source: Box::new(Error::NoConvergence {
                iters: cfg.max_iter,
                residual: end_err,
                at: samples.last().unwrap().1.clone(),
            }),
        });
    }
    Ok(CSegment {
        x: x.to_vec(),
        xb0: xb0.to_vec(),
        xb1: xb1.to_vec(),
        pstar0: p0,
        pstar1: p1,
        samples,
    })
}

/// Max norm over interior samples of the vertical geodesic equation
/// `ẍ^m̄ + c^{m̄i} c_{ij̄k̄} ẋ^j̄ ẋ^k̄`, with derivatives by central
/// differences on the sample grid.
pub fn geodesic_residual(chart: &CostChart, seg: &CSegment) -> Result<f64> {
    let n = chart.n();
    let m = seg.samples.len();
    if m < 5 {
        return Err(Error::TooFewSamples { need: 5, got: m });
    }
    let dt = seg.samples[1].0 - seg.samples[0].0;
    let mut worst: f64 = 0.0;
    for k in 1..m - 1 {
        let prev = &seg.samples[k - 1].1;
        let here = &seg.samples[k].1;
        let next = &seg.samples[k + 1].1;
        let vel: Vec<f64> = (0..n).map(|i| (next[i] - prev[i]) / (2.0 * dt)).collect();
        let acc: Vec<f64> = (0..n)
            .map(|i| (next[i] - 2.0 * here[i] + prev[i]) / (dt * dt))
            .collect();
        let ch = chart.cross_hessian(&seg.x, here)?;
        let mut res2 = 0.0;
        for mm in 0..n {
            let mut gamma = 0.0;
            for i in 0..n {
                for j in 0..n {
                    for kk in 0..n {
                        // c^{m̄ i} c_{i j̄ k̄} ẋ^j̄ ẋ^k̄
                        let c3 = chart.mixed_partial(
                            &seg.x,
                            here,
                            &MultiIndex::new(vec![i], vec![j, kk], n)?,
                        )?;
                        gamma += ch.a_inv[(mm, i)] * c3 * vel[j] * vel[kk];
                    }
                }
            }
            let r = acc[mm] + gamma;
            res2 += r * r;
        }
        worst = worst.max(res2.sqrt());
    }
    Ok(worst)
}

/// Horizontal geodesic `s ↦ (x(s), x̄)` with `x(0) = x`, `ẋ(0) = p`,
/// built from the reflected-cost segment `r*(s) = −D̄c(x, x̄) − s·(D̄Dc)p`
/// and inverted by continuation.
pub fn horizontal_geodesic(
    chart: &CostChart,
    x: &[f64],
    xb: &[f64],
    p: &[f64],
    s_grid: &[f64],
    cfg: &NewtonConfig,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = chart.n();
    check_point(x, n)?;
    check_point(xb, n)?;
    if !chart.in_domain(x, xb) {
        return Err(Error::OutOfDomain);
    }
    let r0 = -chart.grad_xb(x, xb)?;
    // ṙ*_ī = −c_{jī} ẋ^j: the cross-Hessian transpose applied to p
    let a = chart.cross_matrix(x, xb)?;
    let pv = DVector::from_column_slice(p);
    let rdot = -(a.transpose() * pv);
    let mut out = Vec::with_capacity(s_grid.len());
    let mut guess = x.to_vec();
    for &s in s_grid {
        let rs = Covector::target(&r0 + &rdot * s);
        let xs = c_star_exp(chart, xb, &rs, &guess, cfg).map_err(|e| Error::SegmentFailure {
            t: s,
            source: Box::new(e),
        })?;
        guess = xs.clone();
        out.push((s, xs));
    }
    Ok(out)
}
