//! Built-in cost constructions: flat quadratic, logarithmic (reflector),
//! squared geodesic distance on the round sphere and the Poincaré disk, the
//! one-dimensional exponential family, convex graph boundaries, tensor
//! products, and user black-box costs.

use std::f64::consts::PI;
use std::sync::Arc;

use once_cell::sync::Lazy;

use super::{CostChart, CostFunction, DerivMode, DomainSpec, MultiIndex};
use crate::dual::{DiffScalar, D4};
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// series for squared geodesic distance near coincidence
//
// On constant-curvature models the half squared distance is an analytic
// function of u = 1 − cos d (sphere) or v = cosh d − 1 (hyperbolic):
//   d²/2 = Σ_{k≥1} a_k u^k,      a_1 = 1,  a_{k+1} = a_k · k² / ((k+1)(2k+1))
//   d²/2 = Σ_{k≥1} (−1)^{k+1} a_k v^k
// The closed forms ½·acos(1−u)² and ½·acosh(1+v)² have a square-root branch
// point at u = 0 (v = 0), so the series takes over below u = 1/2 where it
// converges at rate (u/2)^k.

const SQ_DIST_TERMS: usize = 40;

static SQ_DIST_COEFFS: Lazy<[f64; SQ_DIST_TERMS]> = Lazy::new(|| {
    let mut a = [0.0; SQ_DIST_TERMS];
    a[0] = 1.0;
    for k in 1..SQ_DIST_TERMS {
        let kf = k as f64;
        a[k] = a[k - 1] * kf * kf / ((kf + 1.0) * (2.0 * kf + 1.0));
    }
    a
});

/// Half squared sphere distance from u = 1 − cos d.
fn half_dsq_from_versine<S: DiffScalar>(u: S) -> S {
    if u.re() < 0.5 {
        let coeffs = &*SQ_DIST_COEFFS;
        let mut acc = S::from_f64(coeffs[SQ_DIST_TERMS - 1]);
        for k in (0..SQ_DIST_TERMS - 1).rev() {
            acc = acc * u + S::from_f64(coeffs[k]);
        }
        acc * u
    } else {
        let d = (S::from_f64(1.0) - u).acos();
        d * d * S::from_f64(0.5)
    }
}

/// Half squared hyperbolic distance from v = cosh d − 1.
fn half_dsq_from_hyperbolic_versine<S: DiffScalar>(v: S) -> S {
    if v.re() < 0.5 {
        let coeffs = &*SQ_DIST_COEFFS;
        let mut acc = S::from_f64(sign_k(SQ_DIST_TERMS - 1) * coeffs[SQ_DIST_TERMS - 1]);
        for k in (0..SQ_DIST_TERMS - 1).rev() {
            acc = acc * v + S::from_f64(sign_k(k) * coeffs[k]);
        }
        acc * v
    } else {
        let d = (S::from_f64(1.0) + v).acosh();
        d * d * S::from_f64(0.5)
    }
}

fn sign_k(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

// ---------------------------------------------------------------------------
// euclid_quadratic: c(x, x̄) = |x − x̄|²/2

struct EuclidQuadratic {
    n: usize,
}

fn euclid_eval<S: DiffScalar>(x: &[S], xb: &[S]) -> S {
    let mut s = S::from_f64(0.0);
    for (a, b) in x.iter().zip(xb) {
        let d = *a - *b;
        s = s + d * d;
    }
    s * S::from_f64(0.5)
}

impl CostFunction for EuclidQuadratic {
    fn dim(&self) -> usize {
        self.n
    }
    fn kind_name(&self) -> &'static str {
        "euclid_quadratic"
    }
    fn eval_f64(&self, x: &[f64], xb: &[f64]) -> f64 {
        euclid_eval(x, xb)
    }
    fn eval_d4(&self, x: &[D4], xb: &[D4]) -> Option<D4> {
        Some(euclid_eval(x, xb))
    }
    fn partial_closed(&self, x: &[f64], xb: &[f64], idx: &MultiIndex) -> Option<f64> {
        let val = match idx.order() {
            0 => euclid_eval(x, xb),
            1 => {
                if let [i] = idx.unbarred() {
                    x[*i] - xb[*i]
                } else {
                    let j = idx.barred()[0];
                    xb[j] - x[j]
                }
            }
            2 => {
                let (i, j, cross) = match (idx.unbarred(), idx.barred()) {
                    ([i, j], []) => (*i, *j, false),
                    ([], [i, j]) => (*i, *j, false),
                    ([i], [j]) => (*i, *j, true),
                    _ => unreachable!(),
                };
                if i != j {
                    0.0
                } else if cross {
                    -1.0
                } else {
                    1.0
                }
            }
            _ => 0.0,
        };
        Some(val)
    }
}

// ---------------------------------------------------------------------------
// log_euclid: c(x, x̄) = −log|x − x̄|, the reflector-antenna cost

struct LogEuclid {
    n: usize,
}

fn log_euclid_eval<S: DiffScalar>(x: &[S], xb: &[S]) -> S {
    let mut s = S::from_f64(0.0);
    for (a, b) in x.iter().zip(xb) {
        let d = *a - *b;
        s = s + d * d;
    }
    -(s.ln() * S::from_f64(0.5))
}

impl CostFunction for LogEuclid {
    fn dim(&self) -> usize {
        self.n
    }
    fn kind_name(&self) -> &'static str {
        "log_euclid"
    }
    fn eval_f64(&self, x: &[f64], xb: &[f64]) -> f64 {
        log_euclid_eval(x, xb)
    }
    fn eval_d4(&self, x: &[D4], xb: &[D4]) -> Option<D4> {
        Some(log_euclid_eval(x, xb))
    }
    fn guard(&self, x: &[f64], xb: &[f64], cut: f64) -> bool {
        let d2: f64 = x.iter().zip(xb).map(|(a, b)| (a - b) * (a - b)).sum();
        d2 >= cut * cut
    }
}

// ---------------------------------------------------------------------------
// sphere_squared: c = d²/2 on the round S² in spherical coordinates (θ, φ)

struct SphereSquared {
    theta_min: f64,
}

fn sphere_eval<S: DiffScalar>(x: &[S], xb: &[S]) -> S {
    let dot = x[0].sin() * xb[0].sin() * (x[1] - xb[1]).cos() + x[0].cos() * xb[0].cos();
    half_dsq_from_versine(S::from_f64(1.0) - dot)
}

impl CostFunction for SphereSquared {
    fn dim(&self) -> usize {
        2
    }
    fn kind_name(&self) -> &'static str {
        "sphere_squared"
    }
    fn eval_f64(&self, x: &[f64], xb: &[f64]) -> f64 {
        sphere_eval(x, xb)
    }
    fn eval_d4(&self, x: &[D4], xb: &[D4]) -> Option<D4> {
        Some(sphere_eval(x, xb))
    }
    fn guard(&self, x: &[f64], xb: &[f64], cut: f64) -> bool {
        let pole_ok = |th: f64| th >= self.theta_min && th <= PI - self.theta_min;
        if !pole_ok(x[0]) || !pole_ok(xb[0]) {
            return false;
        }
        // antipodal exclusion d ≤ π − cut  ⇔  cos d ≥ −cos cut
        let dot = x[0].sin() * xb[0].sin() * (x[1] - xb[1]).cos() + x[0].cos() * xb[0].cos();
        dot >= -(cut.cos())
    }
    fn volume_density(&self, x: &[f64]) -> f64 {
        x[0].sin()
    }
}

// ---------------------------------------------------------------------------
// hyperbolic_squared: c = d²/2 on the Poincaré disk,
// d(z, w) = acosh(1 + 2|z−w|² / ((1−|z|²)(1−|w|²)))

struct HyperbolicSquared {
    n: usize,
    radius_cap: f64,
}

fn hyperbolic_eval<S: DiffScalar>(x: &[S], xb: &[S]) -> S {
    let mut d2 = S::from_f64(0.0);
    let mut rx = S::from_f64(0.0);
    let mut rw = S::from_f64(0.0);
    for (a, b) in x.iter().zip(xb) {
        let d = *a - *b;
        d2 = d2 + d * d;
        rx = rx + *a * *a;
        rw = rw + *b * *b;
    }
    let one = S::from_f64(1.0);
    let v = S::from_f64(2.0) * d2 / ((one - rx) * (one - rw));
    half_dsq_from_hyperbolic_versine(v)
}

impl CostFunction for HyperbolicSquared {
    fn dim(&self) -> usize {
        self.n
    }
    fn kind_name(&self) -> &'static str {
        "hyperbolic_squared"
    }
    fn eval_f64(&self, x: &[f64], xb: &[f64]) -> f64 {
        hyperbolic_eval(x, xb)
    }
    fn eval_d4(&self, x: &[D4], xb: &[D4]) -> Option<D4> {
        Some(hyperbolic_eval(x, xb))
    }
    fn guard(&self, x: &[f64], xb: &[f64], _cut: f64) -> bool {
        let r2 = |p: &[f64]| p.iter().map(|v| v * v).sum::<f64>();
        r2(x) <= self.radius_cap * self.radius_cap && r2(xb) <= self.radius_cap * self.radius_cap
    }
    fn volume_density(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        (2.0 / (1.0 - r2)).powi(self.n as i32)
    }
}

// ---------------------------------------------------------------------------
// one_dim_family: c(x, x̄) = ∓ ∫₀^x ∫₀^x̄ e^{±λ(s,t)} ds dt with λ = α·s·t

/// 24-point Gauss–Legendre nodes and weights on [0, 1].
pub fn gauss_legendre_01() -> &'static [(f64, f64)] {
    static NODES: Lazy<Vec<(f64, f64)>> = Lazy::new(|| {
        let n = 24usize;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            // Newton on P_n with the Chebyshev initial guess.
            let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0f64, t);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
                let dt = p1 / dp;
                t -= dt;
                if dt.abs() < 1e-15 {
                    break;
                }
            }
            let (mut p0, mut p1) = (1.0f64, t);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let w = 2.0 / ((1.0 - t * t) * dp * dp);
            out.push(((t + 1.0) / 2.0, w / 2.0));
        }
        out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        out
    });
    &NODES
}

struct OneDimFamily {
    /// λ(s, t) = alpha · s · t
    alpha: f64,
    /// false: c = −∫∫ e^{+λ};  true: c = +∫∫ e^{−λ}
    plus_branch: bool,
}

fn one_dim_eval<S: DiffScalar>(alpha: f64, plus: bool, x: S, xb: S) -> S {
    // substitute s = x·u, t = x̄·v over the unit square
    let nodes = gauss_legendre_01();
    let mut acc = S::from_f64(0.0);
    let sgn_inner = if plus { -alpha } else { alpha };
    for &(u, wu) in nodes {
        let s = x * S::from_f64(u);
        let mut inner = S::from_f64(0.0);
        for &(v, wv) in nodes {
            let t = xb * S::from_f64(v);
            inner = inner + (s * t * S::from_f64(sgn_inner)).exp() * S::from_f64(wv);
        }
        acc = acc + inner * S::from_f64(wu);
    }
    let outer = if plus { 1.0 } else { -1.0 };
    acc * x * xb * S::from_f64(outer)
}

impl CostFunction for OneDimFamily {
    fn dim(&self) -> usize {
        1
    }
    fn kind_name(&self) -> &'static str {
        "one_dim_family"
    }
    fn eval_f64(&self, x: &[f64], xb: &[f64]) -> f64 {
        one_dim_eval(self.alpha, self.plus_branch, x[0], xb[0])
    }
    fn eval_d4(&self, x: &[D4], xb: &[D4]) -> Option<D4> {
        Some(one_dim_eval(self.alpha, self.plus_branch, x[0], xb[0]))
    }
}

// ---------------------------------------------------------------------------
// convex_boundary: c = |x − x̄|²/2 on graphs (X, f(X)), (X̄, g(X̄)) over a
// shared hyperplane, with quadratic f(X) = ½XᵀPX + bᵀX and g likewise.

struct ConvexBoundary {
    n: usize,
    p: Vec<f64>,
    bp: Vec<f64>,
    q: Vec<f64>,
    bq: Vec<f64>,
}

impl ConvexBoundary {
    fn graph_value<S: DiffScalar>(mat: &[f64], lin: &[f64], n: usize, x: &[S]) -> S {
        let mut s = S::from_f64(0.0);
        for i in 0..n {
            s = s + S::from_f64(lin[i]) * x[i];
            for j in 0..n {
                s = s + S::from_f64(0.5 * mat[i * n + j]) * x[i] * x[j];
            }
        }
        s
    }

    fn graph_grad(mat: &[f64], lin: &[f64], n: usize, x: &[f64]) -> Vec<f64> {
        let mut g = lin.to_vec();
        for i in 0..n {
            for j in 0..n {
                // symmetrized quadratic form
                g[i] += 0.5 * (mat[i * n + j] + mat[j * n + i]) * x[j];
            }
        }
        g
    }

    fn eval_g<S: DiffScalar>(&self, x: &[S], xb: &[S]) -> S {
        let mut s = S::from_f64(0.0);
        for (a, b) in x.iter().zip(xb) {
            let d = *a - *b;
            s = s + d * d;
        }
        let df = Self::graph_value(&self.p, &self.bp, self.n, x)
            - Self::graph_value(&self.q, &self.bq, self.n, xb);
        (s + df * df) * S::from_f64(0.5)
    }
}

impl CostFunction for ConvexBoundary {
    fn dim(&self) -> usize {
        self.n
    }
    fn kind_name(&self) -> &'static str {
        "convex_boundary"
    }
    fn eval_f64(&self, x: &[f64], xb: &[f64]) -> f64 {
        self.eval_g(x, xb)
    }
    fn eval_d4(&self, x: &[D4], xb: &[D4]) -> Option<D4> {
        Some(self.eval_g(x, xb))
    }
    fn guard(&self, x: &[f64], xb: &[f64], cut: f64) -> bool {
        // non-degeneracy requires the graph normals to stay transversal:
        // 1 + ∇f·∇g bounded away from zero
        let gf = Self::graph_grad(&self.p, &self.bp, self.n, x);
        let gg = Self::graph_grad(&self.q, &self.bq, self.n, xb);
        let dot: f64 = gf.iter().zip(&gg).map(|(a, b)| a * b).sum();
        1.0 + dot >= cut
    }
}

// ---------------------------------------------------------------------------
// product of two cost charts on split coordinates

struct ProductCost {
    a: CostChart,
    b: CostChart,
}

impl CostFunction for ProductCost {
    fn dim(&self) -> usize {
        self.a.n() + self.b.n()
    }
    fn kind_name(&self) -> &'static str {
        "product"
    }
    fn eval_f64(&self, x: &[f64], xb: &[f64]) -> f64 {
        let na = self.a.n();
        self.a.func.eval_f64(&x[..na], &xb[..na]) + self.b.func.eval_f64(&x[na..], &xb[na..])
    }
    fn eval_d4(&self, x: &[D4], xb: &[D4]) -> Option<D4> {
        let na = self.a.n();
        let va = self.a.func.eval_d4(&x[..na], &xb[..na])?;
        let vb = self.b.func.eval_d4(&x[na..], &xb[na..])?;
        Some(va + vb)
    }
    fn guard(&self, x: &[f64], xb: &[f64], _cut: f64) -> bool {
        let na = self.a.n();
        self.a.in_domain(&x[..na], &xb[..na]) && self.b.in_domain(&x[na..], &xb[na..])
    }
    fn volume_density(&self, x: &[f64]) -> f64 {
        let na = self.a.n();
        self.a.volume_density(&x[..na]) * self.b.volume_density(&x[na..])
    }
}

// ---------------------------------------------------------------------------
// user black-box cost, differentiated by finite differences

/// A user-supplied cost evaluated as a black box; derivatives come from
/// central differences with one Richardson step.
pub struct BlackBoxCost {
    pub n: usize,
    pub f: Box<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>,
    pub guard: Option<Box<dyn Fn(&[f64], &[f64], f64) -> bool + Send + Sync>>,
}

impl CostFunction for BlackBoxCost {
    fn dim(&self) -> usize {
        self.n
    }
    fn kind_name(&self) -> &'static str {
        "black_box"
    }
    fn eval_f64(&self, x: &[f64], xb: &[f64]) -> f64 {
        (self.f)(x, xb)
    }
    fn eval_d4(&self, _x: &[D4], _xb: &[D4]) -> Option<D4> {
        None
    }
    fn guard(&self, x: &[f64], xb: &[f64], cut: f64) -> bool {
        self.guard.as_ref().map_or(true, |g| g(x, xb, cut))
    }
}

// ---------------------------------------------------------------------------
// constructors

impl CostChart {
    pub fn euclid_quadratic(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let dom = DomainSpec::symmetric(&vec![(-1.0, 1.0); n], 0.0);
        Ok(CostChart::from_parts(
            Arc::new(EuclidQuadratic { n }),
            dom,
            DerivMode::Analytic,
        ))
    }

    pub fn log_euclid(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let x = vec![(-1.0, 1.0); n];
        let mut xb = vec![(-1.0, 1.0); n];
        xb[0] = (2.0, 4.0);
        let dom = DomainSpec::two_sided(&x, &xb, 0.5);
        Ok(CostChart::from_parts(
            Arc::new(LogEuclid { n }),
            dom,
            DerivMode::DualNumber,
        ))
    }

    pub fn sphere_squared() -> Result<Self> {
        let theta_min = 0.15;
        // φ is periodic; the box leaves a full period of slack on each side
        // so Newton continuation can cross the seam
        let dom = DomainSpec::symmetric(&[(theta_min, PI - theta_min), (-2.0 * PI, 4.0 * PI)], 0.1);
        Ok(CostChart::from_parts(
            Arc::new(SphereSquared { theta_min }),
            dom,
            DerivMode::DualNumber,
        ))
    }

    pub fn hyperbolic_squared(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let half = 0.65;
        let dom = DomainSpec::symmetric(&vec![(-half, half); n], 0.0);
        Ok(CostChart::from_parts(
            Arc::new(HyperbolicSquared {
                n,
                radius_cap: 0.95,
            }),
            dom,
            DerivMode::DualNumber,
        ))
    }

    pub fn one_dim_family(alpha: f64, plus_branch: bool) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        let dom = DomainSpec::symmetric(&[(-1.0, 1.0)], 0.0);
        Ok(CostChart::from_parts(
            Arc::new(OneDimFamily {
                alpha,
                plus_branch,
            }),
            dom,
            DerivMode::DualNumber,
        ))
    }

    /// Quadratic graph functions f(X) = ½XᵀPX + bᵀX over the shared
    /// hyperplane; `p`, `q` are row-major n×n.
    pub fn convex_boundary(n: usize, p: Vec<f64>, bp: Vec<f64>, q: Vec<f64>, bq: Vec<f64>) -> Result<Self> {
        if n < 1 || p.len() != n * n || q.len() != n * n || bp.len() != n || bq.len() != n {
            return Err(Error::InvalidParameter(
                "convex_boundary needs n×n Hessians and length-n linear parts".into(),
            ));
        }
        let dom = DomainSpec::symmetric(&vec![(-0.5, 0.5); n], 0.05);
        Ok(CostChart::from_parts(
            Arc::new(ConvexBoundary { n, p, bp, q, bq }),
            dom,
            DerivMode::DualNumber,
        ))
    }

    /// Tensor product on split coordinates: dimension n₊+n₋, cost c₊ + c₋,
    /// domain the conjunction of the factors'.
    pub fn product(a: CostChart, b: CostChart) -> Self {
        let dom = DomainSpec {
            lo_x: [a.domain.lo_x.clone(), b.domain.lo_x.clone()].concat(),
            hi_x: [a.domain.hi_x.clone(), b.domain.hi_x.clone()].concat(),
            lo_xb: [a.domain.lo_xb.clone(), b.domain.lo_xb.clone()].concat(),
            hi_xb: [a.domain.hi_xb.clone(), b.domain.hi_xb.clone()].concat(),
            cut_margin: a.domain.cut_margin.max(b.domain.cut_margin),
        };
        let mode = match (a.mode, b.mode) {
            (DerivMode::FiniteDifference, _) | (_, DerivMode::FiniteDifference) => {
                DerivMode::FiniteDifference
            }
            _ => DerivMode::DualNumber,
        };
        CostChart::from_parts(Arc::new(ProductCost { a, b }), dom, mode)
    }

    pub fn black_box(func: BlackBoxCost, domain: DomainSpec) -> Self {
        CostChart::from_parts(Arc::new(func), domain, DerivMode::FiniteDifference)
    }
}

pub(super) fn make_from_kind(
    kind: &str,
    n: usize,
    params: &serde_json::Value,
) -> Result<CostChart> {
    let get_f64 = |key: &str, default: f64| -> f64 {
        params.get(key).and_then(|v| v.as_f64()).unwrap_or(default)
    };
    match kind {
        "euclid_quadratic" => CostChart::euclid_quadratic(n),
        "log_euclid" => CostChart::log_euclid(n),
        "sphere_squared" => {
            if n != 2 {
                return Err(Error::InvalidParameter(
                    "sphere_squared uses the (θ, φ) chart and requires n = 2".into(),
                ));
            }
            CostChart::sphere_squared()
        }
        "hyperbolic_squared" => CostChart::hyperbolic_squared(n),
        "one_dim_family" => {
            if n != 1 {
                return Err(Error::InvalidParameter("one_dim_family requires n = 1".into()));
            }
            CostChart::one_dim_family(
                get_f64("alpha", 1.0),
                params
                    .get("branch")
                    .and_then(|v| v.as_str())
                    .map_or(false, |s| s == "plus"),
            )
        }
        "convex_boundary" => {
            let mat = |key: &str| -> Vec<f64> {
                params
                    .get(key)
                    .and_then(|v| v.as_array())
                    .map(|rows| {
                        rows.iter()
                            .flat_map(|r| {
                                r.as_array()
                                    .map(|cols| {
                                        cols.iter().filter_map(|c| c.as_f64()).collect::<Vec<_>>()
                                    })
                                    .unwrap_or_default()
                            })
                            .collect()
                    })
                    .unwrap_or_else(|| identity_flat(n))
            };
            let lin = |key: &str| -> Vec<f64> {
                params
                    .get(key)
                    .and_then(|v| v.as_array())
                    .map(|a| a.iter().filter_map(|c| c.as_f64()).collect())
                    .unwrap_or_else(|| vec![0.0; n])
            };
            CostChart::convex_boundary(n, mat("f_hessian"), lin("f_grad"), mat("g_hessian"), lin("g_grad"))
        }
        other => Err(Error::UnknownKind(other.to_string())),
    }
}

fn identity_flat(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// Random in-domain pair sampler over the chart's working box.
pub fn sample_pair<R: rand::Rng>(chart: &CostChart, rng: &mut R) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = chart.n();
    for _ in 0..200 {
        let x: Vec<f64> = (0..n)
            .map(|k| rng.gen_range(chart.domain.lo_x[k]..=chart.domain.hi_x[k]))
            .collect();
        let xb: Vec<f64> = (0..n)
            .map(|k| rng.gen_range(chart.domain.lo_xb[k]..=chart.domain.hi_xb[k]))
            .collect();
        if chart.in_domain(&x, &xb) {
            return Some((x, xb));
        }
    }
    None
}
