//! Cost charts: a transportation cost on a pair of coordinate charts together
//! with a mixed-partial-derivative oracle up to total order 4 and a domain
//! predicate that excludes the cost's singular set.

mod builtins;
mod spec;

pub use builtins::{gauss_legendre_01, sample_pair, BlackBoxCost};
pub use spec::{CostSpec, DomainSpecJson};

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::dual::{d4_coeff, d4_seeded, D4};
use crate::error::{Error, Result};

/// Which factor of the product `M × M̄` an index or vector refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Unbarred: the source chart `M`.
    Source,
    /// Barred: the target chart `M̄`.
    Target,
}

/// A tangent vector attached to one side of the product.
#[derive(Clone, Debug)]
pub struct TangentVector {
    pub side: Side,
    pub comps: DVector<f64>,
}

/// A cotangent vector attached to one side of the product. Covectors pair
/// with vectors of the same side only.
#[derive(Clone, Debug)]
pub struct Covector {
    pub side: Side,
    pub comps: DVector<f64>,
}

impl Covector {
    pub fn source(comps: DVector<f64>) -> Self {
        Covector {
            side: Side::Source,
            comps,
        }
    }
    pub fn target(comps: DVector<f64>) -> Self {
        Covector {
            side: Side::Target,
            comps,
        }
    }
}

/// A mixed-partial index: some unbarred (source-side) coordinate indices and
/// some barred (target-side) ones, total order at most 4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIndex {
    unbarred: Vec<usize>,
    barred: Vec<usize>,
}

impl MultiIndex {
    pub fn new(unbarred: Vec<usize>, barred: Vec<usize>, n: usize) -> Result<Self> {
        let order = unbarred.len() + barred.len();
        if order > 4 {
            return Err(Error::OrderTooHigh(order));
        }
        if unbarred.iter().chain(barred.iter()).any(|&k| k >= n) {
            return Err(Error::InvalidParameter(format!(
                "index out of range for dimension {n}"
            )));
        }
        Ok(MultiIndex { unbarred, barred })
    }

    pub fn order(&self) -> usize {
        self.unbarred.len() + self.barred.len()
    }

    pub fn unbarred(&self) -> &[usize] {
        &self.unbarred
    }

    pub fn barred(&self) -> &[usize] {
        &self.barred
    }
}

/// Working box per side plus an exclusion margin around the cost's singular
/// set (antipodes for the sphere, the diagonal for the logarithmic cost).
#[derive(Clone, Debug)]
pub struct DomainSpec {
    pub lo_x: Vec<f64>,
    pub hi_x: Vec<f64>,
    pub lo_xb: Vec<f64>,
    pub hi_xb: Vec<f64>,
    pub cut_margin: f64,
}

impl DomainSpec {
    /// Same box on both sides.
    pub fn symmetric(bounds: &[(f64, f64)], cut_margin: f64) -> Self {
        let lo: Vec<f64> = bounds.iter().map(|b| b.0).collect();
        let hi: Vec<f64> = bounds.iter().map(|b| b.1).collect();
        DomainSpec {
            lo_x: lo.clone(),
            hi_x: hi.clone(),
            lo_xb: lo,
            hi_xb: hi,
            cut_margin,
        }
    }

    pub fn two_sided(x: &[(f64, f64)], xb: &[(f64, f64)], cut_margin: f64) -> Self {
        DomainSpec {
            lo_x: x.iter().map(|b| b.0).collect(),
            hi_x: x.iter().map(|b| b.1).collect(),
            lo_xb: xb.iter().map(|b| b.0).collect(),
            hi_xb: xb.iter().map(|b| b.1).collect(),
            cut_margin,
        }
    }

    pub fn contains(&self, x: &[f64], xb: &[f64]) -> bool {
        x.len() == self.lo_x.len()
            && xb.len() == self.lo_xb.len()
            && x.iter()
                .zip(self.lo_x.iter().zip(&self.hi_x))
                .all(|(&v, (&lo, &hi))| v.is_finite() && v >= lo && v <= hi)
            && xb
                .iter()
                .zip(self.lo_xb.iter().zip(&self.hi_xb))
                .all(|(&v, (&lo, &hi))| v.is_finite() && v >= lo && v <= hi)
    }
}

/// How derivatives of a chart are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivMode {
    /// Closed-form partials supplied by the cost itself.
    Analytic,
    /// Nested first-order dual numbers (exact to machine precision of the
    /// composition).
    DualNumber,
    /// Central differences with one Richardson step, for black-box costs.
    FiniteDifference,
}

/// Sampled bounds for the cost's C², C³ and C⁴ norms over a box.
#[derive(Clone, Copy, Debug)]
pub struct NormHints {
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

/// The raw cost function behind a chart. Implementations must be pure and
/// reentrant: charts are shared read-only across parallel workers.
pub trait CostFunction: Send + Sync {
    fn dim(&self) -> usize;

    fn kind_name(&self) -> &'static str;

    fn eval_f64(&self, x: &[f64], xb: &[f64]) -> f64;

    /// Dual-number evaluation; `None` means the cost has no generic scalar
    /// path and derivatives fall back to finite differences.
    fn eval_d4(&self, x: &[D4], xb: &[D4]) -> Option<D4>;

    /// Closed-form partial derivative if the cost supplies one.
    fn partial_closed(&self, _x: &[f64], _xb: &[f64], _idx: &MultiIndex) -> Option<f64> {
        None
    }

    /// Singular-set exclusion beyond the working box.
    fn guard(&self, _x: &[f64], _xb: &[f64], _cut_margin: f64) -> bool {
        true
    }

    /// Riemannian volume density of the source chart at `x`, used as the
    /// quadrature weight factor. Identity for costs without a metric.
    fn volume_density(&self, _x: &[f64]) -> f64 {
        1.0
    }
}

/// A cost function on a pair of coordinate charts with derivative oracle and
/// domain predicate.
#[derive(Clone)]
pub struct CostChart {
    n: usize,
    func: Arc<dyn CostFunction>,
    pub domain: DomainSpec,
    pub mode: DerivMode,
    pub norm_hints: Option<NormHints>,
    /// Condition-number cap for the non-degeneracy check.
    pub cond_cap: f64,
}

/// Cross-Hessian `c_{ij̄}` together with its inverse `c^{j̄k}` and condition
/// number.
#[derive(Clone, Debug)]
pub struct CrossHessian {
    /// `a[(i, j)] = c_{i j̄}`.
    pub a: DMatrix<f64>,
    /// `a_inv[(j, k)] = c^{j̄ k}`, i.e. `a * a_inv = I`.
    pub a_inv: DMatrix<f64>,
    pub condition: f64,
}

impl CostChart {
    pub(crate) fn from_parts(
        func: Arc<dyn CostFunction>,
        domain: DomainSpec,
        mode: DerivMode,
    ) -> Self {
        let n = func.dim();
        CostChart {
            n,
            func,
            domain,
            mode,
            norm_hints: None,
            cond_cap: 1e8,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &'static str {
        self.func.kind_name()
    }

    pub fn with_domain(mut self, domain: DomainSpec) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_cond_cap(mut self, cap: f64) -> Self {
        self.cond_cap = cap;
        self
    }

    pub fn in_domain(&self, x: &[f64], xb: &[f64]) -> bool {
        self.domain.contains(x, xb) && self.func.guard(x, xb, self.domain.cut_margin)
    }

    fn check_domain(&self, x: &[f64], xb: &[f64]) -> Result<()> {
        if x.len() != self.n || xb.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len().max(xb.len()),
            });
        }
        if !self.in_domain(x, xb) {
            return Err(Error::OutOfDomain);
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64], xb: &[f64]) -> Result<f64> {
        self.check_domain(x, xb)?;
        Ok(self.func.eval_f64(x, xb))
    }

    pub fn volume_density(&self, x: &[f64]) -> f64 {
        self.func.volume_density(x)
    }

    /// The requested mixed partial derivative of the cost at `(x, x̄)`.
    pub fn mixed_partial(&self, x: &[f64], xb: &[f64], idx: &MultiIndex) -> Result<f64> {
        self.check_domain(x, xb)?;
        if idx.order() == 0 {
            return Ok(self.func.eval_f64(x, xb));
        }
        match self.mode {
            DerivMode::Analytic => self
                .func
                .partial_closed(x, xb, idx)
                .ok_or_else(|| Error::InvalidParameter("missing closed-form partial".into())),
            DerivMode::DualNumber => Ok(self.mixed_partial_dual(x, xb, idx)),
            DerivMode::FiniteDifference => self.mixed_partial_fd(x, xb, idx),
        }
    }

    fn mixed_partial_dual(&self, x: &[f64], xb: &[f64], idx: &MultiIndex) -> f64 {
        let order = idx.order();
        let mut seeds_x = vec![[false; 4]; self.n];
        let mut seeds_xb = vec![[false; 4]; self.n];
        for (level, &k) in idx.unbarred().iter().enumerate() {
            seeds_x[k][level] = true;
        }
        let off = idx.unbarred().len();
        for (j, &k) in idx.barred().iter().enumerate() {
            seeds_xb[k][off + j] = true;
        }
        let xd: Vec<D4> = x
            .iter()
            .zip(&seeds_x)
            .map(|(&v, &s)| d4_seeded(v, s))
            .collect();
        let xbd: Vec<D4> = xb
            .iter()
            .zip(&seeds_xb)
            .map(|(&v, &s)| d4_seeded(v, s))
            .collect();
        let out = self
            .func
            .eval_d4(&xd, &xbd)
            .expect("dual-number mode requires a generic scalar path");
        d4_coeff(&out, order)
    }

    fn mixed_partial_fd(&self, x: &[f64], xb: &[f64], idx: &MultiIndex) -> Result<f64> {
        let order = idx.order();
        // Multiplicity of each coordinate in the index.
        let mut coords: Vec<(Side, usize, u32)> = Vec::new();
        let bump = |side: Side, k: usize, coords: &mut Vec<(Side, usize, u32)>| {
            if let Some(c) = coords.iter_mut().find(|c| c.0 == side && c.1 == k) {
                c.2 += 1;
            } else {
                coords.push((side, k, 1));
            }
        };
        for &k in idx.unbarred() {
            bump(Side::Source, k, &mut coords);
        }
        for &k in idx.barred() {
            bump(Side::Target, k, &mut coords);
        }
        let scale_of = |side: Side, k: usize| -> f64 {
            let v = match side {
                Side::Source => x[k],
                Side::Target => xb[k],
            };
            v.abs().max(1.0)
        };
        // balance the O(h⁴) Richardson-accelerated truncation against the
        // eps/h^order rounding floor
        let hpow = f64::EPSILON.powf(1.0 / (order as f64 + 4.0));
        let steps: Vec<f64> = coords
            .iter()
            .map(|&(s, k, _)| hpow * scale_of(s, k))
            .collect();
        let d_h = self.fd_stencil(x, xb, &coords, &steps)?;
        let half: Vec<f64> = steps.iter().map(|h| h / 2.0).collect();
        let d_h2 = self.fd_stencil(x, xb, &coords, &half)?;
        // One Richardson step on the O(h²) central stencils.
        Ok((4.0 * d_h2 - d_h) / 3.0)
    }

    fn fd_stencil(
        &self,
        x: &[f64],
        xb: &[f64],
        coords: &[(Side, usize, u32)],
        steps: &[f64],
    ) -> Result<f64> {
        // Central coefficients for the m-th derivative, O(h²).
        fn stencil(m: u32) -> &'static [(i32, f64)] {
            match m {
                1 => &[(-1, -0.5), (1, 0.5)],
                2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
                3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
                4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
                _ => unreachable!(),
            }
        }
        let mut total = 0.0;
        let mut offsets = vec![0usize; coords.len()];
        'outer: loop {
            let mut xs = x.to_vec();
            let mut xbs = xb.to_vec();
            let mut w = 1.0;
            for (c, &(side, k, m)) in coords.iter().enumerate() {
                let (off, coeff) = stencil(m)[offsets[c]];
                w *= coeff / steps[c].powi(m as i32);
                match side {
                    Side::Source => xs[k] += off as f64 * steps[c],
                    Side::Target => xbs[k] += off as f64 * steps[c],
                }
            }
            if !self.in_domain(&xs, &xbs) {
                return Err(Error::StencilOutOfDomain);
            }
            total += w * self.func.eval_f64(&xs, &xbs);
            // advance the mixed-radix counter over stencil positions
            for c in 0..coords.len() {
                offsets[c] += 1;
                if offsets[c] < stencil(coords[c].2).len() {
                    continue 'outer;
                }
                offsets[c] = 0;
            }
            break;
        }
        Ok(total)
    }

    /// Gradient with respect to the source point, `Dc = (c_1, …, c_n)`.
    pub fn grad_x(&self, x: &[f64], xb: &[f64]) -> Result<DVector<f64>> {
        let mut g = DVector::zeros(self.n);
        for i in 0..self.n {
            g[i] = self.mixed_partial(x, xb, &MultiIndex::new(vec![i], vec![], self.n)?)?;
        }
        Ok(g)
    }

    /// Gradient with respect to the target point, `D̄c = (c_1̄, …, c_n̄)`.
    pub fn grad_xb(&self, x: &[f64], xb: &[f64]) -> Result<DVector<f64>> {
        let mut g = DVector::zeros(self.n);
        for j in 0..self.n {
            g[j] = self.mixed_partial(x, xb, &MultiIndex::new(vec![], vec![j], self.n)?)?;
        }
        Ok(g)
    }

    /// The matrix `c_{ij̄}` of mixed second derivatives.
    pub fn cross_matrix(&self, x: &[f64], xb: &[f64]) -> Result<DMatrix<f64>> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                a[(i, j)] =
                    self.mixed_partial(x, xb, &MultiIndex::new(vec![i], vec![j], self.n)?)?;
            }
        }
        Ok(a)
    }

    /// `c_{ij̄}` with its inverse and condition number; fails the
    /// non-degeneracy check when the condition number exceeds the cap.
    pub fn cross_hessian(&self, x: &[f64], xb: &[f64]) -> Result<CrossHessian> {
        let a = self.cross_matrix(x, xb)?;
        let svd = a.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > 0.0) || smax / smin > self.cond_cap {
            return Err(Error::NondegeneracyFailure { sigma_min: smin });
        }
        let a_inv = svd
            .pseudo_inverse(0.0)
            .map_err(|_| Error::NondegeneracyFailure { sigma_min: smin })?;
        Ok(CrossHessian {
            a,
            a_inv,
            condition: smax / smin,
        })
    }

    /// Sample sup-norms of the cost's derivatives of total order ≤ 2, 3, 4
    /// over the working box and record them on the chart.
    pub fn sample_norm_hints(&mut self, pairs: usize, seed: u64) -> Result<NormHints> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut c2: f64 = 0.0;
        let mut c3: f64 = 0.0;
        let mut c4: f64 = 0.0;
        let mut seen = 0usize;
        let mut attempts = 0usize;
        while seen < pairs && attempts < pairs * 50 {
            attempts += 1;
            let x: Vec<f64> = (0..self.n)
                .map(|k| rng.gen_range(self.domain.lo_x[k]..=self.domain.hi_x[k]))
                .collect();
            let xb: Vec<f64> = (0..self.n)
                .map(|k| rng.gen_range(self.domain.lo_xb[k]..=self.domain.hi_xb[k]))
                .collect();
            if !self.in_domain(&x, &xb) {
                continue;
            }
            seen += 1;
            for idx in all_multi_indices(self.n, 4) {
                let v = self.mixed_partial(&x, &xb, &idx)?.abs();
                if idx.order() <= 2 {
                    c2 = c2.max(v);
                }
                if idx.order() <= 3 {
                    c3 = c3.max(v);
                }
                c4 = c4.max(v);
            }
        }
        if seen == 0 {
            return Err(Error::InvalidParameter(
                "no admissible pairs found while sampling norms".into(),
            ));
        }
        let hints = NormHints { c2, c3, c4 };
        self.norm_hints = Some(hints);
        Ok(hints)
    }
}

/// All multi-indices of total order 1..=max_order in dimension `n`, with
/// non-decreasing indices inside each group (the symmetric representatives).
pub fn all_multi_indices(n: usize, max_order: usize) -> Vec<MultiIndex> {
    fn groups(n: usize, len: usize) -> Vec<Vec<usize>> {
        if len == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        fn rec(n: usize, len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == len {
                out.push(cur.clone());
                return;
            }
            for k in start..n {
                cur.push(k);
                rec(n, len, k, cur, out);
                cur.pop();
            }
        }
        rec(n, len, 0, &mut Vec::new(), &mut out);
        out
    }
    let mut all = Vec::new();
    for order in 1..=max_order {
        for nu in 0..=order {
            let nb = order - nu;
            for u in groups(n, nu) {
                for b in groups(n, nb) {
                    all.push(MultiIndex {
                        unbarred: u.clone(),
                        barred: b,
                    });
                }
            }
        }
    }
    all
}

pub fn check_point(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite coordinate".into()));
    }
    Ok(())
}
