//! The pseudo-metric a cost induces on the product chart, its Christoffel
//! symbols, mixed Riemann tensor, cross-curvature, the third/fourth-derivative
//! regularity form, and the associated symplectic form.
//!
//! Normalization: `cross_curvature` (and `sectional_general`) are scaled so
//! that for a squared-distance cost on a Riemannian manifold the diagonal
//! value on orthonormal arguments equals 4/3 of the underlying sectional
//! curvature, matching the −2·∂⁴/∂s²∂t² expression along geodesic variations
//! (see `regularity::cross_curvature_via_fd`). The stored tensor components
//! in [`MixedRiemann`] are a factor [`CROSS_NORMALIZATION`] smaller.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::cost::{CostChart, CrossHessian, MultiIndex};
use crate::error::{Error, Result};

/// Ratio between the reported cross-curvature and the raw contraction of the
/// stored curvature tensor.
pub const CROSS_NORMALIZATION: f64 = 4.0;

/// Exact ratio `mtw_form / cross_curvature`, pinned once against the
/// one-dimensional exponential-family oracle and asserted universally in the
/// test suite.
pub const MTW_CROSS_RATIO: f64 = 0.5;

/// The symmetric bilinear form h at a base pair: a 2n×2n matrix whose only
/// nonzero blocks are the off-diagonal ones `−½ c_{ij̄}`.
#[derive(Clone, Debug)]
pub struct PseudoMetricAtPoint {
    pub base: (Vec<f64>, Vec<f64>),
    pub h: DMatrix<f64>,
}

impl PseudoMetricAtPoint {
    pub fn eigenvalues(&self) -> DVector<f64> {
        SymmetricEigen::new(self.h.clone()).eigenvalues
    }
}

/// Christoffel symbols at a base pair. Only the pure unbarred and pure barred
/// symbols are nonzero; mixed-type symbols vanish identically and are not
/// stored.
#[derive(Clone, Debug)]
pub struct ChristoffelAtPoint {
    n: usize,
    /// `Γ_{ij}^m` at `[m·n² + i·n + j]`
    pub unbarred: Vec<f64>,
    /// `Γ_{īj̄}^m̄` at `[m·n² + i·n + j]`
    pub barred: Vec<f64>,
}

impl ChristoffelAtPoint {
    pub fn unbarred_at(&self, m: usize, i: usize, j: usize) -> f64 {
        self.unbarred[m * self.n * self.n + i * self.n + j]
    }
    pub fn barred_at(&self, m: usize, i: usize, j: usize) -> f64 {
        self.barred[m * self.n * self.n + i * self.n + j]
    }
    pub fn max_abs(&self) -> f64 {
        self.unbarred
            .iter()
            .chain(self.barred.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// The n⁴ mixed curvature components `R_{i j̄ k̄ ℓ}` at a base pair. All other
/// index patterns follow from the pair symmetries or vanish identically.
#[derive(Clone, Debug)]
pub struct MixedRiemann {
    pub base: (Vec<f64>, Vec<f64>),
    n: usize,
    r: Vec<f64>,
}

impl MixedRiemann {
    /// `R_{i j̄ k̄ ℓ}` (slots: unbarred, barred, barred, unbarred).
    pub fn get(&self, i: usize, jb: usize, kb: usize, l: usize) -> f64 {
        let n = self.n;
        self.r[((i * n + jb) * n + kb) * n + l]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Raw quartic contraction over the plane spanned by `p ⊕ 0` and
    /// `0 ⊕ p̄`; multiply by [`CROSS_NORMALIZATION`] for the reported
    /// cross-curvature.
    pub fn contract_cross(&self, p: &[f64], pb: &[f64]) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        s -= self.get(i, j, k, l) * p[i] * pb[j] * pb[k] * p[l];
                    }
                }
            }
        }
        s
    }
}

fn third_tensors(
    chart: &CostChart,
    x: &[f64],
    xb: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = chart.n();
    // c3u[(i·n + j)·n + f] = c_{i j f̄}   (symmetric in i, j)
    let mut c3u = vec![0.0; n * n * n];
    // c3b[(a·n + j)·n + k] = c_{a j̄ k̄}  (symmetric in j, k)
    let mut c3b = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for f in 0..n {
                c3u[(i * n + j) * n + f] =
                    chart.mixed_partial(x, xb, &MultiIndex::new(vec![i, j], vec![f], n)?)?;
                c3b[(i * n + j) * n + f] =
                    chart.mixed_partial(x, xb, &MultiIndex::new(vec![i], vec![j, f], n)?)?;
            }
        }
    }
    Ok((c3u, c3b))
}

/// Assemble h at `(x, x̄)`; fails when the cross-Hessian is degenerate.
pub fn assemble_pseudo_metric(
    chart: &CostChart,
    x: &[f64],
    xb: &[f64],
) -> Result<PseudoMetricAtPoint> {
    let n = chart.n();
    let ch = chart.cross_hessian(x, xb)?;
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            h[(i, n + j)] = -0.5 * ch.a[(i, j)];
            h[(n + j, i)] = -0.5 * ch.a[(i, j)];
        }
    }
    Ok(PseudoMetricAtPoint {
        base: (x.to_vec(), xb.to_vec()),
        h,
    })
}

/// `h(v₁, v₂)` for 2n-vectors split as `p ⊕ p̄`.
pub fn h_inner(chart: &CostChart, x: &[f64], xb: &[f64], v1: &[f64], v2: &[f64]) -> Result<f64> {
    let n = chart.n();
    if v1.len() != 2 * n || v2.len() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            got: v1.len().max(v2.len()),
        });
    }
    let a = chart.cross_matrix(x, xb)?;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s -= 0.5 * a[(i, j)] * (v1[i] * v2[n + j] + v2[i] * v1[n + j]);
        }
    }
    Ok(s)
}

/// Whether `p ⊕ p̄` is null: `|c_{ij̄} pⁱ p̄^j̄| ≤ tol · |p| · |p̄| · ‖c_{ij̄}‖`.
pub fn is_null(
    chart: &CostChart,
    x: &[f64],
    xb: &[f64],
    p: &[f64],
    pb: &[f64],
    tol: f64,
) -> Result<bool> {
    let a = chart.cross_matrix(x, xb)?;
    let mut form = 0.0;
    for i in 0..chart.n() {
        for j in 0..chart.n() {
            form += a[(i, j)] * p[i] * pb[j];
        }
    }
    let np = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    let npb = pb.iter().map(|v| v * v).sum::<f64>().sqrt();
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(form.abs() <= tol * np * npb * na)
}

/// `Γ_{ij}^m = c^{mk̄} c_{k̄ij}` and `Γ_{īj̄}^m̄ = c^{m̄k} c_{kīj̄}`.
pub fn christoffel(chart: &CostChart, x: &[f64], xb: &[f64]) -> Result<ChristoffelAtPoint> {
    let n = chart.n();
    let ch = chart.cross_hessian(x, xb)?;
    let (c3u, c3b) = third_tensors(chart, x, xb)?;
    let mut unbarred = vec![0.0; n * n * n];
    let mut barred = vec![0.0; n * n * n];
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut gu = 0.0;
                let mut gb = 0.0;
                for k in 0..n {
                    // c^{m k̄} is the (k̄, m) entry of the inverse matrix
                    gu += ch.a_inv[(k, m)] * c3u[(i * n + j) * n + k];
                    gb += ch.a_inv[(m, k)] * c3b[(k * n + i) * n + j];
                }
                unbarred[m * n * n + i * n + j] = gu;
                barred[m * n * n + i * n + j] = gb;
            }
        }
    }
    Ok(ChristoffelAtPoint {
        n,
        unbarred,
        barred,
    })
}

/// The stored components satisfy
/// `2 R_{ij̄k̄ℓ} = c_{ij̄k̄ℓ} − c_{ℓif̄} c^{af̄} c_{aj̄k̄}`.
pub fn mixed_riemann(chart: &CostChart, x: &[f64], xb: &[f64]) -> Result<MixedRiemann> {
    let n = chart.n();
    let ch = chart.cross_hessian(x, xb)?;
    let (c3u, c3b) = third_tensors(chart, x, xb)?;
    let mut r = vec![0.0; n * n * n * n];
    for i in 0..n {
        for jb in 0..n {
            for kb in 0..n {
                for l in 0..n {
                    let c4 = chart.mixed_partial(
                        x,
                        xb,
                        &MultiIndex::new(vec![i, l], vec![jb, kb], n)?,
                    )?;
                    let mut corr = 0.0;
                    for f in 0..n {
                        for a in 0..n {
                            corr += c3u[(l * n + i) * n + f]
                                * ch.a_inv[(f, a)]
                                * c3b[(a * n + jb) * n + kb];
                        }
                    }
                    r[((i * n + jb) * n + kb) * n + l] = 0.5 * (c4 - corr);
                }
            }
        }
    }
    Ok(MixedRiemann {
        base: (x.to_vec(), xb.to_vec()),
        n,
        r,
    })
}

/// Cross-curvature of the plane `(p ⊕ 0) ∧ (0 ⊕ p̄)`, unnormalized by
/// `h(P,P)h(Q,Q) − h(P,Q)²` (which vanishes on the null planes of interest).
pub fn cross_curvature(
    chart: &CostChart,
    x: &[f64],
    xb: &[f64],
    p: &[f64],
    pb: &[f64],
) -> Result<f64> {
    let r = mixed_riemann(chart, x, xb)?;
    Ok(CROSS_NORMALIZATION * r.contract_cross(p, pb))
}

/// Full curvature contraction `R(P, Q, P, Q)` for general 2n-vectors,
/// reducing to [`cross_curvature`] on `P = p ⊕ 0`, `Q = 0 ⊕ p̄`.
pub fn sectional_general(
    chart: &CostChart,
    x: &[f64],
    xb: &[f64],
    pp: &[f64],
    qq: &[f64],
) -> Result<f64> {
    let n = chart.n();
    if pp.len() != 2 * n || qq.len() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            got: pp.len().max(qq.len()),
        });
    }
    let r = mixed_riemann(chart, x, xb)?;
    // The contraction factors through the wedge components
    //   W[i][j] = P_u[i] Q_b[j] − Q_u[i] P_b[j]
    //   V[k][l] = P_b[k] Q_u[l] − Q_b[k] P_u[l]
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let w = pp[i] * qq[n + j] - qq[i] * pp[n + j];
            if w == 0.0 {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    let v = pp[n + k] * qq[l] - qq[n + k] * pp[l];
                    s += r.get(i, j, k, l) * w * v;
                }
            }
        }
    }
    Ok(CROSS_NORMALIZATION * s)
}

/// The third/fourth-derivative regularity form
/// `Σ (−c_{ijk̄ℓ̄} + c_{ijā} c^{āb} c_{k̄ℓ̄b}) c^{k̄e} c^{ℓ̄f} p_i p_j q_e q_f`.
///
/// Satisfies `mtw_form(p, q) = MTW_CROSS_RATIO · cross_curvature(p, p̄)` with
/// `p̄^k̄ = c^{k̄e} q_e`.
pub fn mtw_form(chart: &CostChart, x: &[f64], xb: &[f64], p: &[f64], q: &[f64]) -> Result<f64> {
    let n = chart.n();
    let ch = chart.cross_hessian(x, xb)?;
    let pb = raise_covector(&ch, q);
    let (c3u, c3b) = third_tensors(chart, x, xb)?;
    let mut t1 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let c4 = chart.mixed_partial(
                        x,
                        xb,
                        &MultiIndex::new(vec![i, j], vec![k, l], n)?,
                    )?;
                    t1 += c4 * p[i] * p[j] * pb[k] * pb[l];
                }
            }
        }
    }
    // E[f] = c_{ijf̄} p_i p_j ;  F[a] = c_{ak̄ℓ̄} p̄^k̄ p̄^ℓ̄
    let mut t2 = 0.0;
    for f in 0..n {
        let mut e = 0.0;
        for i in 0..n {
            for j in 0..n {
                e += c3u[(i * n + j) * n + f] * p[i] * p[j];
            }
        }
        for a in 0..n {
            let mut fa = 0.0;
            for k in 0..n {
                for l in 0..n {
                    fa += c3b[(a * n + k) * n + l] * pb[k] * pb[l];
                }
            }
            t2 += e * ch.a_inv[(f, a)] * fa;
        }
    }
    Ok(t2 - t1)
}

/// `p̄^k̄ = c^{k̄e} q_e`, the target-side vector a source covector induces
/// through the inverse cross-Hessian.
pub fn raise_covector(ch: &CrossHessian, q: &[f64]) -> Vec<f64> {
    let n = q.len();
    let mut pb = vec![0.0; n];
    for k in 0..n {
        for e in 0..n {
            pb[k] += ch.a_inv[(k, e)] * q[e];
        }
    }
    pb
}

/// The canonical symplectic form at a base pair: blocks `±½ c_{ij̄}`.
#[derive(Clone, Debug)]
pub struct SymplecticAtPoint {
    pub base: (Vec<f64>, Vec<f64>),
    pub omega: DMatrix<f64>,
}

pub fn symplectic_form(chart: &CostChart, x: &[f64], xb: &[f64]) -> Result<SymplecticAtPoint> {
    let n = chart.n();
    let ch = chart.cross_hessian(x, xb)?;
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            omega[(i, n + j)] = 0.5 * ch.a[(i, j)];
            omega[(n + j, i)] = -0.5 * ch.a[(i, j)];
        }
    }
    Ok(SymplecticAtPoint {
        base: (x.to_vec(), xb.to_vec()),
        omega,
    })
}

/// One map sample for [`graph_diagnostics`]: a point, its image, and the
/// Jacobian of the map there.
#[derive(Clone, Debug)]
pub struct GraphSample {
    pub x: Vec<f64>,
    pub fx: Vec<f64>,
    pub df: DMatrix<f64>,
}

#[derive(Clone, Debug)]
pub struct GraphDiagnostics {
    /// Largest `|ω((v, DFv), (w, DFw))|` over samples and basis pairs.
    pub max_omega_defect: f64,
    /// Smallest `h((v, DFv), (v, DFv))` over samples and unit tangents.
    pub min_spacelike: f64,
    pub used: usize,
    pub rejected: usize,
}

/// Lagrangian/spacelike diagnostics for the graph of a map given by samples.
pub fn graph_diagnostics(chart: &CostChart, samples: &[GraphSample]) -> Result<GraphDiagnostics> {
    let n = chart.n();
    let mut max_defect: f64 = 0.0;
    let mut min_spacelike = f64::INFINITY;
    let mut used = 0;
    let mut rejected = 0;
    for s in samples {
        if !chart.in_domain(&s.x, &s.fx) {
            rejected += 1;
            continue;
        }
        used += 1;
        let ch = chart.cross_hessian(&s.x, &s.fx)?;
        let m = &ch.a * &s.df;
        for i in 0..n {
            for j in (i + 1)..n {
                max_defect = max_defect.max(0.5 * (m[(i, j)] - m[(j, i)]).abs());
            }
        }
        // h((v, DFv), (v, DFv)) = −vᵀ M v: minimize over unit v
        let sym = -0.5 * (&m + m.transpose());
        let eig = SymmetricEigen::new(sym).eigenvalues;
        min_spacelike = min_spacelike.min(eig.min());
    }
    if used == 0 {
        return Err(Error::TooFewSamples { need: 1, got: 0 });
    }
    Ok(GraphDiagnostics {
        max_omega_defect: max_defect,
        min_spacelike,
        used,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one_dim() -> CostChart {
        CostChart::one_dim_family(1.0, false).unwrap()
    }

    #[test]
    fn euclid_metric_is_half_swap() {
        let chart = CostChart::euclid_quadratic(2).unwrap();
        let m = assemble_pseudo_metric(&chart, &[0.1, -0.2], &[0.3, 0.4]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 0.5 } else { 0.0 };
                assert_relative_eq!(m.h[(i, 2 + j)], expect, epsilon = 1e-14);
            }
        }
        let mut eig: Vec<f64> = m.eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (e, want) in eig.iter().zip([-0.5, -0.5, 0.5, 0.5]) {
            assert_relative_eq!(*e, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn one_dim_metric_at_origin() {
        let chart = one_dim();
        let m = assemble_pseudo_metric(&chart, &[0.0], &[0.0]).unwrap();
        // c_{11̄} = −1 at the origin, so h = ½[[0,1],[1,0]]
        assert_relative_eq!(m.h[(0, 1)], 0.5, epsilon = 1e-12);
        assert_relative_eq!(m.h[(1, 0)], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn euclid_nullity_is_orthogonality() {
        let chart = CostChart::euclid_quadratic(2).unwrap();
        let x = [0.0, 0.0];
        let xb = [0.5, 0.5];
        let v = [1.0, 0.0, 0.0, 1.0]; // p = e1, p̄ = e2
        assert_relative_eq!(
            h_inner(&chart, &x, &xb, &v, &v).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        assert!(is_null(&chart, &x, &xb, &[1.0, 0.0], &[0.0, 1.0], 1e-12).unwrap());
        let w = [1.0, 0.0, 1.0, 0.0];
        assert_relative_eq!(
            h_inner(&chart, &x, &xb, &w, &w).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert!(!is_null(&chart, &x, &xb, &[1.0, 0.0], &[1.0, 0.0], 1e-12).unwrap());
    }

    #[test]
    fn euclid_christoffel_and_riemann_vanish() {
        let chart = CostChart::euclid_quadratic(2).unwrap();
        let g = christoffel(&chart, &[0.1, 0.2], &[0.4, -0.3]).unwrap();
        assert!(g.max_abs() < 1e-14);
        let r = mixed_riemann(&chart, &[0.1, 0.2], &[0.4, -0.3]).unwrap();
        assert!(r.r.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn one_dim_christoffel_vanishes_at_origin() {
        let chart = one_dim();
        let g = christoffel(&chart, &[0.0], &[0.0]).unwrap();
        assert!(g.unbarred_at(0, 0, 0).abs() < 1e-10);
    }

    #[test]
    fn one_dim_riemann_component() {
        // Oracle: the Taylor coefficients of c = −Σ x^{k+1} x̄^{k+1}/((k+1)² k!)
        // give c_{11̄1̄1}(0,0) = −1 and vanishing third derivatives, so the
        // stored component is −1/2.
        let chart = one_dim();
        let r = mixed_riemann(&chart, &[0.0], &[0.0]).unwrap();
        assert_relative_eq!(r.get(0, 0, 0, 0), -0.5, epsilon = 1e-9);
    }

    #[test]
    fn one_dim_cross_curvature_sign_and_value() {
        let chart = one_dim();
        let v = cross_curvature(&chart, &[0.0], &[0.0], &[1.0], &[1.0]).unwrap();
        assert_relative_eq!(v, 2.0, epsilon = 1e-9);
        // quartic scaling
        let v2 = cross_curvature(&chart, &[0.0], &[0.0], &[2.0], &[3.0]).unwrap();
        assert_relative_eq!(v2, 36.0 * 2.0, max_relative = 1e-9);
    }

    #[test]
    fn sectional_general_reduces_and_vanishes_on_equal_args() {
        let chart = CostChart::sphere_squared().unwrap();
        let x = [1.3, 0.8];
        let xb = [1.3, 0.8];
        let p = [0.7, -0.2];
        let pb = [0.1, 0.9];
        let pp = [p[0], p[1], 0.0, 0.0];
        let qq = [0.0, 0.0, pb[0], pb[1]];
        let a = sectional_general(&chart, &x, &xb, &pp, &qq).unwrap();
        let b = cross_curvature(&chart, &x, &xb, &p, &pb).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-10);
        let same = sectional_general(&chart, &x, &xb, &pp, &pp).unwrap();
        assert!(same.abs() < 1e-14);
    }

    #[test]
    fn convex_boundary_identity_hessian_sectional() {
        // f = g = |·|²/2 at the origin: identity Hessians, vanishing graph
        // gradients. In the normalization used here the plane
        // (p⊕0) ∧ (0⊕p̄) with unit p, p̄ carries curvature
        // 4·(pᵀD²f p)(p̄ᵀD²g p̄)/(2 + 2∇f·∇g) = 2.
        let n = 2;
        let eye = vec![1.0, 0.0, 0.0, 1.0];
        let chart =
            CostChart::convex_boundary(n, eye.clone(), vec![0.0; n], eye, vec![0.0; n]).unwrap();
        let x = [0.0, 0.0];
        let p = [1.0, 0.0];
        let pb = [0.0, 1.0];
        let v = cross_curvature(&chart, &x, &x, &p, &pb).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn convex_boundary_degenerate_when_normals_orthogonal() {
        // ∇f·∇g = −1 makes the cross-Hessian singular.
        let n = 1;
        let chart = CostChart::convex_boundary(
            n,
            vec![1.0],
            vec![1.0],
            vec![1.0],
            vec![-1.0],
        )
        .unwrap()
        .with_domain(crate::cost::DomainSpec::symmetric(&[(-0.5, 0.5)], -10.0));
        let err = chart.cross_hessian(&[0.0], &[0.0]).unwrap_err();
        assert!(matches!(err, Error::NondegeneracyFailure { .. }));
    }

    #[test]
    fn mtw_matches_half_cross_on_one_dim() {
        let chart = one_dim();
        let x = [0.2];
        let xb = [-0.3];
        let q = [0.7];
        let ch = chart.cross_hessian(&x, &xb).unwrap();
        let pb = raise_covector(&ch, &q);
        let m = mtw_form(&chart, &x, &xb, &[1.0], &q).unwrap();
        let c = cross_curvature(&chart, &x, &xb, &[1.0], &pb).unwrap();
        assert_relative_eq!(m, MTW_CROSS_RATIO * c, max_relative = 1e-10);
    }

    #[test]
    fn symplectic_antisymmetry_and_graph_diagnostics() {
        let chart = CostChart::euclid_quadratic(2).unwrap();
        let s = symplectic_form(&chart, &[0.1, 0.0], &[0.4, 0.2]).unwrap();
        assert!((s.omega.clone() + s.omega.transpose()).iter().all(|v| v.abs() < 1e-14));

        // F(x) = x + Du with u = |x|²/4: DF = I + I/2
        let df = DMatrix::from_diagonal_element(2, 2, 1.5);
        let samples: Vec<GraphSample> = [[0.0, 0.0], [0.2, -0.1], [-0.3, 0.25]]
            .iter()
            .map(|x| GraphSample {
                x: x.to_vec(),
                fx: x.iter().map(|v| 1.5 * v).collect(),
                df: df.clone(),
            })
            .collect();
        let d = graph_diagnostics(&chart, &samples).unwrap();
        assert!(d.max_omega_defect < 1e-12);
        assert_relative_eq!(d.min_spacelike, 1.5, epsilon = 1e-12);

        // rotation by π/2 has an antisymmetric Jacobian: positive defect
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let bad = vec![GraphSample {
            x: vec![0.1, 0.1],
            fx: vec![-0.1, 0.1],
            df: rot,
        }];
        let d2 = graph_diagnostics(&chart, &bad).unwrap();
        assert!(d2.max_omega_defect > 0.4);
    }
}
