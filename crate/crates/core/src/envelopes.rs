//! c-convex analysis (mountains, envelopes, c-transforms, contact sets) and
//! the semidiscrete transport solver: dual ascent over one weight per target
//! atom until region masses match the prescribed weights.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::cost::{CostChart, Covector};
use crate::error::{Error, Result};
use crate::geodesics::{c_exp, NewtonConfig};

/// A mountain `y ↦ λ − c(y, x̄)` focused at `x̄`.
#[derive(Clone, Debug)]
pub struct Mountain {
    pub focus: Vec<f64>,
    pub height: f64,
}

impl Mountain {
    /// Value at `y`, or `None` when `(y, focus)` is outside the domain.
    pub fn eval(&self, chart: &CostChart, y: &[f64]) -> Option<f64> {
        if chart.in_domain(y, &self.focus) {
            Some(self.height - chart.eval(y, &self.focus).ok()?)
        } else {
            None
        }
    }
}

/// A finite upper envelope of mountains.
#[derive(Clone, Debug)]
pub struct Envelope {
    pub mountains: Vec<Mountain>,
}

impl Envelope {
    pub fn new(mountains: Vec<Mountain>) -> Result<Self> {
        if mountains.is_empty() {
            return Err(Error::InvalidParameter("envelope needs a mountain".into()));
        }
        Ok(Envelope { mountains })
    }

    /// Envelope value at `y`, skipping mountains whose focus is inadmissible
    /// for `y`; errors when none is admissible.
    pub fn eval(&self, chart: &CostChart, y: &[f64]) -> Result<f64> {
        self.eval_argmax(chart, y).map(|(v, _)| v)
    }

    /// Value and the index of the active mountain (ties broken by the lowest
    /// index).
    pub fn eval_argmax(&self, chart: &CostChart, y: &[f64]) -> Result<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for (i, m) in self.mountains.iter().enumerate() {
            if let Some(v) = m.eval(chart, y) {
                if best.map_or(true, |(b, _)| v > b) {
                    best = Some((v, i));
                }
            }
        }
        best.ok_or(Error::NoAdmissibleSite)
    }
}

/// Which transform to apply in [`c_transform`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformDir {
    /// Values live at target sites; produce `v^c(x) = max_i (−c(x, x̄ᵢ) − vᵢ)`.
    ToSource,
    /// Values live at source sites; produce `u^{c*}(x̄) = max_i (−c(yᵢ, x̄) − uᵢ)`.
    ToTarget,
}

/// Discrete c- or c*-transform of sampled values.
pub fn c_transform(
    chart: &CostChart,
    sites: &[Vec<f64>],
    values: &[f64],
    query: &[f64],
    dir: TransformDir,
) -> Result<f64> {
    if sites.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: sites.len(),
            got: values.len(),
        });
    }
    let mut best = f64::NEG_INFINITY;
    let mut any = false;
    for (s, &v) in sites.iter().zip(values) {
        let c = match dir {
            TransformDir::ToSource => {
                if !chart.in_domain(query, s) {
                    continue;
                }
                chart.eval(query, s)?
            }
            TransformDir::ToTarget => {
                if !chart.in_domain(s, query) {
                    continue;
                }
                chart.eval(s, query)?
            }
        };
        any = true;
        best = best.max(-c - v);
    }
    if !any {
        return Err(Error::NoAdmissibleSite);
    }
    Ok(best)
}

/// Sup-norm gap of the double transform `((E|_grid)^{c*})^c − E` on the
/// source grid; the envelope's foci are added to the target sites.
pub fn duality_check(
    chart: &CostChart,
    envelope: &Envelope,
    source_grid: &[Vec<f64>],
    target_sites: &[Vec<f64>],
) -> Result<f64> {
    let u: Vec<f64> = source_grid
        .iter()
        .map(|y| envelope.eval(chart, y))
        .collect::<Result<_>>()?;
    let mut sites: Vec<Vec<f64>> = target_sites.to_vec();
    for m in &envelope.mountains {
        sites.push(m.focus.clone());
    }
    let ustar: Vec<f64> = sites
        .iter()
        .map(|xb| c_transform(chart, source_grid, &u, xb, TransformDir::ToTarget))
        .collect::<Result<_>>()?;
    let mut gap: f64 = 0.0;
    for (y, &uy) in source_grid.iter().zip(&u) {
        let back = c_transform(chart, &sites, &ustar, y, TransformDir::ToSource)?;
        gap = gap.max((back - uy).abs());
    }
    Ok(gap)
}

/// The c-contact set of an envelope at `x` within a candidate list:
/// `{x̄ : u(y) + c(y, x̄) ≥ u(x) + c(x, x̄) − tol for all grid y}`.
pub fn contact_set(
    chart: &CostChart,
    envelope: &Envelope,
    x: &[f64],
    candidates: &[Vec<f64>],
    y_grid: &[Vec<f64>],
    tol: f64,
) -> Result<Vec<usize>> {
    let ux = envelope.eval(chart, x)?;
    let uy: Vec<f64> = y_grid
        .iter()
        .map(|y| envelope.eval(chart, y))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    'cand: for (i, xb) in candidates.iter().enumerate() {
        if !chart.in_domain(x, xb) {
            continue;
        }
        let cx = chart.eval(x, xb)?;
        for (y, &u) in y_grid.iter().zip(&uy) {
            if !chart.in_domain(y, xb) {
                continue 'cand;
            }
            let cy = chart.eval(y, xb)?;
            if u + cy < ux + cx - tol {
                continue 'cand;
            }
        }
        out.push(i);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// semidiscrete transport

/// Rectangular cell-centered grid over a 2-D source chart.
#[derive(Clone, Debug)]
pub struct Grid2d {
    pub nx: usize,
    pub ny: usize,
    pub bounds: [[f64; 2]; 2],
}

impl Grid2d {
    pub fn new(nx: usize, ny: usize, bounds: [[f64; 2]; 2]) -> Result<Self> {
        if nx == 0 || ny == 0 || bounds.iter().any(|b| !(b[0] < b[1])) {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        Ok(Grid2d { nx, ny, bounds })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        (self.bounds[0][1] - self.bounds[0][0]) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.bounds[1][1] - self.bounds[1][0]) / self.ny as f64
    }

    /// Center of cell `(ix, iy)`.
    pub fn center(&self, ix: usize, iy: usize) -> [f64; 2] {
        [
            self.bounds[0][0] + (ix as f64 + 0.5) * self.dx(),
            self.bounds[1][0] + (iy as f64 + 0.5) * self.dy(),
        ]
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn cell_of(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }
}

/// A source density on a grid, finitely many target atoms, and their
/// prescribed weights.
#[derive(Clone)]
pub struct SemidiscreteProblem {
    pub chart: CostChart,
    pub grid: Grid2d,
    /// Quadrature weights per cell (density × cell area × metric volume
    /// factor), normalized to total mass one over the support.
    pub weights: Vec<f64>,
    pub targets: Vec<Vec<f64>>,
    pub eps: Vec<f64>,
}

impl SemidiscreteProblem {
    /// Build from a density function sampled at cell centers. The metric
    /// volume factor of the chart is applied automatically.
    pub fn from_density(
        chart: CostChart,
        grid: Grid2d,
        density: &dyn Fn(&[f64]) -> f64,
        targets: Vec<Vec<f64>>,
        eps: Vec<f64>,
    ) -> Result<Self> {
        let mut weights = vec![0.0; grid.len()];
        let area = grid.dx() * grid.dy();
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let c = grid.center(ix, iy);
                let rho = density(&c);
                if rho < 0.0 {
                    return Err(Error::InvalidParameter("negative density".into()));
                }
                if rho > 0.0 {
                    weights[grid.index(ix, iy)] = rho * area * chart.volume_density(&c);
                }
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidParameter("density has no mass on the grid".into()));
        }
        for w in &mut weights {
            *w /= total;
        }
        Self::from_weights(chart, grid, weights, targets, eps)
    }

    /// Uniform density (with respect to the chart's metric volume) on the
    /// geodesic disk of the given radius around `center`.
    pub fn uniform_geodesic_disk(
        chart: CostChart,
        grid: Grid2d,
        center: &[f64],
        radius: f64,
        targets: Vec<Vec<f64>>,
        eps: Vec<f64>,
    ) -> Result<Self> {
        let c0 = center.to_vec();
        let chart2 = chart.clone();
        let density = move |y: &[f64]| -> f64 {
            match chart2.eval(y, &c0) {
                Ok(c) if (2.0 * c).sqrt() <= radius => 1.0,
                _ => 0.0,
            }
        };
        Self::from_density(chart, grid, &density, targets, eps)
    }

    pub fn from_weights(
        chart: CostChart,
        grid: Grid2d,
        weights: Vec<f64>,
        targets: Vec<Vec<f64>>,
        eps: Vec<f64>,
    ) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: weights.len(),
            });
        }
        if targets.is_empty() || targets.len() != eps.len() {
            return Err(Error::InvalidParameter(
                "need matching nonempty targets and weights".into(),
            ));
        }
        if eps.iter().any(|&e| e <= 0.0) {
            return Err(Error::InvalidParameter("target weights must be positive".into()));
        }
        let se: f64 = eps.iter().sum();
        if (se - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter("target weights must sum to one".into()));
        }
        let sw: f64 = weights.iter().sum();
        if (sw - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(
                "quadrature weights must sum to one".into(),
            ));
        }
        // every supported cell must see every target
        for iy in 0..grid.ny {
            for ix in 0..grid.nx {
                let idx = grid.index(ix, iy);
                if weights[idx] <= 0.0 {
                    continue;
                }
                let c = grid.center(ix, iy);
                for t in &targets {
                    if !chart.in_domain(&c, t) {
                        return Err(Error::OutOfDomain);
                    }
                }
            }
        }
        Ok(SemidiscreteProblem {
            chart,
            grid,
            weights,
            targets,
            eps,
        })
    }

    /// Transport cost from every supported cell to every target,
    /// `cost[k·ncells + cell]`. Filled in parallel; entry order is fixed.
    pub fn cost_matrix(&self) -> Result<Vec<f64>> {
        let ncells = self.grid.len();
        let k = self.targets.len();
        let mut m = vec![f64::NAN; k * ncells];
        let grid = &self.grid;
        let chart = &self.chart;
        let targets = &self.targets;
        m.par_chunks_mut(ncells)
            .enumerate()
            .for_each(|(ti, row)| {
                let t = &targets[ti];
                for idx in 0..ncells {
                    let (ix, iy) = grid.cell_of(idx);
                    let c = grid.center(ix, iy);
                    row[idx] = if chart.in_domain(&c, t) {
                        chart.eval(&c, t).unwrap_or(f64::INFINITY)
                    } else {
                        f64::INFINITY
                    };
                }
            });
        Ok(m)
    }
}

/// Gradient-ascent configuration for the concave dual.
#[derive(Clone, Copy, Debug)]
pub struct AscentConfig {
    pub mass_tol: f64,
    pub max_iter: usize,
    pub step0: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig {
            mass_tol: 1e-3,
            max_iter: 2000,
            step0: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IterationRecord {
    pub iter: usize,
    pub dual_value: f64,
    pub max_mass_err: f64,
    pub step: f64,
}

/// Dual weights, argmax partition and per-target masses at convergence.
#[derive(Clone, Debug)]
pub struct SemidiscreteSolution {
    /// Gauge: `lambda[0] = 0`.
    pub lambda: Vec<f64>,
    /// Argmax label per grid cell (`-1` on cells where no target is
    /// admissible); ties broken by the lowest index.
    pub labels: Vec<i32>,
    /// Support mask: cells carrying positive quadrature weight.
    pub support: Vec<bool>,
    pub masses: Vec<f64>,
    pub dual_value: f64,
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
    /// Regions left empty with positive prescribed weight at the final
    /// iterate.
    pub flagged_empty: Vec<usize>,
}

fn eval_dual_state(
    cost: &[f64],
    weights: &[f64],
    eps: &[f64],
    lambda: &[f64],
    labels: &mut [i32],
    masses: &mut [f64],
) -> f64 {
    let k = eps.len();
    let ncells = weights.len();
    for m in masses.iter_mut() {
        *m = 0.0;
    }
    let mut integral = 0.0;
    for cell in 0..ncells {
        let mut best = f64::NEG_INFINITY;
        let mut arg: i32 = -1;
        for t in 0..k {
            let c = cost[t * ncells + cell];
            if c.is_finite() {
                let v = lambda[t] - c;
                if v > best {
                    best = v;
                    arg = t as i32;
                }
            }
        }
        labels[cell] = arg;
        let w = weights[cell];
        if w > 0.0 && arg >= 0 {
            masses[arg as usize] += w;
            integral += w * best;
        }
    }
    eps.iter().zip(lambda).map(|(e, l)| e * l).sum::<f64>() - integral
}

/// Maximize the concave dual `G(λ) = Σ εᵢ λᵢ − ∫ maxᵢ(λᵢ − c(x, x̄ᵢ)) dρ`
/// by gradient ascent with backtracking; the gradient component is
/// `εᵢ − ρ[Ωᵢ(λ)]`. Stops when the worst mass error is within tolerance.
pub fn solve_semidiscrete(
    problem: &SemidiscreteProblem,
    cfg: &AscentConfig,
) -> Result<SemidiscreteSolution> {
    let cost = problem.cost_matrix()?;
    let k = problem.targets.len();
    let ncells = problem.grid.len();
    let weights = &problem.weights;
    let eps = &problem.eps;

    let mut lambda = vec![0.0; k];
    let mut labels = vec![-1i32; ncells];
    let mut masses = vec![0.0; k];
    let mut trial_labels = vec![-1i32; ncells];
    let mut trial_masses = vec![0.0; k];
    let mut dual = eval_dual_state(&cost, weights, eps, &lambda, &mut labels, &mut masses);
    let mut step = cfg.step0;
    let mut iterations = Vec::new();
    let mut converged = false;

    for iter in 0..cfg.max_iter {
        let grad: Vec<f64> = eps.iter().zip(&masses).map(|(e, m)| e - m).collect();
        let err = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        iterations.push(IterationRecord {
            iter,
            dual_value: dual,
            max_mass_err: err,
            step,
        });
        if err <= cfg.mass_tol {
            converged = true;
            break;
        }
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial: Vec<f64> = lambda
                .iter()
                .zip(&grad)
                .map(|(l, g)| l + step * g)
                .collect();
            let gauge = trial[0];
            for t in trial.iter_mut() {
                *t -= gauge;
            }
            let tdual = eval_dual_state(
                &cost,
                weights,
                eps,
                &trial,
                &mut trial_labels,
                &mut trial_masses,
            );
            if tdual >= dual + 1e-4 * step * gnorm2 {
                lambda = trial;
                labels.copy_from_slice(&trial_labels);
                masses.copy_from_slice(&trial_masses);
                // accepted ascent steps never decrease the dual
                debug_assert!(tdual >= dual);
                dual = tdual;
                step *= 1.3;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // the full gradient direction is blocked at a vertex of the
            // piecewise-linear dual; try single-coordinate ascent steps,
            // which can break symmetric cell-flip batches
            'coord: for t in 1..k {
                let dir = grad[t].signum();
                if dir == 0.0 {
                    continue;
                }
                let mut alpha = cfg.step0;
                for _ in 0..30 {
                    let mut trial = lambda.clone();
                    trial[t] += alpha * dir;
                    let tdual = eval_dual_state(
                        &cost,
                        weights,
                        eps,
                        &trial,
                        &mut trial_labels,
                        &mut trial_masses,
                    );
                    let terr = eps
                        .iter()
                        .zip(&trial_masses)
                        .fold(0.0f64, |m, (e, ms)| m.max((e - ms).abs()));
                    if tdual >= dual && terr < err {
                        lambda = trial;
                        labels.copy_from_slice(&trial_labels);
                        masses.copy_from_slice(&trial_masses);
                        dual = tdual;
                        accepted = true;
                        break 'coord;
                    }
                    alpha *= 0.5;
                }
            }
        }
        if !accepted {
            break;
        }
    }

    let flagged_empty: Vec<usize> = (0..k)
        .filter(|&t| masses[t] <= 0.0 && eps[t] > 0.0)
        .collect();
    Ok(SemidiscreteSolution {
        lambda,
        labels,
        support: weights.iter().map(|&w| w > 0.0).collect(),
        masses,
        dual_value: dual,
        iterations,
        converged: converged && flagged_empty.is_empty(),
        flagged_empty,
    })
}

/// Flood-fill component count of one region of the labeled raster,
/// restricted to the support, with 4- or 8-neighbor adjacency and optional
/// wraparound per axis.
pub fn connected_components(
    grid: &Grid2d,
    labels: &[i32],
    support: &[bool],
    region: i32,
    eight_connected: bool,
    wrap: (bool, bool),
) -> usize {
    let (nx, ny) = (grid.nx as i64, grid.ny as i64);
    let idx = |ix: i64, iy: i64| (iy * nx + ix) as usize;
    let in_region = |i: usize| support[i] && labels[i] == region;
    let mut seen = vec![false; labels.len()];
    let mut components = 0;
    let neighbor_steps: &[(i64, i64)] = if eight_connected {
        &[
            (-1, 0),
            (1, 0),
            (0, -1),
            (0, 1),
            (-1, -1),
            (-1, 1),
            (1, -1),
            (1, 1),
        ]
    } else {
        &[(-1, 0), (1, 0), (0, -1), (0, 1)]
    };
    let mut stack = Vec::new();
    for start in 0..labels.len() {
        if seen[start] || !in_region(start) {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(cur) = stack.pop() {
            let cx = (cur % grid.nx) as i64;
            let cy = (cur / grid.nx) as i64;
            for &(dx, dy) in neighbor_steps {
                let mut jx = cx + dx;
                let mut jy = cy + dy;
                if wrap.0 {
                    jx = jx.rem_euclid(nx);
                } else if jx < 0 || jx >= nx {
                    continue;
                }
                if wrap.1 {
                    jy = jy.rem_euclid(ny);
                } else if jy < 0 || jy >= ny {
                    continue;
                }
                let j = idx(jx, jy);
                if !seen[j] && in_region(j) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    components
}

// ---------------------------------------------------------------------------
// diagnostics

#[derive(Clone, Debug)]
pub struct HolderFit {
    /// Slope of the lower envelope of log source-separation against log
    /// target-separation. 1 for a bi-Lipschitz map; near 0 for a
    /// discontinuous (piecewise-constant) one.
    pub exponent: f64,
    pub n_pairs: usize,
    /// Set when most sampled pairs share a target or the relation looks
    /// discrete.
    pub discreteness_warning: bool,
}

/// Fits a Hölder-type exponent from contact pairs `(x, x̄)` of a transport
/// relation. Diagnostic only.
pub fn holder_diagnostic(pairs: &[(Vec<f64>, Vec<f64>)], seed: u64) -> Result<HolderFit> {
    use rand::{Rng, SeedableRng};
    if pairs.len() < 20 {
        return Err(Error::TooFewSamples {
            need: 20,
            got: pairs.len(),
        });
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let budget = 20_000.min(pairs.len() * (pairs.len() - 1) / 2);
    let mut pts = Vec::with_capacity(budget);
    let mut zero_target = 0usize;
    let dist = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    for _ in 0..budget {
        let i = rng.gen_range(0..pairs.len());
        let j = rng.gen_range(0..pairs.len());
        if i == j {
            continue;
        }
        let dxb = dist(&pairs[i].1, &pairs[j].1);
        let dx = dist(&pairs[i].0, &pairs[j].0);
        if dxb <= 1e-14 {
            zero_target += 1;
            continue;
        }
        if dx <= 1e-14 {
            // distinct targets at coinciding sources: no continuity at all
            pts.push((dxb.ln(), -34.0));
            continue;
        }
        pts.push((dxb.ln(), dx.ln()));
    }
    if pts.len() < 10 {
        return Ok(HolderFit {
            exponent: 0.0,
            n_pairs: pts.len(),
            discreteness_warning: true,
        });
    }
    // lower envelope: bin over log target-separation, keep the minimum log
    // source-separation per bin, then least-squares over bin minima
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let nbins = 14usize;
    let mut mins = vec![f64::INFINITY; nbins];
    let width = ((hi - lo) / nbins as f64).max(1e-12);
    for (a, b) in &pts {
        let bin = (((a - lo) / width) as usize).min(nbins - 1);
        mins[bin] = mins[bin].min(*b);
    }
    let (mut sx, mut sy, mut sxx, mut sxy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (bin, &y) in mins.iter().enumerate() {
        if !y.is_finite() {
            continue;
        }
        let xc = lo + (bin as f64 + 0.5) * width;
        sx += xc;
        sy += y;
        sxx += xc * xc;
        sxy += xc * y;
        m += 1.0;
    }
    if m < 3.0 {
        return Ok(HolderFit {
            exponent: 0.0,
            n_pairs: pts.len(),
            discreteness_warning: true,
        });
    }
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let warning = zero_target * 2 > budget || slope < 0.1;
    Ok(HolderFit {
        exponent: slope,
        n_pairs: pts.len(),
        discreteness_warning: warning,
    })
}

/// Contact pairs (cell center, assigned target) of a semidiscrete solution.
pub fn solution_contact_pairs(
    problem: &SemidiscreteProblem,
    solution: &SemidiscreteSolution,
    max_pairs: usize,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut out = Vec::new();
    let stride = (problem.grid.len() / max_pairs.max(1)).max(1);
    for idx in (0..problem.grid.len()).step_by(stride) {
        if !solution.support[idx] || solution.labels[idx] < 0 {
            continue;
        }
        let (ix, iy) = problem.grid.cell_of(idx);
        let c = problem.grid.center(ix, iy);
        out.push((
            c.to_vec(),
            problem.targets[solution.labels[idx] as usize].clone(),
        ));
    }
    out
}

#[derive(Clone, Debug)]
pub struct CutLocusMargin {
    /// min over support cells of (π − d(x, x̄_label(x)))
    pub margin: f64,
    pub flagged: bool,
}

/// Distance margin to the antipodal singular set for a sphere-chart
/// solution.
pub fn cut_locus_margin(
    problem: &SemidiscreteProblem,
    solution: &SemidiscreteSolution,
) -> Result<CutLocusMargin> {
    if problem.chart.kind() != "sphere_squared" {
        return Err(Error::InvalidParameter(
            "cut-locus margin is defined for the sphere chart".into(),
        ));
    }
    let embed = |p: &[f64]| -> [f64; 3] {
        [p[0].sin() * p[1].cos(), p[0].sin() * p[1].sin(), p[0].cos()]
    };
    let mut margin = f64::INFINITY;
    for idx in 0..problem.grid.len() {
        if !solution.support[idx] || solution.labels[idx] < 0 {
            continue;
        }
        let (ix, iy) = problem.grid.cell_of(idx);
        let a = embed(&problem.grid.center(ix, iy));
        let b = embed(&problem.targets[solution.labels[idx] as usize]);
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let d = dot.clamp(-1.0, 1.0).acos();
        margin = margin.min(std::f64::consts::PI - d);
    }
    if !margin.is_finite() {
        return Err(Error::InvalidParameter("solution has empty support".into()));
    }
    Ok(CutLocusMargin {
        flagged: margin <= problem.chart.domain.cut_margin,
        margin,
    })
}

/// Targets at prescribed arclengths along the geodesic through `center`
/// with initial metric direction `dir` (normalized internally).
pub fn targets_on_geodesic(
    chart: &CostChart,
    center: &[f64],
    dir: &[f64],
    arclengths: &[f64],
    cfg: &NewtonConfig,
) -> Result<Vec<Vec<f64>>> {
    let ch = chart.cross_hessian(center, center)?;
    let g = -ch.a.clone();
    let d = DVector::from_column_slice(dir);
    let norm = d.dot(&(&g * &d)).sqrt();
    if norm < 1e-12 {
        return Err(Error::InvalidParameter("zero direction".into()));
    }
    let u = d / norm;
    let mut out = Vec::with_capacity(arclengths.len());
    for &s in arclengths {
        let pstar = Covector::source(&g * (&u * s));
        out.push(c_exp(chart, center, &pstar, center, cfg)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// CSV interchange

/// Partition raster as CSV lines `x0,x1,label`.
pub fn write_partition_csv<W: std::io::Write>(
    w: &mut W,
    grid: &Grid2d,
    labels: &[i32],
) -> Result<()> {
    writeln!(w, "x0,x1,label")?;
    for idx in 0..grid.len() {
        let (ix, iy) = grid.cell_of(idx);
        let c = grid.center(ix, iy);
        writeln!(w, "{:.12e},{:.12e},{}", c[0], c[1], labels[idx])?;
    }
    Ok(())
}

/// Parse a density grid from CSV with the one-line header
/// `nx,ny,x0,x1,y0,y1` followed by ny rows of nx comma-separated values.
pub fn parse_density_csv(text: &str) -> Result<(Grid2d, Vec<f64>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("empty density CSV".into()))?;
    let head: Vec<f64> = header
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Config(format!("bad density header: {e}")))?;
    if head.len() != 6 {
        return Err(Error::Config("density header must be nx,ny,x0,x1,y0,y1".into()));
    }
    let nx = head[0] as usize;
    let ny = head[1] as usize;
    let grid = Grid2d::new(nx, ny, [[head[2], head[3]], [head[4], head[5]]])?;
    let mut values = Vec::with_capacity(nx * ny);
    for line in lines {
        for tok in line.split(',') {
            let v: f64 = tok
                .trim()
                .parse()
                .map_err(|e| Error::Config(format!("bad density value: {e}")))?;
            values.push(v);
        }
    }
    if values.len() != nx * ny {
        return Err(Error::Config(format!(
            "expected {} density values, got {}",
            nx * ny,
            values.len()
        )));
    }
    Ok((grid, values))
}
