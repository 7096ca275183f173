//! Experiment orchestration: each command validates its config section,
//! runs the computation, writes reports atomically, and maps the outcome to
//! an exit code.

use std::fs;
use std::path::{Path, PathBuf};

use crosscurv_core::envelopes::{
    connected_components, cut_locus_margin, parse_density_csv, solve_semidiscrete,
    targets_on_geodesic, write_partition_csv, AscentConfig, SemidiscreteProblem,
};
use crosscurv_core::geodesics::NewtonConfig;
use crosscurv_core::regularity::{
    classify_regularity, contact_connectivity_check, diagonal_constant_scan,
    sliding_mountain_check, Classification,
};
use crosscurv_core::report::JsonObj;
use crosscurv_core::{CostChart, Error, Result};

use crate::config::{RunConfig, SemidiscreteConfig};

/// Exit codes: 0 success/pass (strictest outcome for `curvature`), 1 and 2
/// carry graded outcomes, anything above 2 is an error.
pub const EXIT_ERROR: i32 = 3;

fn out_dir(cfg: &RunConfig, cli_out: Option<&str>) -> PathBuf {
    PathBuf::from(cli_out.or(cfg.out.as_deref()).unwrap_or("."))
}

/// Write atomically: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp-partial");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub struct CommandOutcome {
    pub exit_code: i32,
    pub report_paths: Vec<PathBuf>,
    pub summary: String,
}

pub fn cmd_curvature(cfg: &RunConfig, cli_out: Option<&str>) -> Result<CommandOutcome> {
    let section = cfg
        .curvature
        .as_ref()
        .ok_or_else(|| Error::Config("config has no `curvature` section".into()))?;
    let chart = cfg.cost.build()?;
    let report = classify_regularity(
        &chart,
        section.points_per_side,
        section.directions_per_point,
        section.tolerance,
        cfg.seed,
    )?;
    let mut obj = JsonObj::new()
        .str("command", "curvature")
        .str("cost", chart.kind())
        .usize("seed", cfg.seed as usize)
        .usize("samples_examined", report.samples_examined)
        .usize("degenerate_skipped", report.degenerate_skipped)
        .usize("out_of_domain_skipped", report.out_of_domain_skipped)
        .f64("min_normalized_cross", report.min_normalized)
        .str("classification", report.classification.as_str())
        .f64("tolerance", report.tol);
    if let Some(w) = &report.witness {
        obj = obj.obj(
            "witness",
            JsonObj::new()
                .f64_array("x", &w.x)
                .f64_array("xb", &w.xb)
                .f64_array("p", &w.p)
                .f64_array("pb", &w.pb),
        );
    }
    if let Some(diag) = &section.diagonal_scan {
        let scan = diagonal_constant_scan(&chart, diag.points, cfg.seed)?;
        obj = obj.obj(
            "diagonal_scan",
            JsonObj::new()
                .usize("points", scan.values.len())
                .f64("min", scan.min)
                .f64("max", scan.max)
                .f64_array("values", &scan.values),
        );
    }
    let path = out_dir(cfg, cli_out).join("curvature_report.json");
    write_atomic(&path, &obj.to_string())?;
    let exit = match report.classification {
        Classification::A3s => 0,
        Classification::A3w => 1,
        Classification::Violated => 2,
    };
    Ok(CommandOutcome {
        exit_code: exit,
        report_paths: vec![path],
        summary: format!(
            "classification {} (min normalized cross-curvature {:.6e})",
            report.classification.as_str(),
            report.min_normalized
        ),
    })
}

fn random_band_point(
    rng: &mut rand_chacha::ChaCha8Rng,
    lo: &[f64],
    hi: &[f64],
    shrink: f64,
) -> Vec<f64> {
    use rand::Rng;
    (0..lo.len())
        .map(|k| {
            let mid = 0.5 * (lo[k] + hi[k]);
            let half = 0.5 * (hi[k] - lo[k]) * shrink;
            rng.gen_range(mid - half..=mid + half)
        })
        .collect()
}

pub fn cmd_mountaincheck(cfg: &RunConfig, cli_out: Option<&str>) -> Result<CommandOutcome> {
    use rand::SeedableRng;
    let section = cfg
        .mountaincheck
        .as_ref()
        .ok_or_else(|| Error::Config("config has no `mountaincheck` section".into()))?;
    let chart = cfg.cost.build()?;
    let newton = NewtonConfig::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let default_grid = band_grid(&chart, section.y_per_axis);

    let mut worst_violation = f64::NEG_INFINITY;
    let mut worst: Option<(Vec<f64>, Vec<f64>, Vec<f64>)> = None;
    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut results = Vec::new();

    enum One {
        Checked(JsonObj, f64),
        Skipped,
    }
    let run_one = |x: &[f64], xb0: &[f64], xb1: &[f64], ys: &[Vec<f64>]| -> Result<One> {
        match sliding_mountain_check(&chart, x, xb0, xb1, ys, section.t_samples, &newton) {
            Ok(scan) => {
                let contact = contact_connectivity_check(
                    &chart,
                    x,
                    xb0,
                    xb1,
                    ys,
                    section.t_samples,
                    section.tolerance,
                    &newton,
                )?;
                let row = JsonObj::new()
                    .f64_array("x", x)
                    .f64_array("xb0", xb0)
                    .f64_array("xb1", xb1)
                    .f64("max_violation", scan.max_violation)
                    .f64("argmax_t", scan.argmax_t)
                    .bool("contact_pass", contact.pass)
                    .usize("skipped_y", scan.skipped_y);
                Ok(One::Checked(row, scan.max_violation))
            }
            Err(Error::SegmentFailure { .. }) | Err(Error::InvalidParameter(_)) => Ok(One::Skipped),
            Err(e) => Err(e),
        }
    };
    let mut absorb = |one: One,
                      x: &[f64],
                      xb0: &[f64],
                      xb1: &[f64],
                      checked: &mut usize,
                      skipped: &mut usize,
                      results: &mut Vec<JsonObj>| {
        match one {
            One::Checked(row, violation) => {
                *checked += 1;
                results.push(row);
                if violation > worst_violation {
                    worst_violation = violation;
                    worst = Some((x.to_vec(), xb0.to_vec(), xb1.to_vec()));
                }
            }
            One::Skipped => *skipped += 1,
        }
    };

    for fixed in &section.fixed {
        let ys: Vec<Vec<f64>> = fixed.y.clone().unwrap_or_else(|| default_grid.clone());
        let one = run_one(&fixed.x, &fixed.xb0, &fixed.xb1, &ys)?;
        absorb(one, &fixed.x, &fixed.xb0, &fixed.xb1, &mut checked, &mut skipped, &mut results);
    }
    let mut attempts = 0;
    while checked + skipped < section.fixed.len() + section.configurations
        && attempts < 20 * section.configurations
    {
        attempts += 1;
        let x = random_band_point(&mut rng, &chart.domain.lo_x, &chart.domain.hi_x, 0.6);
        let xb0 = random_band_point(&mut rng, &chart.domain.lo_xb, &chart.domain.hi_xb, 0.6);
        let xb1 = random_band_point(&mut rng, &chart.domain.lo_xb, &chart.domain.hi_xb, 0.6);
        if !chart.in_domain(&x, &xb0) || !chart.in_domain(&x, &xb1) {
            continue;
        }
        let one = run_one(&x, &xb0, &xb1, &default_grid)?;
        absorb(one, &x, &xb0, &xb1, &mut checked, &mut skipped, &mut results);
    }
    if checked == 0 {
        return Err(Error::Config(
            "no configuration could be checked in the working box".into(),
        ));
    }

    let pass = worst_violation <= section.tolerance;
    let dir = out_dir(cfg, cli_out);
    let mut paths = Vec::new();
    let obj = JsonObj::new()
        .str("command", "mountaincheck")
        .str("cost", chart.kind())
        .usize("seed", cfg.seed as usize)
        .usize("configurations_checked", checked)
        .usize("configurations_skipped", skipped)
        .f64("tolerance", section.tolerance)
        .f64("max_violation", worst_violation)
        .bool("pass", pass)
        .obj_array("results", results);
    let path = dir.join("mountaincheck_report.json");
    write_atomic(&path, &obj.to_string())?;
    paths.push(path);

    if section.emit_grid_csv {
        if let Some((x, xb0, xb1)) = &worst {
            let csv = scan_grid_csv(
                &chart,
                x,
                xb0,
                xb1,
                &default_grid,
                section.t_samples,
                &newton,
            )?;
            let p = dir.join("mountaincheck_grid.csv");
            write_atomic(&p, &csv)?;
            paths.push(p);
        }
    }
    Ok(CommandOutcome {
        exit_code: if pass { 0 } else { 2 },
        report_paths: paths,
        summary: format!(
            "{checked} configurations, max violation {worst_violation:.6e} ({})",
            if pass { "pass" } else { "violation found" }
        ),
    })
}

fn band_grid(chart: &CostChart, per_axis: usize) -> Vec<Vec<f64>> {
    let n = chart.n();
    let mut pts: Vec<Vec<f64>> = vec![vec![]];
    for k in 0..n {
        let lo = chart.domain.lo_x[k];
        let hi = chart.domain.hi_x[k];
        let mid = 0.5 * (lo + hi);
        let half = 0.35 * (hi - lo);
        let mut next = Vec::new();
        for p in &pts {
            for j in 0..per_axis {
                let frac = (j as f64 + 0.5) / per_axis as f64;
                let mut q = p.clone();
                q.push(mid - half + 2.0 * half * frac);
                next.push(q);
            }
        }
        pts = next;
    }
    pts
}

/// The scanned landscape f(t, y) = −c(y, x̄(t)) + c(x, x̄(t)) as CSV rows
/// `t, y..., f`.
fn scan_grid_csv(
    chart: &CostChart,
    x: &[f64],
    xb0: &[f64],
    xb1: &[f64],
    ys: &[Vec<f64>],
    t_samples: usize,
    newton: &NewtonConfig,
) -> Result<String> {
    let seg = crosscurv_core::geodesics::c_segment(chart, x, xb0, xb1, t_samples, newton)?;
    let mut out = String::from("t,y0,y1,f\n");
    for (t, xbt) in &seg.samples {
        let base = chart.eval(x, xbt)?;
        for y in ys {
            if !chart.in_domain(y, xbt) {
                continue;
            }
            let f = base - chart.eval(y, xbt)?;
            out.push_str(&format!(
                "{:.12e},{},{:.12e}\n",
                t,
                y.iter()
                    .map(|v| format!("{v:.12e}"))
                    .collect::<Vec<_>>()
                    .join(","),
                f
            ));
        }
    }
    Ok(out)
}

pub fn cmd_semidiscrete(cfg: &RunConfig, cli_out: Option<&str>) -> Result<CommandOutcome> {
    let section = cfg
        .semidiscrete
        .as_ref()
        .ok_or_else(|| Error::Config("config has no `semidiscrete` section".into()))?;
    let chart = cfg.cost.build()?;
    let problem = build_problem(&chart, section)?;
    let ascent = AscentConfig {
        mass_tol: section.mass_tol,
        max_iter: section.max_iter,
        step0: 1.0,
    };
    let solution = solve_semidiscrete(&problem, &ascent)?;
    let components: Vec<usize> = (0..problem.targets.len())
        .map(|r| {
            connected_components(
                &problem.grid,
                &solution.labels,
                &solution.support,
                r as i32,
                section.eight_connected,
                section.wrap,
            )
        })
        .collect();
    let margin = if chart.kind() == "sphere_squared" {
        cut_locus_margin(&problem, &solution).ok()
    } else {
        None
    };

    let dir = out_dir(cfg, cli_out);
    let mut obj = JsonObj::new()
        .str("command", "semidiscrete")
        .str("cost", chart.kind())
        .usize("seed", cfg.seed as usize)
        .usize("grid_nx", problem.grid.nx)
        .usize("grid_ny", problem.grid.ny)
        .bool("converged", solution.converged)
        .usize("iterations", solution.iterations.len())
        .f64("dual_value", solution.dual_value)
        .f64_array("lambda", &solution.lambda)
        .f64_array("masses", &solution.masses)
        .f64_array("eps", &problem.eps)
        .usize_array("components", &components);
    if let Some(m) = margin {
        obj = obj.obj(
            "cut_locus_margin",
            JsonObj::new().f64("margin", m.margin).bool("flagged", m.flagged),
        );
    }
    let json_path = dir.join("semidiscrete_report.json");
    write_atomic(&json_path, &obj.to_string())?;

    let mut raster = Vec::new();
    write_partition_csv(&mut raster, &problem.grid, &solution.labels)?;
    let csv_path = dir.join("semidiscrete_partition.csv");
    write_atomic(&csv_path, &String::from_utf8_lossy(&raster))?;

    Ok(CommandOutcome {
        exit_code: if solution.converged { 0 } else { 2 },
        report_paths: vec![json_path, csv_path],
        summary: format!(
            "{} iterations, masses {:?}, components {:?}",
            solution.iterations.len(),
            solution.masses,
            components
        ),
    })
}

pub fn build_problem(
    chart: &CostChart,
    section: &SemidiscreteConfig,
) -> Result<SemidiscreteProblem> {
    let newton = NewtonConfig::default();
    let targets = if let Some(t) = &section.targets {
        t.clone()
    } else if let Some(g) = &section.geodesic_targets {
        targets_on_geodesic(chart, &g.center, &g.dir, &g.arclengths, &newton)?
    } else {
        return Err(Error::Config(
            "semidiscrete config needs `targets` or `geodesic_targets`".into(),
        ));
    };
    if let Some(path) = &section.density_csv {
        let text = fs::read_to_string(path)?;
        let (grid, rho) = parse_density_csv(&text)?;
        let area = grid.dx() * grid.dy();
        let mut weights: Vec<f64> = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let (ix, iy) = grid.cell_of(idx);
            let c = grid.center(ix, iy);
            weights.push(rho[idx] * area * chart.volume_density(&c));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Config("ingested density has no mass".into()));
        }
        weights.iter_mut().for_each(|w| *w /= total);
        SemidiscreteProblem::from_weights(chart.clone(), grid, weights, targets, section.eps.clone())
    } else if let Some(disk) = &section.disk {
        SemidiscreteProblem::uniform_geodesic_disk(
            chart.clone(),
            section.grid.build()?,
            &disk.center,
            disk.radius,
            targets,
            section.eps.clone(),
        )
    } else {
        Err(Error::Config(
            "semidiscrete config needs `disk` or `density_csv`".into(),
        ))
    }
}
