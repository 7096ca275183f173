//! Run configuration: JSON in, schema-validated before any computation,
//! unknown keys rejected.

use serde::Deserialize;

use crosscurv_core::envelopes::Grid2d;
use crosscurv_core::{CostSpec, Error, Result};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub cost: CostSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub curvature: Option<CurvatureConfig>,
    #[serde(default)]
    pub mountaincheck: Option<MountainCheckConfig>,
    #[serde(default)]
    pub semidiscrete: Option<SemidiscreteConfig>,
}

fn default_seed() -> u64 {
    7
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureConfig {
    #[serde(default = "default_pps")]
    pub points_per_side: usize,
    #[serde(default = "default_dirs")]
    pub directions_per_point: usize,
    #[serde(default = "default_class_tol")]
    pub tolerance: f64,
    /// Optional scan of the diagonal constant with metric-orthonormal
    /// frames (squared-distance costs).
    #[serde(default)]
    pub diagonal_scan: Option<DiagonalScanConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalScanConfig {
    #[serde(default = "default_diag_points")]
    pub points: usize,
}

fn default_pps() -> usize {
    12
}
fn default_dirs() -> usize {
    8
}
fn default_class_tol() -> f64 {
    1e-9
}
fn default_diag_points() -> usize {
    20
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MountainCheckConfig {
    /// Number of random configurations drawn from the working box.
    #[serde(default = "default_configs")]
    pub configurations: usize,
    #[serde(default = "default_t_samples")]
    pub t_samples: usize,
    #[serde(default = "default_y_per_axis")]
    pub y_per_axis: usize,
    #[serde(default = "default_mc_tol")]
    pub tolerance: f64,
    /// Explicit configurations checked in addition to the random ones.
    #[serde(default)]
    pub fixed: Vec<FixedConfiguration>,
    /// Write the f(t, y) grid of the worst configuration to CSV.
    #[serde(default)]
    pub emit_grid_csv: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedConfiguration {
    pub x: Vec<f64>,
    pub xb0: Vec<f64>,
    pub xb1: Vec<f64>,
    #[serde(default)]
    pub y: Option<Vec<Vec<f64>>>,
}

fn default_configs() -> usize {
    20
}
fn default_t_samples() -> usize {
    17
}
fn default_y_per_axis() -> usize {
    8
}
fn default_mc_tol() -> f64 {
    1e-8
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemidiscreteConfig {
    pub grid: GridConfig,
    #[serde(default)]
    pub disk: Option<DiskConfig>,
    #[serde(default)]
    pub density_csv: Option<String>,
    #[serde(default)]
    pub targets: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub geodesic_targets: Option<GeodesicTargets>,
    pub eps: Vec<f64>,
    #[serde(default = "default_mass_tol")]
    pub mass_tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub eight_connected: bool,
    #[serde(default)]
    pub wrap: (bool, bool),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    #[serde(rename = "box")]
    pub bounds: [[f64; 2]; 2],
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskConfig {
    pub center: Vec<f64>,
    pub radius: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicTargets {
    pub center: Vec<f64>,
    pub dir: Vec<f64>,
    pub arclengths: Vec<f64>,
}

fn default_mass_tol() -> f64 {
    1e-3
}
fn default_max_iter() -> usize {
    2000
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid2d> {
        Grid2d::new(self.nx, self.ny, self.bounds)
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        Ok(cfg)
    }
}
