//! `crosscurv`: command-line front end for the cost-geometry experiments.
//!
//! Exit codes: `curvature` reports 0 for strict regularity, 1 for weak, 2
//! for a violation; `mountaincheck` reports 0 on pass and 2 when a violation
//! is found; `selftest` reports 0 only when the whole suite is green. Codes
//! above 2 are errors.

pub mod checks;
pub mod commands;
pub mod config;
pub mod presets;

use clap::{Parser, Subcommand};

use commands::EXIT_ERROR;
use config::RunConfig;

#[derive(Parser)]
#[command(name = "crosscurv", version, about = "Transportation-cost geometry experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a cost against the curvature regularity conditions.
    Curvature(RunArgs),
    /// Sliding-mountain and contact-connectivity checks.
    Mountaincheck(RunArgs),
    /// Semidiscrete transport partition experiment.
    Semidiscrete(RunArgs),
    /// Run the full acceptance suite and print a pass/fail table.
    Selftest,
    /// List the embedded presets.
    Presets,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Path to a JSON run configuration.
    #[arg(long)]
    config: Option<String>,
    /// Name of an embedded preset (see `crosscurv presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Output directory for reports (overrides the config).
    #[arg(long)]
    out: Option<String>,
    /// Random seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel sections.
    #[arg(long)]
    workers: Option<usize>,
}

fn load_config(args: &RunArgs) -> Result<RunConfig, String> {
    let text = match (&args.config, &args.preset) {
        (Some(path), None) => std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {path}: {e}"))?,
        (None, Some(name)) => presets::preset_json(name)
            .ok_or_else(|| {
                format!(
                    "unknown preset `{name}`; available: {}",
                    presets::PRESET_NAMES.join(", ")
                )
            })?
            .to_string(),
        (Some(_), Some(_)) => return Err("pass either --config or --preset, not both".into()),
        (None, None) => return Err("missing --config or --preset".into()),
    };
    let mut cfg = RunConfig::from_json(&text).map_err(|e| e.to_string())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(w) = args.workers {
        cfg.workers = Some(w);
    }
    Ok(cfg)
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("worker pool")
            .install(f),
        None => f(),
    }
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap prints its own message; usage problems are errors (> 2)
            let _ = e.print();
            return if e.use_stderr() { 64 } else { 0 };
        }
    };
    match cli.command {
        Command::Presets => {
            for name in presets::PRESET_NAMES {
                println!("{name}");
            }
            0
        }
        Command::Selftest => {
            let mut all_ok = true;
            for check in checks::run_all() {
                let status = if check.passed { "PASS" } else { "FAIL" };
                println!("{status}  {}  {}", check.name, check.detail);
                all_ok &= check.passed;
            }
            if all_ok {
                0
            } else {
                1
            }
        }
        Command::Curvature(args) => dispatch(args, commands::cmd_curvature),
        Command::Mountaincheck(args) => dispatch(args, commands::cmd_mountaincheck),
        Command::Semidiscrete(args) => dispatch(args, commands::cmd_semidiscrete),
    }
}

fn dispatch(
    args: RunArgs,
    f: fn(&RunConfig, Option<&str>) -> crosscurv_core::Result<commands::CommandOutcome>,
) -> i32 {
    let cfg = match load_config(&args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 64;
        }
    };
    let out = args.out.as_deref();
    let result = with_pool(cfg.workers, || f(&cfg, out));
    match result {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for p in &outcome.report_paths {
                println!("wrote {}", p.display());
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
