//! Command-line frontend: parameter sweeps, figure datasets and the
//! self-verification suite.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod grid;
pub mod verify;

use anyhow::{Context, Result};
use serde_json::json;

pub use config::{Cli, Command, Format, RunConfig};
pub use dataset::Dataset;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

pub struct Outcome {
    pub dataset: Dataset,
    pub exit_code: i32,
}

fn tolerances() -> serde_json::Value {
    use anyon_core::entanglement::{NEGATIVE_TOL, NORM_TOL, SUPPORT_TOL};
    use anyon_core::model::{HERMITIAN_TOL, LEAKAGE_TOL};
    json!({
        "hermitian": HERMITIAN_TOL,
        "sector_leakage": LEAKAGE_TOL,
        "rdm_support": SUPPORT_TOL,
        "state_norm": NORM_TOL,
        "negative_eigenvalue_clamp": NEGATIVE_TOL,
    })
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.command == Command::Verify {
        let report = verify::run(cfg)?;
        return Ok(Outcome {
            exit_code: if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED },
            dataset: report.to_dataset(cfg)?,
        });
    }
    let mut dataset = match cfg.command {
        Command::Spectrum => commands::spectrum(cfg),
        Command::EntropySweep => commands::entropy_sweep(cfg),
        Command::Dynamics => commands::dynamics(cfg),
        Command::Correlators => commands::correlators(cfg),
        Command::Momentum => commands::momentum(cfg),
        Command::Verify => unreachable!(),
    }
    .with_context(|| format!("`{}` failed", cfg.command_name()))?;
    dataset.attach_meta(cfg, tolerances());
    Ok(Outcome {
        dataset,
        exit_code: EXIT_OK,
    })
}

/// Sizes the global thread pool from `ANYON_LAB_THREADS` when it is set.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("ANYON_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("ANYON_LAB_THREADS=`{raw}` is not a thread count"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("thread pool already initialised")?;
    Ok(())
}
