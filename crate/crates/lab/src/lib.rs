//! Batch runner for the `prs-core` experiments: configuration, dispatch and
//! report emission.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod svg;

use std::time::Instant;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/lab.md")]
mod book_lab {}

pub use config::{Experiment, Overrides, Preset, ResolvedConfig};
pub use error::{LabError, Result};
pub use report::{Flag, Report, RunOutput};

/// Runs one experiment on a pool of `cfg.workers` threads (default: all cores).
pub fn run(cfg: &ResolvedConfig) -> Result<RunOutput> {
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| LabError::usage("workers", e.to_string()))?;
    let outcome = pool.install(|| experiments::dispatch(cfg))?;
    Ok(RunOutput {
        report: Report {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: cfg.clone(),
            metrics: outcome.metrics,
            flags: outcome.flags,
            wall_clock_seconds: start.elapsed().as_secs_f64(),
        },
        rows: outcome.rows,
        chart: outcome.chart,
    })
}
