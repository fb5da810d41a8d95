//! Batch front end for the `su11` toolkit: JSON run configurations in, CSV datasets
//! and JSON reports out.

pub mod config;
pub mod figures;
pub mod sweep;
pub mod table;

use std::path::Path;
use std::time::Duration;

use anyhow::{Context, Result};
use serde::Serialize;

pub use config::{load_config, EvaluateConfig, OptimizeConfig, OptimizeTarget, SCHEMA_VERSION};
pub use figures::{write_figure, FIGURES};
pub use sweep::{run_sweep, Axis, AxisValues, Output, Spacing, SweepSpec, SweepSummary, DEFAULT_MAX_GRID};
pub use table::Table;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Runs `f` on a private pool of `jobs` threads, or on the global pool when `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .context("building worker pool")?;
            Ok(pool.install(f))
        }
    }
}

#[derive(Serialize)]
struct Sidecar<'a, P: Serialize> {
    tool: &'static str,
    version: &'static str,
    schema_version: u32,
    name: &'a str,
    parameters: &'a P,
    files: &'a [String],
    runtime_seconds: f64,
}

/// JSON record written next to every dataset. Only `runtime_seconds` varies between runs.
pub fn write_sidecar<P: Serialize>(
    path: &Path,
    name: &str,
    parameters: &P,
    files: &[String],
    runtime: Duration,
) -> Result<()> {
    let sidecar = Sidecar {
        tool: "su11",
        version: VERSION,
        schema_version: SCHEMA_VERSION,
        name,
        parameters,
        files,
        runtime_seconds: runtime.as_secs_f64(),
    };
    write_json(path, &sidecar)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
