//! Scenario runner for the `gaugelab-core` checks.
//!
//! A scenario is a JSON document with a top-level `kind` (see
//! [`config::Kind`]). [`run::run_scenario`] validates it, computes, prints
//! nothing, and writes bit-stable CSV/JSON artifacts plus a `summary.json`
//! listing every check. The `gaugelab` binary wraps this with exit codes:
//! 0 when all checks pass, 2 when a check fails, 1 on usage or domain errors.

pub mod config;
pub mod output;
pub mod run;

pub use config::{Kind, Scenario};
pub use run::{run_scenario, Check, RunOptions, RunOutcome};

/// Environment variable capping the worker threads used by scans.
pub const THREADS_ENV: &str = "GAUGELAB_THREADS";

/// Parse a `GAUGELAB_THREADS` value: a positive integer.
pub fn parse_threads(value: &str) -> anyhow::Result<usize> {
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => anyhow::bail!("{THREADS_ENV}: expected a positive integer, got `{value}`"),
    }
}
