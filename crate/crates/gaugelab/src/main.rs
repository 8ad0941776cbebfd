use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use gaugelab::output::Formats;
use gaugelab::{parse_threads, run_scenario, Kind, RunOptions, Scenario, THREADS_ENV};

/// Run a gauge-invariance scenario and write its reports.
///
/// Exit status: 0 if every check passes, 2 if a physics check fails,
/// 1 on usage, configuration or IO errors.
#[derive(Debug, Parser)]
#[command(name = "gaugelab", version)]
struct Cli {
    /// Scenario kind: classical-demo, gauge-transform, volkov, unitarity-check or keldysh-map.
    kind: String,

    /// JSON scenario file; its `kind` must match.
    #[arg(long)]
    config: PathBuf,

    /// Output directory.
    #[arg(long, default_value = "gaugelab-out")]
    out: PathBuf,

    /// Comma-separated output formats.
    #[arg(long, default_value = "csv,json")]
    format: String,

    /// Override the scenario tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
}

fn run(cli: Cli) -> Result<i32> {
    let kind: Kind = cli.kind.parse().context("<kind>")?;
    let text = std::fs::read_to_string(&cli.config)
        .with_context(|| format!("--config: cannot read {}", cli.config.display()))?;
    let scenario = Scenario::from_json(&text)?;
    if scenario.kind() != kind {
        bail!("kind: config declares `{}` but `{kind}` was requested", scenario.kind());
    }
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(parse_threads(&v)?),
        Err(std::env::VarError::NotPresent) => None,
        Err(e) => bail!("{THREADS_ENV}: {e}"),
    };
    let opts = RunOptions {
        out: cli.out,
        formats: Formats::parse(&cli.format)?,
        tolerance: cli.tolerance,
        threads,
    };
    let outcome = run_scenario(&scenario, &opts)?;
    for check in &outcome.checks {
        println!("{}", check.line());
    }
    println!(
        "{}: {} of {} checks passed, {} files in {}",
        outcome.kind,
        outcome.checks.iter().filter(|c| c.pass).count(),
        outcome.checks.len(),
        outcome.files.len(),
        opts.out.display()
    );
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
