//! `sparse-afe` command-line front end.
//!
//! ```text
//! sparse-afe run --config exp.toml --out results/ [--seed N] [--trials N] [--no-plot] [--linear]
//! sparse-afe presets --sparsity 4
//! sparse-afe plot --csv results/curves.csv --out curves.svg
//! ```
//!
//! Exit codes: 0 success, 2 user/config error, 3 I/O error, 4 when outputs
//! were written but at least one algorithm diverged.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use sparse_afe::harness::run_experiment_with_threads;
use sparse_afe::{ExperimentConfig, ExperimentResult};

pub use config::{parse_config, serialize_config};
pub use error::CliError;
pub use output::emit_csv;
pub use plot::{emit_plot, Figure};

pub const THREADS_ENV: &str = "SPARSE_AFE_THREADS";
pub const CSV_NAME: &str = "curves.csv";
pub const PLOT_NAME: &str = "curves.svg";
pub const CONFIG_ECHO_NAME: &str = "config.toml";

#[derive(Debug, Parser)]
#[command(name = "sparse-afe", version, about = "Sparse channel estimation with LMS-family adaptive filters")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Monte Carlo experiment and write curves, summary and plot.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's trial count.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        no_plot: bool,
        /// Write linear MSD instead of dB.
        #[arg(long)]
        linear: bool,
    },
    /// Print the tabulated algorithm parameters as a config fragment.
    Presets {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        sparsity: u8,
    },
    /// Render a CSV written by `run` as an SVG figure.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Worker count from `SPARSE_AFE_THREADS` (unset or 0 = automatic).
pub fn threads_from_env() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) if v.trim().is_empty() => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{THREADS_ENV}={v} is not a thread count"))),
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::Config(format!("{}: config file not found", path.display()))
        } else {
            CliError::io(path, e)
        }
    })?;
    parse_config(&text)
}

/// Writes curves, summary, config echo and (optionally) the plot into `out`.
pub fn write_outputs(
    result: &ExperimentResult,
    out: &Path,
    plot: bool,
    linear: bool,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    emit_csv(result, &out.join(CSV_NAME), linear)?;
    let echo = out.join(CONFIG_ECHO_NAME);
    std::fs::write(&echo, serialize_config(&result.config)?).map_err(|e| CliError::io(&echo, e))?;
    if plot {
        let figure = Figure::from_result(result);
        if !figure.is_empty() {
            emit_plot(&figure, &out.join(PLOT_NAME))?;
        }
    }
    Ok(())
}

fn print_summary(result: &ExperimentResult, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<12} {:>16} {:>12} {:>12} {:>9}",
        "algorithm", "steady-state dB", "converged@", "retrack@", "diverged"
    )?;
    let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
    for r in &result.reports {
        let s = &r.summary;
        writeln!(
            out,
            "{:<12} {:>16.3} {:>12} {:>12} {:>9}",
            s.label,
            s.steady_state_db,
            opt(s.convergence_iteration),
            opt(s.tracking_convergence_iteration),
            s.diverged_trials
        )?;
    }
    for r in &result.reports {
        if let Some(d) = &r.diagnostic {
            writeln!(out, "warning: {d}")?;
        }
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let stdout = std::io::stdout();
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            trials,
            no_plot,
            linear,
        } => {
            let mut cfg = load_config(&config)?;
            if let Some(seed) = seed {
                cfg.master_seed = seed;
            }
            if let Some(trials) = trials {
                cfg.trials = trials;
            }
            cfg.validate()?;
            let threads = threads_from_env()?;
            let result = run_experiment_with_threads(&cfg, threads)?;
            write_outputs(&result, &out, !no_plot, linear)?;
            print_summary(&result, &mut stdout.lock()).map_err(|e| CliError::io("<stdout>", e))?;
            let diverged: Vec<String> = result
                .reports
                .iter()
                .filter(|r| r.diverged())
                .map(|r| r.label.clone())
                .collect();
            if diverged.is_empty() {
                Ok(())
            } else {
                Err(CliError::Diverged(diverged))
            }
        }
        Command::Presets { sparsity } => {
            let text = config::presets_document(sparsity as usize)?;
            stdout
                .lock()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io("<stdout>", e))
        }
        Command::Plot { csv, out } => {
            let table = output::read_curves_csv(&csv)?;
            let title = csv
                .file_stem()
                .map_or_else(|| "learning curves".to_string(), |s| s.to_string_lossy().into_owned());
            emit_plot(&Figure::from_table(&table, title), &out)
        }
    }
}
