//! Command-line front end: strict JSON configs in, reproducible artifact directories out.
//!
//! Exit codes: 0 success, 1 failed assertions, 2 configuration errors, 3 non-converged solver,
//! 4 incomplete run directory, 5 runtime failures.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod sampling;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{ExperimentConfig, HybridRunConfig, CountConfig};
pub use error::{CliError, CliResult};
pub use output::{AssertionRow, DiagnosticsFile, ReportFormat};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "NACY_THREADS";

#[derive(Debug, Parser)]
#[command(name = "nacy", version, about = "Optimal-transport potentials on polyhedral skeletons")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline for an experiment config.
    Solve {
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the output directory in the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Write artifacts and exit normally even when the solver reports no convergence.
        #[arg(long)]
        allow_nonconverged: bool,
    },
    /// Check valuative independence of a section-family file.
    CheckIndependence {
        sections: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare enumerated and generating-series section counts.
    CountSections {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Finite-t against non-archimedean potentials on an abelian skeleton.
    Hybrid {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Recompute the Monge-Ampère residual of a stored minimizer.
    DiagnoseMa {
        run_dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        face: usize,
    },
    /// Re-solve a stored problem and its role-swapped mirror and compare.
    DiagnoseDuality { run_dir: PathBuf },
    /// One row per assertion of a completed run.
    Report {
        run_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
    },
}

/// Sizes the global thread pool from [`THREADS_ENV`] when it is set.
pub fn init_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // A second initialization in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn print_json<T: serde::Serialize>(value: &T) -> CliResult<()> {
    println!("{}", serde_json::to_string_pretty(value).map_err(error::runtime)?);
    Ok(())
}

pub fn execute(cli: Cli) -> CliResult<()> {
    init_threads()?;
    match cli.command {
        Command::Solve { config, seed, output_dir, allow_nonconverged } => {
            let mut cfg: ExperimentConfig = config::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(d) = output_dir {
                cfg.output_dir = d;
            }
            let out = run::solve(&cfg, allow_nonconverged)?;
            println!(
                "{}: value {} on {}x{}, {} assertions passed, artifacts in {}",
                cfg.name,
                out.result.value,
                out.result.n_source,
                out.result.n_target,
                out.diagnostics.assertions.len(),
                out.dir.display()
            );
        }
        Command::CheckIndependence { sections, out } => {
            let report = commands::check_independence(&sections)?;
            match out {
                Some(path) => output::write_json(&path, &report)?,
                None => print_json(&report)?,
            }
        }
        Command::CountSections { config, seed } => {
            let mut cfg: CountConfig = config::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            print_json(&commands::count_sections(&cfg)?)?;
        }
        Command::Hybrid { config, seed, output_dir } => {
            let mut cfg: HybridRunConfig = config::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(d) = output_dir {
                cfg.output_dir = d;
            }
            print_json(&commands::hybrid(&cfg)?)?;
        }
        Command::DiagnoseMa { run_dir, face } => {
            println!("max residual {}", commands::diagnose_ma(&run_dir, face)?);
        }
        Command::DiagnoseDuality { run_dir } => print_json(&commands::diagnose_duality(&run_dir)?)?,
        Command::Report { run_dir, format } => print!("{}", commands::report(&run_dir, format)?),
    }
    Ok(())
}
