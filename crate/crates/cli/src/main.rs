//! hd: batch front end for boundary certificates, sampling design, dichotomy
//! evidence, and noisy-identification experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;

use config::{CliError, RunConfig};

#[derive(Parser)]
#[command(
    name = "hd",
    version,
    about = "Certificates, sampling design, and noisy identification for bounded analytic models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration (schema "hd-config/1"; see DATA_FORMATS.md).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory for all artifacts; created if missing.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides the seed from the config.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Caps the worker thread count (default: machine parallelism).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Certify a boundary set: gauge admissibility plus positive content.
    Certify,
    /// Generate a sampling plan and validate its nontangential coverage.
    Design,
    /// Separation series between two models along a plan.
    Separation,
    /// Product-dichotomy evidence for two models under noise.
    Kakutani,
    /// Simulate noisy observations of a model along a plan.
    Simulate,
    /// Fit a Taylor model to observations by penalized least squares.
    Fit,
    /// Ladder experiment: recovery error versus observation count.
    Experiment,
    /// Hausdorff content and capacity estimates for a boundary set.
    Measure,
    /// Write the DATA_FORMATS.md artifact reference.
    Formats,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Certify => "certify",
            Self::Design => "design",
            Self::Separation => "separation",
            Self::Kakutani => "kakutani",
            Self::Simulate => "simulate",
            Self::Fit => "fit",
            Self::Experiment => "experiment",
            Self::Measure => "measure",
            Self::Formats => "formats",
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("HD_LOG")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let name = cli.command.name();
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None if matches!(cli.command, Command::Formats) => RunConfig::empty(),
        None => {
            return Err(CliError::Validation(
                "config: --config PATH is required for this command".into(),
            ))
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(threads) = cli.threads.or(cfg.threads) {
        cfg.threads = Some(threads);
        // the global pool installs once per process; later attempts keep the first
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let out_dir =
        cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("hd-out"));
    log::info!("running {name} into {}", out_dir.display());
    commands::run_command(name, cfg, &out_dir)
}
