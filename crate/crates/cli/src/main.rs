//! `ncg-ymh`: batch front end. Configuration errors exit with 2; any other
//! failure, including a failed identity, exits with 1.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ncg_ymh::{Error, Result};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "ncg-ymh", version, about = "Fuzzy spectral triples, spectral action and matrix-model sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; defaults apply to every missing key.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Verify the configured signature only, or all four.
    #[arg(long, global = true, value_enum, default_value_t = Signatures::One)]
    signatures: Signatures,
    /// Sample the one-matrix Gaussian ensemble instead of the gauge model.
    #[arg(long, global = true)]
    self_test: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Run the identity suite and write verify_report.json.
    Verify,
    /// Evaluate the spectral action sectors and write action.json.
    Action,
    /// Write the sorted eigenvalues of the fluctuated Dirac operator.
    Spectrum,
    /// Run the Metropolis sampler and write samples.csv and summary.json.
    Sample,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Signatures {
    One,
    All,
}

fn setup_threads() -> Result<()> {
    let Ok(v) = std::env::var("NCG_YMH_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidConfig(format!("NCG_YMH_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidConfig(e.to_string()))
}

fn run(cli: &Cli) -> Result<bool> {
    setup_threads()?;
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output.dir = o.clone();
    }
    match cli.command {
        Command::Verify => commands::verify(&cfg, cli.signatures == Signatures::All),
        Command::Action => commands::action(&cfg).map(|_| true),
        Command::Spectrum => commands::spectrum(&cfg).map(|_| true),
        Command::Sample => commands::sample(&cfg, cli.self_test).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
