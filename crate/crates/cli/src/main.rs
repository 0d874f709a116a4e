//! `taperlin`: classify regimes, evaluate moments, draw samples, simulate
//! ensembles and run verification suites.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or
//! configuration error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Format, RunConfig};

pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "taperlin", version, about = "Linear processes with tapered-Pareto innovations")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, env = "TAPERLIN_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    /// Output formats, comma separated.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_format)]
    pub format: Option<Vec<Format>>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(format!("unknown format `{other}` (expected csv or json)")),
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Regime verdict for (alpha, beta, gamma) as JSON.
    Classify(ClassifyArgs),
    /// Exact, quadrature and leading-order moments.
    Moments(MomentsArgs),
    /// Tapered Pareto draws, one per line.
    Sample(SampleArgs),
    /// Monte Carlo ensemble of normalized partial sums.
    Simulate(SimulateArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Summarize suite reports found in the output directory.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub zero_sum: bool,
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    /// Moment orders, comma separated.
    #[arg(long = "r", value_delimiter = ',')]
    pub orders: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Run configuration (same as the global --config).
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub kernel: Option<String>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub suite: String,
    /// Reduced sample sizes with widened tolerances.
    #[arg(long)]
    pub fast: bool,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Directory with `verify-*.json` files (default: the output directory).
    pub dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

/// Config file (if any) with global flags applied.
pub fn resolve_config(cli: &Cli, file: Option<&PathBuf>) -> anyhow::Result<RunConfig> {
    let mut cfg = match file.or(cli.config.as_ref()) {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(d) = &cli.out_dir {
        cfg.out_dir = d.clone();
    }
    if let Some(f) = &cli.format {
        cfg.formats = f.clone();
    }
    Ok(cfg)
}
