// SPDX-License-Identifier: MIT OR Apache-2.0

//! `cpmean`: change-in-mean detection from the command line.
//!
//! Exit codes: 0 on success, 2 for data problems (unreadable or non-numeric
//! input, nothing left after cleaning), 3 for bad parameters.
// `!(x > 0.0)` is deliberate: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpmean::detect::{Method, Selection, SigmaMode};

#[derive(Debug)]
pub enum CliError {
    Data(String),
    Param(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Param(m) => write!(f, "parameter error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cpmean::Error> for CliError {
    fn from(e: cpmean::Error) -> Self {
        if e.is_data_error() {
            CliError::Data(e.to_string())
        } else {
            CliError::Param(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Data(_) => 2,
            CliError::Param(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "cpmean", version, about = "Detect changes in the mean of a series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every randomised step
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the result here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate change-points
    Detect(DetectArgs),
    /// Print the solution path of bs, wbs, wbs2 or tguh
    Path(PathArgs),
    /// All optimal segmentations over a penalty range, with the RSS elbow table
    Crops(CropsArgs),
    /// Clean a well-log style series and run the analysis battery
    Welllog(WelllogArgs),
    /// Monte Carlo accuracy study
    Simulate(SimulateArgs),
}

/// Options shared by every command that runs a detector.
#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    #[arg(long, short, default_value = "pelt", value_parser = parse_method)]
    pub method: Method,
    /// sic, aic, mbic, mdl, lebarbier, potts, thresh, sdll, manual:<λ>, fixed:<m>
    #[arg(long = "select", value_parser = parse_selection)]
    pub selection: Option<Selection>,
    /// mad, iqr, residual[:h] or a positive number
    #[arg(long, default_value = "mad", value_parser = parse_sigma)]
    pub sigma: SigmaMode,
    /// Manual penalty per change; shorthand for --select manual:<λ>
    #[arg(long)]
    pub penalty: Option<f64>,
    /// Multiplier on the pelt penalty
    #[arg(long, default_value_t = 1.0)]
    pub penalty_scale: f64,
    /// MOSUM bandwidth
    #[arg(long)]
    pub bandwidth: Option<usize>,
    /// Bandwidths for mosum-multi, comma separated
    #[arg(long, value_delimiter = ',')]
    pub bandwidths: Vec<usize>,
    #[arg(long, default_value_t = cpmean::windowed::DEFAULT_ETA)]
    pub eta: f64,
    /// MOSUM significance level
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Intervals for wbs, or per stage for wbs2
    #[arg(long)]
    pub intervals: Option<usize>,
    #[arg(long, default_value_t = cpmean::hierarchical::DEFAULT_RHO)]
    pub rho: f64,
    /// Taut string penalty
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Isolate-Detect threshold
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub min_seg_len: usize,
    /// SDLL significance level (0.05 or 0.1)
    #[arg(long, default_value_t = 0.1)]
    pub sdll_alpha: f64,
    /// Largest model scanned by the information criteria
    #[arg(long, default_value_t = cpmean::select::DEFAULT_N_MAX)]
    pub n_max: usize,
    /// Constant in the thresh rule `C σ̂ sqrt(2 log n)`
    #[arg(long, default_value_t = cpmean::hierarchical::DEFAULT_THRESHOLD_CONST)]
    pub threshold_const: f64,
    /// Skip centering the data before fitting
    #[arg(long)]
    pub no_center: bool,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    /// Input file, or - for stdin
    pub input: PathBuf,
    #[command(flatten)]
    pub method: MethodArgs,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Keep only the first k entries
    #[arg(long)]
    pub top_k: Option<usize>,
    /// List the kept entries by location instead of by strength
    #[arg(long)]
    pub sort_by_location: bool,
}

#[derive(Debug, Args)]
pub struct CropsArgs {
    pub input: PathBuf,
    /// Lower end of the penalty range; defaults to 2σ̂² log n
    #[arg(long)]
    pub lambda_min: Option<f64>,
    /// Upper end of the penalty range; defaults to 20 times the lower default
    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[arg(long, default_value = "mad", value_parser = parse_sigma)]
    pub sigma: SigmaMode,
    #[arg(long, default_value_t = 1)]
    pub min_seg_len: usize,
}

#[derive(Debug, Args)]
pub struct WelllogArgs {
    /// Whitespace-separated numeric file
    pub input: PathBuf,
    /// Moving-median half-width used for cleaning
    #[arg(long, default_value_t = cpmean::variance::DEFAULT_MEDIAN_HALF_WIDTH)]
    pub clean_h: usize,
    /// Residual cutoff for outlier removal
    #[arg(long, default_value_t = cpmean::welllog::DEFAULT_CUTOFF)]
    pub clean_cutoff: f64,
    /// MOSUM bandwidths in the battery
    #[arg(long, value_delimiter = ',', default_values_t = [25usize, 50, 100, 200])]
    pub bandwidths: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    #[arg(long, default_value_t = cpmean::hierarchical::DEFAULT_INTERVALS)]
    pub intervals: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON scenario file; overrides --signal, --noise and --reps
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// blocks:<n>, teeth[:<width>:<count>], mscale, constant:<n>
    #[arg(long, default_value = "blocks:500")]
    pub signal: String,
    /// gaussian:<sd>, laplace:<sd> or ar1:<phi>:<sd>
    #[arg(long, default_value = "gaussian:1")]
    pub noise: String,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    /// Per-replication CSV output
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Run the Gaussian versus Laplace noise-variance comparison instead
    #[arg(long)]
    pub noise_variance_replica: bool,
    #[command(flatten)]
    pub method: MethodArgs,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: cpmean::Error| e.to_string())
}

fn parse_selection(s: &str) -> Result<Selection, String> {
    s.parse().map_err(|e: cpmean::Error| e.to_string())
}

fn parse_sigma(s: &str) -> Result<SigmaMode, String> {
    s.parse().map_err(|e: cpmean::Error| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cpmean: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
