use std::path::PathBuf;
use std::str::FromStr;

use boxhunt_core::montecarlo::Crash;
use boxhunt_core::StrategyId;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::range::IntRange;

#[derive(Debug, Parser)]
#[command(name = "boxhunt", version, about = "Speed-up analysis of non-coordinating parallel search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory for `<subcommand>.<ext>` when `--out` is not given.
    #[arg(long = "out-dir", env = "BOXHUNT_OUT", global = true, hide = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form speed-up bounds per k.
    Bounds {
        #[arg(long, default_value = "1..10")]
        k: IntRange,
    },
    /// Exact theta and speed-ups from the non-visit matrix.
    Exact(ExactArgs),
    /// Monte Carlo estimate of theta, optionally with crashed searchers.
    Simulate(SimulateArgs),
    /// The continuous optimum: region values, closed form and quadrature.
    Opt(OptArgs),
    /// Run invariant suites and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    #[arg(long, value_parser = parse_algs)]
    pub alg: Algs,
    #[arg(long)]
    pub k: IntRange,
    #[arg(long)]
    pub m: IntRange,
    #[arg(long, value_enum, default_value_t = ModeArg::Float)]
    pub mode: ModeArg,
    /// Append per-box expected times.
    #[arg(long)]
    pub per_x: bool,
    /// Check the column requirement; exit 2 on violation.
    #[arg(long)]
    pub check_columns: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Exact fractions; randomized schedules are limited to small m.
    Rational,
    Float,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_algs)]
    pub alg: Algs,
    #[arg(long)]
    pub k: IntRange,
    #[arg(long)]
    pub m: IntRange,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, env = "BOXHUNT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// `searcher@step`: the searcher opens boxes at steps up to `step` only.
    #[arg(long = "crash", value_parser = parse_crash)]
    pub crashes: Vec<Crash>,
    #[arg(long)]
    pub max_steps: Option<u64>,
    #[arg(long)]
    pub per_x: bool,
    /// Run trials on the current thread only.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OptArgs {
    #[arg(long, default_value = "2..10")]
    pub k: IntRange,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    pub method: MethodArg,
    /// Largest accepted |quadrature - closed form|.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Closed,
    Quadrature,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, value_parser = parse_algs)]
    pub alg: Option<Algs>,
    #[arg(long, default_value = "2..4")]
    pub k: IntRange,
    #[arg(long, default_value = "60")]
    pub m: IntRange,
    /// Random cases for the gamma suite.
    #[arg(long, default_value_t = 1000)]
    pub cases: usize,
    #[arg(long, env = "BOXHUNT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Trials per Monte Carlo run.
    #[arg(long, default_value_t = 20_000)]
    pub trials: u64,
    /// Grid resolution for the zoom suite.
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub zoom_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Columns,
    Monotonicity,
    Zoom,
    Gamma,
    Mc,
    All,
}

/// Strategies selected by `--alg`: a name, a comma list, or `all`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algs(pub Vec<StrategyId>);

pub fn parse_algs(s: &str) -> Result<Algs, String> {
    if s == "all" {
        return Ok(Algs(StrategyId::ALL.to_vec()));
    }
    s.split(',')
        .map(|p| StrategyId::from_str(p.trim()).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map(Algs)
}

pub fn parse_crash(s: &str) -> Result<Crash, String> {
    let (j, t) = s.split_once('@').ok_or_else(|| format!("expected searcher@step, got '{s}'"))?;
    let searcher = j.trim().parse().map_err(|_| format!("invalid searcher index '{j}'"))?;
    let step = t.trim().parse().map_err(|_| format!("invalid crash step '{t}'"))?;
    Ok(Crash { searcher, step })
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Bounds { .. } => "bounds",
            Command::Exact(_) => "exact",
            Command::Simulate(_) => "simulate",
            Command::Opt(_) => "opt",
            Command::Verify(_) => "verify",
        }
    }
}
