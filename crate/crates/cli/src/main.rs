mod commands;
mod config;
mod error;
mod experiment;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use greenspread::optimize::Variant;
use greenspread::scalar::parse_rational;
use greenspread::Rational;

use error::CliError;

/// Threshold adoption dynamics with temporary subsidies.
#[derive(Debug, Parser)]
#[command(name = "greenspread", version)]
struct Cli {
    /// Seed for every random choice the command makes (ChaCha8).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a generated graph in the text format.
    Gen(GenArgs),
    /// Print the trajectory and convergence summary for a subsidy set.
    Simulate(SimulateArgs),
    /// Solve a planning problem.
    Optimize(OptimizeArgs),
    /// Write the integer program of a planning problem as LP text.
    ExportIp(ExportArgs),
    /// Check an external solver's solution against a model and the dynamics.
    Verify(VerifyArgs),
    /// Run a parameter sweep from a config file and write CSV.
    Experiment(ExperimentArgs),
    /// Print clustering, path length and degree statistics.
    Metrics(MetricsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Class1,
    Class2,
    Star,
    Random,
    Rewired,
}

pub fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("`{s}` is not a rational (use p/q or a decimal)"))
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub family: Family,
    /// Class size, or node count for `random`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Edge probability for `random`, rewiring probability for `rewired`.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub leaves: Option<usize>,
    /// Uniform alpha for `star`, `random` and `rewired` (default 1/2).
    #[arg(long, value_parser = rational_arg)]
    pub alpha: Option<Rational>,
    /// Drop rewired edges that would duplicate an existing edge instead of redrawing.
    #[arg(long)]
    pub drop_duplicates: bool,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub graph: PathBuf,
    /// Comma-separated node indices.
    #[arg(long, value_delimiter = ',')]
    pub subsidize: Vec<usize>,
    /// Fixed-duration subsidy of this many steps (default: temporary).
    #[arg(long, conflicts_with = "indefinite")]
    pub fd: Option<usize>,
    /// Never remove the subsidy.
    #[arg(long)]
    pub indefinite: bool,
    /// Also print the energy of each unforced step.
    #[arg(long)]
    pub energy: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Greedy,
    Random,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    pub graph: PathBuf,
    /// tempMCC, tempBMC, fdMCC or fdBMC.
    #[arg(long, value_parser = |s: &str| s.parse::<Variant>())]
    pub variant: Variant,
    /// Budget for BMC variants.
    #[arg(long)]
    pub k: Option<usize>,
    /// Subsidy duration for fd variants.
    #[arg(long)]
    pub d: Option<usize>,
    /// Comma-separated per-node costs for MCC variants (default all 1).
    #[arg(long, value_delimiter = ',', value_parser = rational_arg)]
    pub costs: Vec<Rational>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value_t = Method::Exact)]
    pub method: Method,
    /// Nodes above which exact search refuses to run.
    #[arg(long, default_value_t = greenspread::optimize::DEFAULT_NODE_CAP)]
    pub node_cap: usize,
    /// Wall-clock budget for exact search.
    #[arg(long)]
    pub time_budget_ms: Option<u64>,
    /// Set size for `random` (default: k).
    #[arg(long)]
    pub size: Option<usize>,
    /// Number of draws for `random`.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LpModeArg {
    Scaled,
    Decimal,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value_t = LpModeArg::Scaled)]
    pub mode: LpModeArg,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// LP file written by `export-ip`.
    pub model: PathBuf,
    /// Solver output: `name value` lines.
    pub solution: PathBuf,
    /// Graph the model was built from.
    #[arg(long)]
    pub graph: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    pub config: PathBuf,
    /// Overrides the config's `output`; stdout when neither is given.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write 0 in the solve_ms column so output is byte-reproducible.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    pub graph: PathBuf,
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    let seed = cli.seed;
    match cli.command {
        Command::Gen(a) => commands::gen(&a, seed),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Optimize(a) => commands::optimize(&a, seed),
        Command::ExportIp(a) => commands::export_ip(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Experiment(a) => experiment::run(&a),
        Command::Metrics(a) => commands::metrics(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
