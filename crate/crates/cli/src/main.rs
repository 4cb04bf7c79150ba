//! `algest`: construct, reduce and solve algebraic estimating equations.

mod commands;
mod config;
mod golden;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "algest", version, about = "Algebraic second-order efficient estimators")]
struct Cli {
    /// TOML file with defaults (see algest.toml); flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an estimating system and print it in the exchange grammar.
    Construct(ConstructArgs),
    /// Reduce an MLE system modulo I₂ or I₃ and certify the result.
    Reduce(ReduceArgs),
    /// Solve a system by total-degree homotopy at given data.
    Solve(SolveArgs),
    /// Run a Monte-Carlo experiment and write aggregate CSV.
    Simulate(SimulateArgs),
    /// Time repeated solves of several estimators on the same data.
    Bench(BenchArgs),
    /// Run the golden-vector and certificate checks.
    Selftest,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// periodic-gaussian, log-marginal or toy-linear.
    #[arg(long)]
    pub model: Option<String>,
    /// Rational perturbation constant, or `symbolic`.
    #[arg(long)]
    pub c: Option<String>,
    /// Ceiling on the Gröbner basis size.
    #[arg(long)]
    pub max_basis: Option<usize>,
    /// Ceiling on the total degree of basis elements.
    #[arg(long)]
    pub max_degree: Option<u32>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct TrackerArgs {
    /// Seed for the start system and γ (and the sampler in simulate).
    #[arg(long)]
    pub seed: Option<u64>,
    /// First step size in t.
    #[arg(long)]
    pub initial_step: Option<f64>,
    /// Step size below which a path is abandoned.
    #[arg(long)]
    pub min_step: Option<f64>,
    /// Newton step tolerance of the corrector.
    #[arg(long)]
    pub newton_tol: Option<f64>,
    /// Backward error an endpoint must reach to count as converged.
    #[arg(long)]
    pub refine_tol: Option<f64>,
    /// Predictor steps allowed per path.
    #[arg(long)]
    pub max_steps: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub common: Common,
    /// mle, first-order, second-order, reduced-first-order or reduced-second-order.
    #[arg(long)]
    pub clazz: Option<String>,
    /// System file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also print the published form and the proportionality factor.
    #[arg(long)]
    pub show_golden: bool,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub common: Common,
    /// Order of the reduction ideal.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub k: u8,
    /// MLE system file; built from --model when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Reduced system file with its certificate; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also print the published reduced forms and proportionality factors.
    #[arg(long)]
    pub show_golden: bool,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub tracker: TrackerArgs,
    /// Estimator class of the system to build.
    #[arg(long)]
    pub clazz: Option<String>,
    /// System file; built from --model and --clazz when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Comma-separated sufficient-statistic mean.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub data: Option<Vec<f64>>,
    /// Per-path CSV report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub tracker: TrackerArgs,
    /// Parameters (periodic-gaussian, toy-linear) or η (log-marginal).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub truth: Option<Vec<f64>>,
    /// Comma-separated estimator names, e.g. mle,reduced-second-order,mle+bc.
    #[arg(long, value_delimiter = ',')]
    pub estimators: Option<Vec<String>>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<u64>>,
    /// Monte-Carlo trials per sample size.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Aggregate CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Long-format CSV (N, estimator, metric, value).
    #[arg(long)]
    pub long: Option<PathBuf>,
    /// Record zero solve times so output is byte-reproducible.
    #[arg(long)]
    pub no_timing: bool,
    /// Use X̄ = η* instead of sampling.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub tracker: TrackerArgs,
    /// Estimator classes to time.
    #[arg(long, value_delimiter = ',')]
    pub clazz: Option<Vec<String>>,
    /// Comma-separated sufficient-statistic mean.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub data: Option<Vec<f64>>,
    /// Timed solves per class.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Timing CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("ALGEST_THREADS") {
        let n: usize = v.parse().map_err(|_| CliError::Usage(format!("ALGEST_THREADS must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let cfg = commands::load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Construct(a) => commands::construct(&cfg, a),
        Command::Reduce(a) => commands::reduce(&cfg, a),
        Command::Solve(a) => commands::solve(&cfg, a),
        Command::Simulate(a) => commands::simulate(&cfg, a),
        Command::Bench(a) => commands::bench(&cfg, a),
        Command::Selftest => commands::selftest(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
