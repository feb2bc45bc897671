use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use gradequbo::qubo::{LogicalEncoding, MonotonicityEncoding};
use gradequbo::solvers::SolverChoice;

#[derive(Debug, Parser)]
#[command(name = "gradequbo", version, about = "Credit rating scales as QUBO problems")]
pub struct Cli {
    /// Write the resolved run configuration as JSON before running.
    #[arg(long, global = true, value_name = "PATH")]
    pub save_config: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct RunFlags {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,
}

/// A complete invocation; replaying it reproduces the original outputs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub run: RunFlags,
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize, PartialEq)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    /// Generate a synthetic dataset CSV.
    Generate(GenerateArgs),
    /// List or count the rating scales of n counterparts in m grades.
    Enumerate(EnumerateArgs),
    /// Build a QUBO model file.
    Build(BuildArgs),
    /// Build (or load) a model, minimize it, decode and validate.
    Solve(SolveArgs),
    /// Confusion matrix of the soft monotonicity penalty over all scales.
    Confusion(ConfusionArgs),
    /// Time the brute-force search over a grid of sizes.
    Benchmark(BenchmarkArgs),
    /// Check every constraint on a given scale.
    Validate(ValidateArgs),
    /// Re-run a configuration saved with --save-config.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.04)]
    pub default_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Print only the number of scales.
    #[arg(long)]
    pub count_only: bool,
    /// Refuse to list more scales than this.
    #[arg(long, default_value_t = 1_000_000)]
    pub limit: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct DatasetArgs {
    /// Dataset CSV with header `index,score,default`.
    #[arg(long, conflicts_with_all = ["n", "defaults"])]
    pub dataset: Option<PathBuf>,
    /// Counterpart count of an inline dataset.
    #[arg(long, required_unless_present = "dataset")]
    pub n: Option<usize>,
    /// 1-based default positions of an inline dataset, comma separated.
    #[arg(long, value_delimiter = ',', requires = "n")]
    pub defaults: Vec<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum LogicalArg {
    Global,
    Local,
}

impl From<LogicalArg> for LogicalEncoding {
    fn from(v: LogicalArg) -> Self {
        match v {
            LogicalArg::Global => LogicalEncoding::Global,
            LogicalArg::Local => LogicalEncoding::Local,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct ModelArgs {
    #[arg(long)]
    pub m: usize,
    /// Weight preset (1 or 2).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub preset: u8,
    #[arg(long, value_enum, default_value_t = LogicalArg::Global)]
    pub logical: LogicalArg,
    /// Encode monotonicity exactly with product and slack variables.
    #[arg(long, conflicts_with = "no_monotonicity")]
    pub exact_monotonicity: bool,
    #[arg(long)]
    pub no_monotonicity: bool,
    #[arg(long)]
    pub no_concentration: bool,
    /// Drop the grade size penalty and its slack variables.
    #[arg(long)]
    pub no_thresholds: bool,
    /// Minimum grade size; defaults to max(1, n/100).
    #[arg(long)]
    pub lower: Option<usize>,
    /// Maximum grade size; defaults to ceil(15n/100).
    #[arg(long)]
    pub upper: Option<usize>,
}

impl ModelArgs {
    pub fn monotonicity(&self) -> MonotonicityEncoding {
        if self.no_monotonicity {
            MonotonicityEncoding::None
        } else if self.exact_monotonicity {
            MonotonicityEncoding::Exact
        } else {
            MonotonicityEncoding::Approximate
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct BuildArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output model file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SolverArg {
    Auto,
    Exact,
    Anneal,
}

impl From<SolverArg> for SolverChoice {
    fn from(v: SolverArg) -> Self {
        match v {
            SolverArg::Auto => SolverChoice::Auto,
            SolverArg::Exact => SolverChoice::Exact,
            SolverArg::Anneal => SolverChoice::Anneal,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleArg {
    Auto,
    Span,
    Explicit,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct SolveArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Minimize this model file instead of building one; the model flags
    /// must describe the same layout.
    #[arg(long = "model", value_name = "PATH")]
    pub model_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
    pub solver: SolverArg,
    /// Largest dimension handed to the exact solver.
    #[arg(long, default_value_t = gradequbo::solvers::DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Span)]
    pub schedule: ScheduleArg,
    #[arg(long, required_if_eq("schedule", "explicit"))]
    pub t_start: Option<f64>,
    #[arg(long, required_if_eq("schedule", "explicit"))]
    pub t_end: Option<f64>,
    /// Sweeps per restart; defaults to ten times the dimension.
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub no_group_moves: bool,
    /// Skip the staircase boundary refinement after annealing.
    #[arg(long)]
    pub no_polish: bool,
    /// Allow solving exact-monotonicity models above 30 variables.
    #[arg(long)]
    pub allow_large_exact: bool,
    /// Output JSON file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct ConfusionArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_enum, default_value_t = LogicalArg::Global)]
    pub logical: LogicalArg,
    /// Ratio mu03 / mu1; defaults to the first preset's ratio.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Write `energy,label` rows for every scale.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct BenchmarkArgs {
    /// Sizes as `n:m`, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "8:3,12:3,14:4,17:4,20:5,25:5,32:5"
    )]
    pub sizes: Vec<String>,
    #[arg(long, default_value_t = 0.1)]
    pub default_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Check only monotonicity instead of monotonicity and concentration.
    #[arg(long)]
    pub monotonicity_only: bool,
    /// Print the fitted power law `t = a * C^b`.
    #[arg(long)]
    pub fit: bool,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    /// Grade sizes, comma separated, best grade first.
    #[arg(long)]
    pub partition: String,
    #[arg(long)]
    pub lower: Option<usize>,
    #[arg(long)]
    pub upper: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub concentration_threshold: f64,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, default_value_t = 500)]
    pub homogeneity_iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct ReplayArgs {
    pub config: PathBuf,
}
