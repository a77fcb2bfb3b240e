use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use resonator::bench::PRESETS_ENV;

#[derive(Debug, Parser)]
#[command(
    name = "resonator",
    version,
    about = "Resonator-network factorization and capacity benchmarks"
)]
pub struct Cli {
    /// More log output on stderr (-v info, -vv debug, -vvv trace).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factorize one seeded planted instance and print the decode.
    Factorize(SingleArgs),
    /// Sweep search-space sizes and write a capacity report.
    Sweep(SweepArgs),
    /// Sweep and print the operational capacity.
    Capacity(SweepArgs),
    /// Cross-check factorizer decodes against brute-force search.
    OracleCheck(OracleArgs),
    /// Print the hyperparameter preset table or look up one entry.
    Presets(PresetArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Brn,
    Imf,
    Acf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Factorizer and preset flags shared by every running subcommand. Each
/// overrides the config-file key of the same name (snake_case).
#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    /// JSON config file; flags take precedence over its keys.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,

    /// Number of factors.
    #[arg(short = 'F', long = "factors", value_name = "F")]
    pub factors: Option<usize>,

    /// Dimension (defaults to the preset row).
    #[arg(short = 'D', long = "dim", value_name = "D")]
    pub dim: Option<usize>,

    /// IMF noise standard deviation.
    #[arg(long)]
    pub sigma: Option<f64>,

    /// ACF bit-flip probability.
    #[arg(long)]
    pub flip_rate: Option<f64>,

    /// Attention activation threshold (BRN defaults to identity).
    #[arg(long)]
    pub activation_threshold: Option<f64>,

    #[arg(long)]
    pub convergence_threshold: Option<f64>,

    /// early or legacy.
    #[arg(long, value_name = "MODE")]
    pub convergence_mode: Option<String>,

    /// sequential or parallel.
    #[arg(long)]
    pub schedule: Option<String>,

    #[arg(long)]
    pub max_iters: Option<usize>,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Source of unspecified hyperparameters: paper or none.
    #[arg(long, value_name = "SOURCE")]
    pub preset: Option<String>,

    /// Preset table replacing the built-in one.
    #[arg(long, env = PRESETS_ENV, value_name = "PATH")]
    pub presets_path: Option<PathBuf>,

    /// f32 or f64 attention arithmetic.
    #[arg(long)]
    pub precision: Option<String>,
}

#[derive(Debug, Args)]
pub struct SingleArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Codebook size per factor.
    #[arg(short = 'M', long = "codebook-size", value_name = "M")]
    pub codebook_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Comma-separated target search-space sizes (e.g. 1e4,1e5).
    #[arg(long, alias = "sizes", value_delimiter = ',', value_parser = parse_size, value_name = "SIZES")]
    pub search_space_sizes: Option<Vec<u64>>,

    /// Trials per size.
    #[arg(long)]
    pub trials: Option<usize>,

    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub parallelism: Option<usize>,

    /// Report file (standard output when omitted).
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Report format; defaults to the output file extension, else CSV.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub single: SingleArgs,

    /// Number of seeded trials, N [default: 50].
    #[arg(long)]
    pub trials: Option<usize>,

    /// Largest search space the brute-force oracle will enumerate.
    #[arg(long, default_value_t = resonator::bench::DEFAULT_ORACLE_CAP)]
    pub oracle_cap: u64,
}

#[derive(Debug, Args)]
pub struct PresetArgs {
    /// Only rows for this factor count.
    #[arg(short = 'F', long = "factors")]
    pub factors: Option<usize>,

    /// Resolve the entry for this size (nearest row when not tabulated).
    #[arg(long, value_parser = parse_size, requires = "factors")]
    pub search_space: Option<u64>,

    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,

    #[arg(long, env = PRESETS_ENV, value_name = "PATH")]
    pub presets_path: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

/// Accepts plain integers and float literals such as `1e6` or `2.15E+08`.
pub fn parse_size(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.trim().parse::<u64>() {
        return Ok(v);
    }
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 1.0 && v < u64::MAX as f64 => Ok(v.round() as u64),
        _ => Err(format!("not a search-space size: {s:?}")),
    }
}
