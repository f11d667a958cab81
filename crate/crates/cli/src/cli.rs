//! Command line surface: `forecast`, `qerror`, `ensemble`, `aggregate`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "chaincast",
    version,
    about = "Multiscale Markov-chain forecasting for sampled time series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Forecast a series and write index,lower,upper,trend CSV plus a
    /// diagnostics JSON next to it.
    Forecast(ForecastArgs),
    /// Measure the quantization (restoration) error on known data.
    Qerror(QerrorArgs),
    /// Walk-forward ensemble over several learning-set lengths.
    Ensemble(EnsembleArgs),
    /// Weighted mean of normalized series read from several CSVs.
    Aggregate(AggregateArgs),
}

/// Flags shared by every command that reads one input series.
#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input CSV path (chronological rows, header optional).
    #[arg(long)]
    pub input: PathBuf,
    /// Value column: 0-based index or header name; last column if omitted.
    #[arg(long)]
    pub column: Option<String>,
    /// Field delimiter.
    #[arg(long, default_value = ",")]
    pub delimiter: String,
}

/// Model flags; unset values fall back to the config file, then defaults.
#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    /// Flat key=value config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of quantizer states s.
    #[arg(long)]
    pub states: Option<usize>,
    /// Markov chain order r.
    #[arg(long)]
    pub order: Option<usize>,
    /// Probability distance delta for the candidate set.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Minimum observations before a history is trusted.
    #[arg(long)]
    pub nmin: Option<usize>,
    /// Forecast horizon in base steps.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Hierarchy of sampling steps: pow2 | smooth.
    #[arg(long)]
    pub hierarchy: Option<String>,
    /// Returns mode: abs | rel.
    #[arg(long)]
    pub returns: Option<String>,
    /// Quantizer method: count | width | combined.
    #[arg(long)]
    pub quantizer: Option<String>,
    /// Sigma multiplier for the combined quantizer.
    #[arg(long = "sigma-k")]
    pub sigma_k: Option<f64>,
    /// Scenario selection: lower | upper | both.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Centre-of-distribution rule: median | middle.
    #[arg(long)]
    pub center: Option<String>,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output CSV path; diagnostics JSON lands next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Also dump per-level transition tables as JSON.
    #[arg(long = "dump-transitions")]
    pub dump_transitions: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QerrorArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output JSON report path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated learning-set lengths, e.g. 256,384,512.
    #[arg(long = "learning-lengths")]
    pub learning_lengths: String,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    /// Input CSVs; repeat the flag once per series.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Value column applied to every input.
    #[arg(long)]
    pub column: Option<String>,
    /// Field delimiter.
    #[arg(long, default_value = ",")]
    pub delimiter: String,
    /// Two-column label,weight CSV; equal weights if omitted.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}
