use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use netpulse_core::nn::{ActivationKind, TaskKind};

pub const DEFAULT_VAL_FRACTION: f64 = 0.2;

#[derive(Debug, Parser)]
#[command(name = "netpulse", version, about = "Traced neural-network training from the command line")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Train a network and write its trace and per-epoch metrics.
    Train(TrainArgs),
    /// Check a trace file against the event grammar and update algebra,
    /// and replay it when the run that produced it is described.
    Validate(ValidateArgs),
    /// Print the summary of a dataset.
    Inspect(InspectArgs),
    /// Run inference with a saved model or a freshly built one.
    Predict(PredictArgs),
}

/// Network and split settings. Input and output sizes come from the dataset.
#[derive(Debug, Clone, Args)]
pub struct ConfigFlags {
    /// Name of the target column (defaults to the last column).
    #[arg(long)]
    pub target: Option<String>,
    /// Comma-separated hidden layer sizes, e.g. `8` or `16,8`; empty for none.
    #[arg(long, default_value = "8", value_parser = parse_layers)]
    pub layers: HiddenLayers,
    #[arg(long, default_value = "sigmoid")]
    pub activation: ActivationKind,
    /// Learning rate.
    #[arg(long, default_value_t = 0.5)]
    pub lr: f64,
    #[arg(long, default_value_t = 100)]
    pub epochs: u32,
    /// Seeds weight initialization and the train/validation shuffle.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Share of rows held out for validation.
    #[arg(long, default_value_t = DEFAULT_VAL_FRACTION)]
    pub val_fraction: f64,
    /// Override the task inferred from the dataset.
    #[arg(long, value_parser = parse_task)]
    pub task: Option<TaskKind>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiddenLayers(pub Vec<usize>);

pub fn parse_layers(s: &str) -> Result<HiddenLayers, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(HiddenLayers(Vec::new()));
    }
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{}` is not a layer size", part.trim()))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(HiddenLayers)
}

fn parse_task(s: &str) -> Result<TaskKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "classification" => Ok(TaskKind::Classification),
        "regression" => Ok(TaskKind::Regression),
        _ => Err(format!("unknown task `{s}` (expected classification or regression)")),
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Built-in dataset name (iris, diabetes) or path to a CSV file.
    #[arg(long)]
    pub dataset: String,
    #[command(flatten)]
    pub config: ConfigFlags,
    /// Write the event trace here, one JSON event per line.
    #[arg(long)]
    pub out_trace: Option<PathBuf>,
    /// Write per-epoch metrics here as CSV.
    #[arg(long)]
    pub out_metrics: Option<PathBuf>,
    /// Write the trained model here as JSON, for `predict --model`.
    #[arg(long)]
    pub out_model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Trace file to check.
    pub trace: PathBuf,
    /// Dataset of the run; enables replay against recomputed epochs.
    #[arg(long)]
    pub dataset: Option<String>,
    #[command(flatten)]
    pub config: ConfigFlags,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    /// Built-in dataset name or path to a CSV file.
    pub dataset: String,
    /// Name of the target column (defaults to the last column).
    #[arg(long)]
    pub target: Option<String>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model written by `train --out-model`.
    #[arg(long, conflicts_with = "dataset")]
    pub model: Option<PathBuf>,
    /// Build the model from this dataset and the config flags instead.
    #[arg(long, required_unless_present = "model")]
    pub dataset: Option<String>,
    #[command(flatten)]
    pub config: ConfigFlags,
    /// With `--dataset`: skip training and use the initial weights.
    #[arg(long, conflicts_with = "model")]
    pub untrained: bool,
    /// Comma-separated raw feature values, in column order.
    #[arg(long, allow_hyphen_values = true)]
    pub inputs: String,
    /// Print the prediction as JSON.
    #[arg(long)]
    pub json: bool,
}
