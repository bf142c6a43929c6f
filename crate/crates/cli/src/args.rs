//! Command-line flags. Every flag is optional so that unset flags fall
//! through to the config file and then to the defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "advmt",
    version,
    about = "Seeded adversarial-attack experiments on a toy translation model"
)]
pub struct Cli {
    /// TOML file with one table per command, e.g. [train] or [annotate.export].
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the synthetic parallel corpus.
    Synth(SynthArgs),
    /// Train a model, optionally with an adversarial objective.
    Train(TrainArgs),
    /// Attack every sentence of a corpus.
    Attack(AttackArgs),
    /// Score attack records.
    Evaluate(EvaluateArgs),
    /// Build and rate a human-judgment batch.
    #[command(subcommand)]
    Annotate(AnnotateCommand),
    /// Correlate metrics with human ratings.
    Correlate(CorrelateArgs),
}

#[derive(Debug, Subcommand)]
pub enum AnnotateCommand {
    /// Sample annotation items from attack records.
    Export(ExportArgs),
    /// Rate items interactively on the terminal.
    Rate(RateArgs),
}

/// Either a tab-separated corpus or a pair of line-aligned files.
#[derive(Debug, Args, Serialize)]
pub struct CorpusArgs {
    /// Tab-separated source/target corpus.
    #[arg(long, value_name = "TSV")]
    pub corpus: Option<String>,
    /// Source side, one tokenized sentence per line.
    #[arg(long, value_name = "FILE")]
    pub corpus_src: Option<String>,
    /// Target side, aligned with --corpus-src.
    #[arg(long, value_name = "FILE")]
    pub corpus_tgt: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for train.tsv, valid.tsv and test.tsv.
    #[arg(long, value_name = "DIR")]
    pub out: Option<String>,
    #[command(flatten)]
    pub corpus: SplitArgs,
}

/// Split sizes; the other corpus knobs are set in the config file.
#[derive(Debug, Args, Serialize)]
pub struct SplitArgs {
    #[arg(long)]
    pub train: Option<usize>,
    #[arg(long)]
    pub valid: Option<usize>,
    #[arg(long)]
    pub test: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub corpus: CorpusArgs,
    /// Held-out corpus to report chrF on after training.
    #[arg(long, value_name = "TSV")]
    pub valid: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub label_smoothing: Option<f64>,
    #[arg(long)]
    pub d_emb: Option<usize>,
    #[arg(long)]
    pub d_hid: Option<usize>,
    #[arg(long)]
    pub max_positions: Option<usize>,
    /// Most frequent words kept per side.
    #[arg(long)]
    pub vocab_size: Option<usize>,
    /// Adversarial objective: none, unconstrained, knn or charswap.
    #[arg(long, value_name = "CONSTRAINT")]
    pub adv: Option<String>,
    /// Weight of the adversarial term.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Substitutions per adversarial sample.
    #[arg(long)]
    pub adv_swaps: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub max_scrambling: Option<usize>,
    /// Checkpoint path.
    #[arg(long, value_name = "FILE")]
    pub out: Option<String>,
    /// Loss curve CSV; defaults to <out>.loss.csv.
    #[arg(long, value_name = "FILE")]
    pub loss_csv: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct AttackArgs {
    #[arg(long, value_name = "FILE")]
    pub checkpoint: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub corpus: CorpusArgs,
    /// none (unconstrained), knn or charswap.
    #[arg(long)]
    pub constraint: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub max_scrambling: Option<usize>,
    #[arg(long)]
    pub budget: Option<usize>,
    /// Gradient normalization: sign or none.
    #[arg(long)]
    pub normalize: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Attack records, one JSON object per line.
    #[arg(long, value_name = "FILE")]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    #[arg(long, value_name = "FILE")]
    pub records: Option<String>,
    /// chrf or bleu.
    #[arg(long)]
    pub metric: Option<String>,
    /// Configuration name used in the report; defaults to the attack constraint.
    #[arg(long)]
    pub label: Option<String>,
    /// Text report; printed to stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<String>,
    /// Per-record CSV; defaults to the report path with a .csv extension.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExportArgs {
    /// Attack records, optionally as CONSTRAINT=FILE. Repeatable.
    #[arg(long, value_name = "FILE")]
    pub records: Vec<String>,
    /// Source-side items per constraint.
    #[arg(long)]
    pub per_constraint: Option<usize>,
    /// Relative shares of 1, 2 and 3 edits.
    #[arg(long, value_delimiter = ',', num_args = 3, value_name = "N,N,N")]
    pub edit_mix: Vec<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct RateArgs {
    #[arg(long, value_name = "FILE")]
    pub items: Option<String>,
    #[arg(long)]
    pub rater: Option<String>,
    /// Only rate items on which two raters in these files disagree. Repeatable.
    #[arg(long, value_name = "FILE")]
    pub disputed: Vec<String>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct CorrelateArgs {
    #[arg(long, value_name = "FILE")]
    pub items: Option<String>,
    /// Ratings files. Repeatable.
    #[arg(long, value_name = "FILE")]
    pub ratings: Vec<String>,
    /// Metrics to correlate, e.g. bleu,chrf.
    #[arg(long = "metric", value_delimiter = ',')]
    pub metrics: Vec<String>,
    #[arg(long)]
    pub resamples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Text report; printed to stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub csv: Option<String>,
}
