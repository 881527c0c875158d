//! `paracons` command-line front end.
//!
//! Every subcommand writes its outputs plus a `manifest.json` into `--out`.
//! Exit codes: 0 success, 1 usage or input error, 2 internal invariant
//! violation.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use paracons::metrics::{Estimator, Weighting};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "paracons", version, about = "Paraphrastic consistency metrics and dataset tooling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score every run in a predictions file against its buckets.
    Eval(EvalArgs),
    /// Combine several runs into one plot-ready table.
    Sweep(SweepArgs),
    /// Adversarially filter embedded examples into easy and hard sets.
    Aflite(AfliteArgs),
    /// Round-robin sample easy/hard candidates across confidence deciles.
    Stratify(StratifyArgs),
    /// Lexical, syntactic and semantic diversity of paraphrase pairs.
    Diversity(DiversityArgs),
    /// Split buckets by a partial-input model and score each subset.
    ArtifactSplit(ArtifactArgs),
    /// Generate a synthetic bucket/prediction fixture.
    Synth(SynthArgs),
    /// Emit min-P_C and iso-PVAP curves.
    Curves(CurvesArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct MetricArgs {
    /// Bucket weighting in expectations.
    #[arg(long, default_value = "uniform")]
    pub weighting: Weighting,
    /// P_C estimator: plugin or unbiased_pairs.
    #[arg(long, default_value = "plugin")]
    pub estimator: Estimator,
    /// Reference decile distribution (JSON) for the corrected columns.
    #[arg(long)]
    pub reference: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub buckets: PathBuf,
    #[arg(long)]
    pub predictions: PathBuf,
    /// Fixed binary label alphabet, e.g. `strengthener,weakener`.
    #[arg(long)]
    pub labels: Option<String>,
    #[command(flatten)]
    pub metrics: MetricArgs,
    /// Request corrected columns; without --reference they are omitted with a warning.
    #[arg(long)]
    pub corrected: bool,
    /// Only evaluate this run id.
    #[arg(long)]
    pub run: Option<String>,
    /// Full test-set accuracy, `VALUE` for every run or `RUN=VALUE`. Repeatable.
    #[arg(long = "test-accuracy")]
    pub test_accuracy: Vec<String>,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    /// JSON file `{"runs": [{"buckets": .., "predictions": .., "reference"?: ..}]}`;
    /// relative paths resolve against the manifest's directory.
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub metrics: MetricArgs,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct AfliteArgs {
    /// JSONL of `{example_id, label, vector}`.
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub n_ensemble: usize,
    #[arg(long, default_value_t = 5000)]
    pub m_train: usize,
    #[arg(long, default_value_t = 500)]
    pub k_remove: usize,
    #[arg(long, default_value_t = 0.75)]
    pub tau: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub l2: f64,
    /// Run the ensemble on the calling thread only.
    #[arg(long)]
    pub sequential: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct StratifyArgs {
    /// JSONL of `{id, confidence_in_gold, subset}`.
    #[arg(long)]
    pub candidates: PathBuf,
    #[arg(long, default_value_t = 125)]
    pub total_per_subset: usize,
    /// Cap on selections per decile within a subset.
    #[arg(long)]
    pub quota_per_decile: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct DiversityArgs {
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long)]
    pub sequential: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ArtifactArgs {
    #[arg(long)]
    pub buckets: PathBuf,
    /// Predictions file holding both runs.
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long, default_value = "partial")]
    pub partial_run: String,
    #[arg(long, default_value = "full")]
    pub full_run: String,
    #[arg(long)]
    pub labels: Option<String>,
    #[command(flatten)]
    pub metrics: MetricArgs,
    /// Reference for the likely subset, overriding --reference.
    #[arg(long)]
    pub likely_reference: Option<PathBuf>,
    /// Reference for the unlikely subset, overriding --reference.
    #[arg(long)]
    pub unlikely_reference: Option<PathBuf>,
    /// Leave buckets without a partial-input original prediction out of both
    /// subsets instead of failing.
    #[arg(long)]
    pub allow_missing: bool,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct SynthArgs {
    /// pure, uniform or mixed.
    #[arg(long)]
    pub kind: paracons::synth::ScenarioKind,
    #[arg(long, default_value_t = 10)]
    pub n_buckets: usize,
    #[arg(long, default_value_t = 5)]
    pub bucket_size: usize,
    #[arg(long, default_value_t = 0.8)]
    pub accuracy: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta_spread: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "synth")]
    pub run_id: String,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct CurvesArgs {
    /// Accuracy grid is `i / grid` for `i = 0..=grid`.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    /// Comma-separated PVAP fractions; 1 gives the min-P_C curve.
    #[arg(long, value_delimiter = ',', default_value = "1,0.75,0.5,0.25")]
    pub fractions: Vec<f64>,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

/// A failure mapped onto the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad input or configuration (exit 1).
    Input(String),
    /// A computed value broke an invariant (exit 2).
    Invariant(String),
}

impl Failure {
    pub fn input(e: impl ToString) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };

    let result = match cli.command {
        Command::Eval(a) => commands::eval(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Aflite(a) => commands::aflite(a),
        Command::Stratify(a) => commands::stratify(a),
        Command::Diversity(a) => commands::diversity(a),
        Command::ArtifactSplit(a) => commands::artifact_split(a),
        Command::Synth(a) => commands::synth(a),
        Command::Curves(a) => commands::curves(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
