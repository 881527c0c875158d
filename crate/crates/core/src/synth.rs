//! Synthetic buckets and predictions with a prescribed correctness pattern.
//!
//! Three regimes share one overall accuracy but spread it differently:
//! `pure` makes every bucket all-correct or all-wrong, `uniform` gives every
//! bucket the same fraction correct, and `mixed` draws each bucket's θ from
//! `U[acc − spread, acc + spread]` before sampling correctness. Texts are
//! placeholders; only the correctness pattern is meaningful.

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Item, ParaphraseBucket, PredictionRecord, Source};

/// Label pair used for every generated bucket.
pub const LABELS: [&str; 2] = ["strengthener", "weakener"];
const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Pure,
    Uniform,
    Mixed,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Pure => "pure",
            ScenarioKind::Uniform => "uniform",
            ScenarioKind::Mixed => "mixed",
        })
    }
}

impl FromStr for ScenarioKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pure" => Ok(ScenarioKind::Pure),
            "uniform" => Ok(ScenarioKind::Uniform),
            "mixed" => Ok(ScenarioKind::Mixed),
            other => Err(format!("unknown scenario kind `{other}` (expected pure, uniform or mixed)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub n_buckets: usize,
    /// Paraphrases per bucket (the original is extra).
    pub bucket_size: usize,
    pub accuracy: f64,
    /// Half-width of the θ distribution; ignored unless `kind` is mixed.
    pub theta_spread: f64,
    pub seed: u64,
    pub run_id: String,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, n_buckets: usize, bucket_size: usize, accuracy: f64) -> Self {
        Self {
            kind,
            n_buckets,
            bucket_size,
            accuracy,
            theta_spread: 0.0,
            seed: 0,
            run_id: "synth".to_string(),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error("{what} = {value} is not an integer")]
    Integrality { what: &'static str, value: f64 },
    #[error("θ range [{lo}, {hi}] leaves [0, 1]")]
    ThetaRange { lo: f64, hi: f64 },
}

/// A generated fixture in the on-disk record shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub buckets: Vec<ParaphraseBucket>,
    pub predictions: Vec<PredictionRecord>,
}

fn integral(what: &'static str, value: f64) -> Result<u64, SynthError> {
    let r = value.round();
    if (value - r).abs() > TOLERANCE {
        return Err(SynthError::Integrality { what, value });
    }
    Ok(r as u64)
}

fn validate(spec: &ScenarioSpec) -> Result<(), SynthError> {
    if spec.n_buckets == 0 || spec.bucket_size == 0 {
        return Err(SynthError::Config("n_buckets and bucket_size must be positive".into()));
    }
    if !(0.0..=1.0).contains(&spec.accuracy) {
        return Err(SynthError::Config(format!("accuracy {} is outside [0, 1]", spec.accuracy)));
    }
    match spec.kind {
        ScenarioKind::Pure => {
            integral("accuracy · n_buckets", spec.accuracy * spec.n_buckets as f64)?;
        }
        ScenarioKind::Uniform => {
            integral("accuracy · bucket_size", spec.accuracy * spec.bucket_size as f64)?;
        }
        ScenarioKind::Mixed => {
            let s = spec.theta_spread;
            if !s.is_finite() || s < 0.0 {
                return Err(SynthError::Config(format!("theta_spread {s} must be non-negative")));
            }
            let (lo, hi) = (spec.accuracy - s, spec.accuracy + s);
            if lo < -TOLERANCE || hi > 1.0 + TOLERANCE {
                return Err(SynthError::ThetaRange { lo, hi });
            }
        }
    }
    Ok(())
}

pub fn generate_scenario(spec: &ScenarioSpec) -> Result<Scenario, SynthError> {
    validate(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (nb, size) = (spec.n_buckets, spec.bucket_size);

    // Per-bucket paraphrase correctness plus the original's correctness.
    let mut patterns: Vec<(Vec<bool>, bool)> = Vec::with_capacity(nb);
    match spec.kind {
        ScenarioKind::Pure => {
            let k = integral("", spec.accuracy * nb as f64).expect("validated") as usize;
            let mut flags: Vec<bool> = (0..nb).map(|i| i < k).collect();
            flags.shuffle(&mut rng);
            patterns.extend(flags.into_iter().map(|ok| (vec![ok; size], ok)));
        }
        ScenarioKind::Uniform => {
            let k = integral("", spec.accuracy * size as f64).expect("validated") as usize;
            for _ in 0..nb {
                let mut row = vec![false; size];
                for i in index::sample(&mut rng, size, k) {
                    row[i] = true;
                }
                let orig = rng.random_bool(spec.accuracy);
                patterns.push((row, orig));
            }
        }
        ScenarioKind::Mixed => {
            let (lo, hi) = (spec.accuracy - spec.theta_spread, spec.accuracy + spec.theta_spread);
            for _ in 0..nb {
                let theta = if hi > lo {
                    rng.random_range(lo..=hi).clamp(0.0, 1.0)
                } else {
                    spec.accuracy
                };
                let row = (0..size).map(|_| rng.random_bool(theta)).collect();
                let orig = rng.random_bool(theta);
                patterns.push((row, orig));
            }
        }
    }

    let width = nb.to_string().len().max(4);
    let mut buckets = Vec::with_capacity(nb);
    let mut predictions = Vec::with_capacity(nb * (size + 1));
    for (b, (row, orig_ok)) in patterns.into_iter().enumerate() {
        let problem_id = format!("synth-{b:0width$}");
        let gold = rng.random_range(0..2usize);
        let mut predict = |item_id: &str, ok: bool, rng: &mut ChaCha8Rng| {
            let (label, conf) = if ok {
                (LABELS[gold], rng.random_range(0.5..1.0))
            } else {
                (LABELS[1 - gold], rng.random_range(0.0..0.5))
            };
            predictions.push(PredictionRecord {
                run_id: spec.run_id.clone(),
                item_id: item_id.to_string(),
                predicted_label: label.to_string(),
                confidence_in_gold: conf,
            });
        };
        let original = Item {
            item_id: format!("{problem_id}-o"),
            text: format!("original {b}"),
            source: Source::Original,
            valid: true,
        };
        predict(&original.item_id, orig_ok, &mut rng);
        let mut paraphrases = Vec::with_capacity(size);
        for (j, ok) in row.into_iter().enumerate() {
            let item = Item {
                item_id: format!("{problem_id}-p{j}"),
                text: format!("paraphrase {b}.{j}"),
                source: Source::Other,
                valid: true,
            };
            predict(&item.item_id, ok, &mut rng);
            paraphrases.push(item);
        }
        buckets.push(ParaphraseBucket {
            problem_id,
            dataset_tag: "synth".to_string(),
            context: Vec::new(),
            gold_label: LABELS[gold].to_string(),
            original_confidence_in_gold: Some(rng.random::<f64>()),
            original,
            paraphrases,
        });
    }
    Ok(Scenario { buckets, predictions })
}
