//! The P_C family and its supporting statistics.
//!
//! Everything here is a pure function of per-bucket correctness counts. Those
//! counts are folded into integer tallies and every expectation is evaluated
//! exactly over the rationals before a single rounding to `f64`.

mod accuracy;
mod agreement;
mod bucket;
mod consistency;
mod strata;
mod tally;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use accuracy::{accuracy_panel, bucket_accuracy, original_accuracy, AccuracyPanel};
pub use agreement::{fleiss_kappa, jaccard_similarity};
pub use bucket::{bucket_stats, collect_stats, BucketStats, StatsCollection};
pub use consistency::{
    estimate_pc, estimate_pc_flip, iso_pvap_curve, min_pc, pvap, vap, variance_decomposition,
    VarianceDecomposition,
};
pub use strata::{corrected_metrics, decile_of, CorrectedMetrics, StratumDistribution, DECILE_EDGES};

/// How buckets are weighted in expectations over buckets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// Every bucket (reasoning problem) counts once.
    #[default]
    Uniform,
    /// Buckets count in proportion to their number of predicted paraphrases.
    Size,
}

/// Estimator used for P_C.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// `E[θ²] + E[(1−θ)²]`, i.e. ordered pairs drawn with replacement.
    #[default]
    Plugin,
    /// Pairs of distinct paraphrases, drawn without replacement.
    UnbiasedPairs,
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::Uniform => "uniform",
            Weighting::Size => "size",
        })
    }
}

impl FromStr for Weighting {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Weighting::Uniform),
            "size" => Ok(Weighting::Size),
            _ => Err(format!("unknown weighting `{s}` (expected uniform or size)")),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Plugin => "plugin",
            Estimator::UnbiasedPairs => "unbiased_pairs",
        })
    }
}

impl FromStr for Estimator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plugin" => Ok(Estimator::Plugin),
            "unbiased_pairs" | "unbiased-pairs" => Ok(Estimator::UnbiasedPairs),
            _ => Err(format!("unknown estimator `{s}` (expected plugin or unbiased_pairs)")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no bucket statistics to aggregate")]
    Empty,
    #[error("bucket `{problem_id}` has no predicted valid paraphrases")]
    NoPredictedParaphrases { problem_id: String },
    #[error("unbiased_pairs needs at least one bucket with two or more predicted paraphrases")]
    NoPairs,
    #[error("bucket `{problem_id}` has no original_confidence_in_gold; cannot stratify")]
    MissingConfidence { problem_id: String },
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("invalid stratum distribution: {0}")]
    Distribution(String),
    #[error("invalid rating matrix: {0}")]
    Ratings(String),
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<(), MetricsError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(MetricsError::OutOfRange { name, value })
    }
}
