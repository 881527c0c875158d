use serde::Serialize;

use super::MetricsError;
use crate::data::{ParaphraseBucket, Run};
use crate::exec::Execution;

/// Correctness summary of one bucket under one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketStats {
    pub problem_id: String,
    /// Predicted valid paraphrases.
    pub n: u64,
    pub n_correct: u64,
    /// `None` when the original item has no prediction.
    pub original_correct: Option<bool>,
    pub original_confidence_in_gold: Option<f64>,
}

impl BucketStats {
    pub fn theta(&self) -> f64 {
        self.n_correct as f64 / self.n as f64
    }
}

pub fn bucket_stats(bucket: &ParaphraseBucket, run: &Run) -> Result<BucketStats, MetricsError> {
    let (mut n, mut n_correct) = (0u64, 0u64);
    for item in bucket.valid_paraphrases() {
        if let Some(correct) = run.correct(&item.item_id, &bucket.gold_label) {
            n += 1;
            n_correct += u64::from(correct);
        }
    }
    if n == 0 {
        return Err(MetricsError::NoPredictedParaphrases {
            problem_id: bucket.problem_id.clone(),
        });
    }
    Ok(BucketStats {
        problem_id: bucket.problem_id.clone(),
        n,
        n_correct,
        original_correct: run.correct(&bucket.original.item_id, &bucket.gold_label),
        original_confidence_in_gold: bucket.original_confidence_in_gold,
    })
}

/// Per-bucket stats for one run, sorted by problem id.
#[derive(Debug, Clone, Default)]
pub struct StatsCollection {
    pub stats: Vec<BucketStats>,
    /// Buckets dropped for lack of predicted valid paraphrases.
    pub excluded: Vec<String>,
}

pub fn collect_stats(buckets: &[ParaphraseBucket], run: &Run, exec: Execution) -> StatsCollection {
    let results = exec.map(buckets, |b| bucket_stats(b, run));
    let mut out = StatsCollection::default();
    for r in results {
        match r {
            Ok(s) => out.stats.push(s),
            Err(MetricsError::NoPredictedParaphrases { problem_id }) => {
                log::warn!(
                    "run `{}`: bucket `{problem_id}` has no predicted valid paraphrases; excluded",
                    run.run_id
                );
                out.excluded.push(problem_id);
            }
            Err(e) => unreachable!("bucket_stats only reports missing predictions: {e}"),
        }
    }
    out.stats.sort_by(|a, b| a.problem_id.cmp(&b.problem_id));
    out.excluded.sort();
    out
}
