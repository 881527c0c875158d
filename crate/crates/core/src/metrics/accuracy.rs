use serde::Serialize;

use super::tally::{round, Tally, THETA};
use super::{check_unit, BucketStats, MetricsError, Weighting};
use crate::data::{ParaphraseBucket, Run};

/// The uncorrected accuracy columns of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccuracyPanel {
    /// Accuracy on original items; `None` if no original has a prediction.
    pub original: Option<f64>,
    /// Full test-set accuracy, supplied by the caller.
    pub test: Option<f64>,
    /// Mean paraphrase correctness under the active weighting.
    pub bucket: f64,
}

pub fn original_accuracy(buckets: &[ParaphraseBucket], run: &Run) -> Option<f64> {
    let (mut total, mut correct) = (0u64, 0u64);
    for b in buckets {
        if let Some(ok) = run.correct(&b.original.item_id, &b.gold_label) {
            total += 1;
            correct += u64::from(ok);
        }
    }
    if total == 0 {
        log::warn!("run `{}`: no original item has a prediction; A_O absent", run.run_id);
        return None;
    }
    Some(correct as f64 / total as f64)
}

/// `E_w[θ]`: mean paraphrase correctness under the given weighting.
pub fn bucket_accuracy(stats: &[BucketStats], w: Weighting) -> Result<f64, MetricsError> {
    if stats.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(round(&Tally::from_stats(stats).expect(w, THETA)))
}

pub fn accuracy_panel(
    buckets: &[ParaphraseBucket],
    stats: &[BucketStats],
    run: &Run,
    w: Weighting,
    test_accuracy: Option<f64>,
) -> Result<AccuracyPanel, MetricsError> {
    if let Some(t) = test_accuracy {
        check_unit("test accuracy", t)?;
    }
    Ok(AccuracyPanel {
        original: original_accuracy(buckets, run),
        test: test_accuracy,
        bucket: bucket_accuracy(stats, w)?,
    })
}
