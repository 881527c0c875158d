//! Confidence-decile stratification and the corrected metrics that undo it.

use num_rational::BigRational;
use num_traits::{FromPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::tally::{round, Tally, MISS_SQ, THETA, THETA_SQ};
use super::{check_unit, BucketStats, MetricsError, Weighting};

/// Inner decile boundaries. Bins are `[0, 0.1)`, …, `[0.8, 0.9)`, `[0.9, 1]`.
pub const DECILE_EDGES: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Decile index in `0..10` for a confidence in `[0, 1]`.
pub fn decile_of(confidence: f64) -> usize {
    DECILE_EDGES.iter().filter(|&&e| confidence >= e).count()
}

/// Probability mass over the ten confidence deciles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct StratumDistribution {
    proportions: [f64; 10],
}

/// Accepted file shapes: explicit proportions, or raw confidences to bin.
#[derive(Deserialize)]
#[serde(untagged)]
enum RawDistribution {
    Proportions { proportions: Vec<f64> },
    Confidences { confidences: Vec<f64> },
}

impl TryFrom<RawDistribution> for StratumDistribution {
    type Error = MetricsError;
    fn try_from(raw: RawDistribution) -> Result<Self, Self::Error> {
        match raw {
            RawDistribution::Proportions { proportions } => {
                let arr: [f64; 10] = proportions.try_into().map_err(|v: Vec<f64>| {
                    MetricsError::Distribution(format!("expected 10 proportions, got {}", v.len()))
                })?;
                Self::new(arr)
            }
            RawDistribution::Confidences { confidences } => Self::from_confidences(&confidences),
        }
    }
}

impl StratumDistribution {
    pub fn new(proportions: [f64; 10]) -> Result<Self, MetricsError> {
        if proportions.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(MetricsError::Distribution(format!(
                "proportions must be finite and non-negative: {proportions:?}"
            )));
        }
        let sum: f64 = proportions.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(MetricsError::Distribution(format!(
                "proportions sum to {sum}, expected 1"
            )));
        }
        Ok(Self { proportions })
    }

    /// Empirical decile distribution of a set of confidences.
    pub fn from_confidences(confidences: &[f64]) -> Result<Self, MetricsError> {
        if confidences.is_empty() {
            return Err(MetricsError::Distribution("no confidences".into()));
        }
        let mut counts = [0usize; 10];
        for &c in confidences {
            check_unit("confidence", c)?;
            counts[decile_of(c)] += 1;
        }
        Ok(Self::from_counts(&counts))
    }

    /// Decile distribution of the sampled buckets' original confidences.
    pub fn of_stats(stats: &[BucketStats]) -> Result<Self, MetricsError> {
        let confs = stats
            .iter()
            .map(|s| {
                s.original_confidence_in_gold
                    .ok_or_else(|| MetricsError::MissingConfidence {
                        problem_id: s.problem_id.clone(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_confidences(&confs)
    }

    fn from_counts(counts: &[usize; 10]) -> Self {
        let total: usize = counts.iter().sum();
        Self {
            proportions: counts.map(|c| c as f64 / total as f64),
        }
    }

    pub fn proportions(&self) -> &[f64; 10] {
        &self.proportions
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrectedMetrics {
    pub p_c: f64,
    pub a_bucket: f64,
    /// Reference mass that fell on deciles with no sampled buckets and was
    /// spread over the others.
    pub redistributed_mass: f64,
}

/// Re-weights buckets so the sample's decile mix matches `reference`, then
/// recomputes the plugin P_C and bucket accuracy.
///
/// Each bucket's weight is multiplied by `reference(d) / sample(d)` for its
/// decile `d` and renormalized. Reference mass on deciles without sampled
/// buckets is spread over the non-empty deciles in proportion to their own
/// reference mass (or their sample mass, if they have none).
pub fn corrected_metrics(
    stats: &[BucketStats],
    reference: &StratumDistribution,
    w: Weighting,
) -> Result<CorrectedMetrics, MetricsError> {
    if stats.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut strata: [Tally; 10] = Default::default();
    for s in stats {
        let c = s
            .original_confidence_in_gold
            .ok_or_else(|| MetricsError::MissingConfidence {
                problem_id: s.problem_id.clone(),
            })?;
        check_unit("original_confidence_in_gold", c)?;
        strata[decile_of(c)].add(s.n, s.n_correct);
    }

    let exact = |p: f64| BigRational::from_f64(p).expect("validated finite");
    let reference: Vec<BigRational> = reference.proportions.iter().map(|&p| exact(p)).collect();
    let counts: Vec<BigRational> = strata
        .iter()
        .map(|t| BigRational::from_integer(t.buckets().into()))
        .collect();

    let (mut kept, mut lost) = (BigRational::zero(), BigRational::zero());
    for (r, n) in reference.iter().zip(&counts) {
        if n.is_zero() {
            lost += r;
        } else {
            kept += r;
        }
    }
    let effective: Vec<BigRational> = if lost.is_zero() {
        reference
    } else if !kept.is_zero() {
        let grow = (&kept + &lost) / &kept;
        reference
            .iter()
            .zip(&counts)
            .map(|(r, n)| if n.is_zero() { BigRational::zero() } else { r * &grow })
            .collect()
    } else {
        let total: BigRational = counts.iter().sum();
        counts.iter().map(|n| n * &lost / &total).collect()
    };
    if !lost.is_zero() {
        log::warn!(
            "reference mass {:.4} lies on deciles with no sampled buckets; redistributed",
            round(&lost)
        );
    }

    let mut num_pc = BigRational::zero();
    let mut num_acc = BigRational::zero();
    let mut den = BigRational::zero();
    for ((t, r), n) in strata.iter().zip(&effective).zip(&counts) {
        if n.is_zero() {
            continue;
        }
        let scale = r / n;
        num_pc += &scale * (t.weighted_sum(w, THETA_SQ) + t.weighted_sum(w, MISS_SQ));
        num_acc += &scale * t.weighted_sum(w, THETA);
        den += &scale * BigRational::from_integer(t.weight(w));
    }
    Ok(CorrectedMetrics {
        p_c: round(&(num_pc / &den)),
        a_bucket: round(&(num_acc / &den)),
        redistributed_mass: round(&lost),
    })
}
