use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};
use serde::Serialize;

use super::tally::{round, Tally, FLIP, MISS_SQ, THETA, THETA_SQ};
use super::{check_unit, BucketStats, Estimator, MetricsError, Weighting};

fn tally(stats: &[BucketStats]) -> Result<Tally, MetricsError> {
    if stats.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(Tally::from_stats(stats))
}

/// Paraphrastic consistency: the probability that two paraphrases of the same
/// problem are both correct or both incorrect.
pub fn estimate_pc(
    stats: &[BucketStats],
    w: Weighting,
    estimator: Estimator,
) -> Result<f64, MetricsError> {
    let t = tally(stats)?;
    pc_exact(&t, w, estimator).map(|r| round(&r))
}

pub(crate) fn pc_exact(
    t: &Tally,
    w: Weighting,
    estimator: Estimator,
) -> Result<BigRational, MetricsError> {
    match estimator {
        Estimator::Plugin => Ok(t.expect(w, THETA_SQ) + t.expect(w, MISS_SQ)),
        Estimator::UnbiasedPairs => {
            let (sum, weight) = t.pair_agreement(w);
            if weight.is_zero() {
                return Err(MetricsError::NoPairs);
            }
            Ok(sum / BigRational::from_integer(weight))
        }
    }
}

/// P_C through the flip probabilities: `1 − 2·E[θ(1−θ)]`.
pub fn estimate_pc_flip(stats: &[BucketStats], w: Weighting) -> Result<f64, MetricsError> {
    let t = tally(stats)?;
    let two = BigRational::from_integer(2.into());
    Ok(round(&(BigRational::one() - two * t.expect(w, FLIP))))
}

/// Variance attributable to paraphrasing, `E[θ(1−θ)]`.
pub fn vap(stats: &[BucketStats], w: Weighting) -> Result<f64, MetricsError> {
    Ok(round(&tally(stats)?.expect(w, FLIP)))
}

/// Law-of-total-variance split of correctness over all predicted paraphrases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceDecomposition {
    pub total: f64,
    pub within: f64,
    pub between: f64,
}

pub(crate) struct ExactDecomposition {
    pub total: BigRational,
    pub within: BigRational,
    pub between: BigRational,
}

pub(crate) fn decomposition_exact(t: &Tally) -> ExactDecomposition {
    let w = Weighting::Size;
    let items = BigRational::from_integer(t.items().into());
    let p = BigRational::from_integer(t.correct().into()) / &items;
    // Pooled population variance of the 0/1 correctness values:
    // Σ_b [c_b (1−p)² + (n_b − c_b) p²] / N.
    let wrong = t.items() - t.correct();
    let one_minus_p = BigRational::one() - &p;
    let total = (BigRational::from_integer(t.correct().into()) * &one_minus_p * &one_minus_p
        + BigRational::from_integer(wrong.into()) * &p * &p)
        / items;
    let within = t.expect(w, FLIP);
    let mean = t.expect(w, THETA);
    let between = t.expect(w, THETA_SQ) - &mean * &mean;
    ExactDecomposition {
        total,
        within,
        between,
    }
}

/// Total, within-bucket (VAP) and between-bucket variance. Computed under
/// size weighting, where `total == within + between` holds exactly.
pub fn variance_decomposition(stats: &[BucketStats]) -> Result<VarianceDecomposition, MetricsError> {
    let d = decomposition_exact(&tally(stats)?);
    Ok(VarianceDecomposition {
        total: round(&d.total),
        within: round(&d.within),
        between: round(&d.between),
    })
}

/// Proportion of total variance attributable to paraphrasing (size
/// weighting). `None` when correctness has no variance at all.
pub fn pvap(stats: &[BucketStats]) -> Result<Option<f64>, MetricsError> {
    let d = decomposition_exact(&tally(stats)?);
    if d.total.is_zero() {
        return Ok(None);
    }
    Ok(Some(round(&(d.within / d.total))))
}

/// Lowest P_C reachable at accuracy `acc`: all correctness variance is
/// within-bucket variance.
pub fn min_pc(acc: f64) -> Result<f64, MetricsError> {
    iso_pvap_curve(acc, 1.0)
}

/// P_C at accuracy `acc` when a share `fraction` of the Bernoulli variance
/// `acc·(1−acc)` is attributed to paraphrasing. Evaluated exactly on the
/// given floats and rounded once.
pub fn iso_pvap_curve(acc: f64, fraction: f64) -> Result<f64, MetricsError> {
    check_unit("accuracy", acc)?;
    check_unit("fraction", fraction)?;
    let exact = |x: f64| BigRational::from_f64(x).expect("checked finite");
    let (a, f) = (exact(acc), exact(fraction));
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    Ok(round(&(&one - two * f * &a * (&one - &a))))
}
