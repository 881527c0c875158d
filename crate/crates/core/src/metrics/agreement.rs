//! Rater agreement and token-overlap utilities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::tally::round;
use super::MetricsError;
use crate::text::token_set;

/// Fleiss's κ for an items × categories matrix of rating counts.
///
/// Every row must sum to the same rater count `r ≥ 2`. Returns `Ok(None)`
/// when chance agreement is 1 (all ratings fall in one category), where κ is
/// undefined.
pub fn fleiss_kappa(ratings: &[Vec<u64>]) -> Result<Option<f64>, MetricsError> {
    let first = ratings
        .first()
        .ok_or_else(|| MetricsError::Ratings("no items".into()))?;
    let categories = first.len();
    if categories == 0 {
        return Err(MetricsError::Ratings("no categories".into()));
    }
    let raters: u64 = first.iter().sum();
    if raters < 2 {
        return Err(MetricsError::Ratings(format!(
            "need at least two raters per item, got {raters}"
        )));
    }

    let mut column = vec![0u128; categories];
    let mut agreement = 0u128; // Σ_i (Σ_j n_ij² − r)
    for (i, row) in ratings.iter().enumerate() {
        if row.len() != categories {
            return Err(MetricsError::Ratings(format!(
                "item {i} has {} categories, expected {categories}",
                row.len()
            )));
        }
        let r: u64 = row.iter().sum();
        if r != raters {
            return Err(MetricsError::Ratings(format!(
                "item {i} has {r} ratings, expected {raters}"
            )));
        }
        let sq: u128 = row.iter().map(|&x| u128::from(x) * u128::from(x)).sum();
        agreement += sq - u128::from(raters);
        for (col, &x) in column.iter_mut().zip(row) {
            *col += u128::from(x);
        }
    }

    let items = ratings.len() as u128;
    let r = u128::from(raters);
    let p_bar = BigRational::new(BigInt::from(agreement), BigInt::from(items * r * (r - 1)));
    let total = BigInt::from(items * r);
    let p_e = BigRational::new(
        column.iter().map(|&c| BigInt::from(c) * BigInt::from(c)).sum(),
        &total * &total,
    );
    if p_e.is_one() {
        return Ok(None);
    }
    let one = BigRational::one();
    Ok(Some(round(&((p_bar - &p_e) / (one - p_e)))))
}

/// Token-set Jaccard similarity; two empty texts are identical.
pub fn jaccard_similarity(a: &str, b: &str) -> f64 {
    let (a, b) = (token_set(a), token_set(b));
    let union = a.union(&b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(&b).count() as f64 / union as f64
}
