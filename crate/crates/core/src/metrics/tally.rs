//! Integer sufficient statistics for bucket correctness.
//!
//! A bucket with `n` predicted paraphrases and `c` correct ones has
//! `θ = c/n`. Every metric used here is a weighted expectation of a quadratic
//! polynomial in θ, so the per-size sums `(#buckets, Σc, Σc²)` determine it
//! exactly.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{BucketStats, Weighting};

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ClassSums {
    pub buckets: u128,
    pub correct: u128,
    pub correct_sq: u128,
}

/// `k0 + k1·θ + k2·θ²`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Quadratic(pub i64, pub i64, pub i64);

pub(crate) const THETA: Quadratic = Quadratic(0, 1, 0);
pub(crate) const THETA_SQ: Quadratic = Quadratic(0, 0, 1);
pub(crate) const MISS_SQ: Quadratic = Quadratic(1, -2, 1);
pub(crate) const FLIP: Quadratic = Quadratic(0, 1, -1);

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub(crate) struct Tally {
    classes: BTreeMap<u64, ClassSums>,
}

fn big(x: impl Into<BigInt>) -> BigInt {
    x.into()
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

pub(crate) fn round(r: &BigRational) -> f64 {
    r.to_f64().expect("tally ratios are bounded and finite")
}

impl Tally {
    pub fn add(&mut self, n: u64, correct: u64) {
        debug_assert!(n >= 1 && correct <= n);
        let e = self.classes.entry(n).or_default();
        e.buckets += 1;
        e.correct += u128::from(correct);
        e.correct_sq += u128::from(correct) * u128::from(correct);
    }

    pub fn from_stats<'a>(stats: impl IntoIterator<Item = &'a BucketStats>) -> Self {
        let mut t = Tally::default();
        for s in stats {
            t.add(s.n, s.n_correct);
        }
        t
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn buckets(&self) -> u128 {
        self.classes.values().map(|c| c.buckets).sum()
    }

    pub fn items(&self) -> u128 {
        self.classes.iter().map(|(&n, c)| u128::from(n) * c.buckets).sum()
    }

    pub fn correct(&self) -> u128 {
        self.classes.values().map(|c| c.correct).sum()
    }

    /// Unnormalized weight mass: bucket count or paraphrase count.
    pub fn weight(&self, w: Weighting) -> BigInt {
        match w {
            Weighting::Uniform => big(self.buckets()),
            Weighting::Size => big(self.items()),
        }
    }

    /// `Σ_b u_b · q(θ_b)` with `u_b = 1` (uniform) or `n_b` (size).
    pub fn weighted_sum(&self, w: Weighting, q: Quadratic) -> BigRational {
        let mut acc = BigRational::zero();
        for (&n, c) in &self.classes {
            let n_big = big(n);
            // Σ q(c/n) · n² = k0·B·n² + k1·n·Σc + k2·Σc²
            let num = big(q.0) * big(c.buckets) * &n_big * &n_big
                + big(q.1) * &n_big * big(c.correct)
                + big(q.2) * big(c.correct_sq);
            let den = match w {
                Weighting::Uniform => &n_big * &n_big,
                Weighting::Size => n_big,
            };
            acc += ratio(num, den);
        }
        acc
    }

    pub fn expect(&self, w: Weighting, q: Quadratic) -> BigRational {
        debug_assert!(!self.is_empty());
        self.weighted_sum(w, q) / BigRational::from_integer(self.weight(w))
    }

    /// Weighted sum and weight of the without-replacement pair agreement,
    /// restricted to buckets with at least two predicted paraphrases.
    pub fn pair_agreement(&self, w: Weighting) -> (BigRational, BigInt) {
        let mut sum = BigRational::zero();
        let mut weight = BigInt::zero();
        for (&n, c) in self.classes.range(2..) {
            let n_big = big(n);
            // Σ [c(c−1) + (n−c)(n−c−1)] = 2Σc² − 2nΣc + (n²−n)·B
            let num = big(2) * big(c.correct_sq) - big(2) * &n_big * big(c.correct)
                + (&n_big * &n_big - &n_big) * big(c.buckets);
            let pairs = &n_big * (&n_big - 1);
            match w {
                Weighting::Uniform => {
                    sum += ratio(num, pairs);
                    weight += big(c.buckets);
                }
                Weighting::Size => {
                    sum += ratio(num, &n_big - 1);
                    weight += &n_big * big(c.buckets);
                }
            }
        }
        (sum, weight)
    }
}
