//! Domain types and the on-disk record formats.
//!
//! `buckets.jsonl` holds one [`BucketRecord`] per line; `predictions.jsonl`
//! holds one [`PredictionRecord`] per line. Loading validates every record and
//! reports the offending line on failure.

mod buckets;
mod error;
mod predictions;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use buckets::{load_buckets, read_buckets, write_buckets, BucketRecord};
pub use error::DataError;
pub use predictions::{
    load_predictions, read_predictions, write_predictions, Prediction, PredictionRecord, Run,
    RunTable,
};

/// Where an item's text came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Original,
    Human,
    Qcpg,
    Gpt3,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub item_id: String,
    pub text: String,
    pub source: Source,
    /// Items failing validation are kept on load but excluded from every metric.
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextTurn {
    pub role: String,
    pub text: String,
}

/// One reasoning problem: its original phrasing plus paraphrases, all sharing
/// `gold_label`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParaphraseBucket {
    pub problem_id: String,
    pub dataset_tag: String,
    pub context: Vec<ContextTurn>,
    pub gold_label: String,
    /// Stratification key: the analysis model's confidence in the gold label
    /// on the original item.
    pub original_confidence_in_gold: Option<f64>,
    pub original: Item,
    pub paraphrases: Vec<Item>,
}

impl ParaphraseBucket {
    pub fn valid_paraphrases(&self) -> impl Iterator<Item = &Item> {
        self.paraphrases.iter().filter(|item| item.valid)
    }

    pub fn has_valid_paraphrases(&self) -> bool {
        self.valid_paraphrases().next().is_some()
    }

    /// Original item followed by every valid paraphrase.
    pub fn valid_items(&self) -> impl Iterator<Item = &Item> {
        std::iter::once(&self.original)
            .filter(|item| item.valid)
            .chain(self.valid_paraphrases())
    }
}

/// The two label strings of a binary task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelAlphabet([String; 2]);

impl LabelAlphabet {
    pub fn new(a: impl Into<String>, b: impl Into<String>) -> Result<Self, DataError> {
        let (a, b) = (a.into(), b.into());
        if a == b {
            return Err(DataError::Alphabet(format!(
                "label alphabet needs two distinct symbols, got `{a}` twice"
            )));
        }
        Ok(Self([a, b]))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.0.iter().any(|l| l == label)
    }

    pub fn labels(&self) -> &[String; 2] {
        &self.0
    }
}

impl std::str::FromStr for LabelAlphabet {
    type Err = DataError;

    /// Parses `a,b`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split(',').map(str::trim).collect::<Vec<_>>().as_slice() {
            [a, b] if !a.is_empty() && !b.is_empty() => Self::new(*a, *b),
            _ => Err(DataError::Alphabet(format!(
                "expected two comma-separated labels, got `{s}`"
            ))),
        }
    }
}

/// Labels observed so far per dataset tag; a dataset may never exceed two.
#[derive(Debug, Clone, Default)]
pub(crate) struct LabelsSeen {
    by_dataset: BTreeMap<String, BTreeSet<String>>,
    fixed: Option<LabelAlphabet>,
}

impl LabelsSeen {
    pub(crate) fn new(fixed: Option<LabelAlphabet>) -> Self {
        Self {
            by_dataset: BTreeMap::new(),
            fixed,
        }
    }

    pub(crate) fn from_buckets(buckets: &[ParaphraseBucket]) -> Self {
        let mut seen = Self::default();
        for b in buckets {
            seen.by_dataset
                .entry(b.dataset_tag.clone())
                .or_default()
                .insert(b.gold_label.clone());
        }
        seen
    }

    /// Records `label` for `dataset`; on violation returns the labels that
    /// would have been seen.
    pub(crate) fn admit(&mut self, dataset: &str, label: &str) -> Result<(), Vec<String>> {
        if let Some(fixed) = &self.fixed {
            if !fixed.contains(label) {
                return Err(fixed.labels().to_vec());
            }
        }
        let set = self.by_dataset.entry(dataset.to_string()).or_default();
        if set.contains(label) {
            return Ok(());
        }
        if set.len() >= 2 {
            let mut labels: Vec<String> = set.iter().cloned().collect();
            labels.push(label.to_string());
            return Err(labels);
        }
        set.insert(label.to_string());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_parsing() {
        let a: LabelAlphabet = "strengthener, weakener".parse().unwrap();
        assert!(a.contains("weakener"));
        assert!("x".parse::<LabelAlphabet>().is_err());
        assert!("x,x".parse::<LabelAlphabet>().is_err());
    }

    #[test]
    fn third_label_is_rejected_per_dataset() {
        let mut seen = LabelsSeen::default();
        seen.admit("snli", "S").unwrap();
        seen.admit("snli", "W").unwrap();
        seen.admit("atomic", "X").unwrap();
        assert!(seen.admit("snli", "Q").is_err());
    }
}
