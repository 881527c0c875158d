use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ContextTurn, DataError, Item, LabelAlphabet, LabelsSeen, ParaphraseBucket, Source};
use crate::jsonl;

/// Wire form of one `buckets.jsonl` line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketRecord {
    pub problem_id: String,
    pub dataset_tag: String,
    #[serde(default)]
    pub context: Vec<ContextTurn>,
    pub gold_label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_confidence_in_gold: Option<f64>,
    pub items: Vec<Item>,
}

impl From<&ParaphraseBucket> for BucketRecord {
    /// The original item is always written first.
    fn from(b: &ParaphraseBucket) -> Self {
        BucketRecord {
            problem_id: b.problem_id.clone(),
            dataset_tag: b.dataset_tag.clone(),
            context: b.context.clone(),
            gold_label: b.gold_label.clone(),
            original_confidence_in_gold: b.original_confidence_in_gold,
            items: std::iter::once(&b.original)
                .chain(&b.paraphrases)
                .cloned()
                .collect(),
        }
    }
}

pub fn load_buckets(
    path: &Path,
    alphabet: Option<LabelAlphabet>,
) -> Result<Vec<ParaphraseBucket>, DataError> {
    let reader = jsonl::open(path).map_err(|e| DataError::io(path, e))?;
    read_buckets(reader, &path.display().to_string(), alphabet)
}

pub fn read_buckets<R: BufRead>(
    reader: R,
    origin: &str,
    alphabet: Option<LabelAlphabet>,
) -> Result<Vec<ParaphraseBucket>, DataError> {
    let lines = jsonl::read_lines::<BucketRecord, _>(reader)
        .map_err(|e| DataError::from_line_error(origin, e))?;
    if lines.is_empty() {
        log::warn!("{origin}: no bucket records");
    }

    let mut problems = HashSet::new();
    let mut item_ids = HashSet::new();
    let mut labels = LabelsSeen::new(alphabet);
    let mut buckets = Vec::with_capacity(lines.len());

    for jsonl::Line {
        number: line,
        value: rec,
    } in lines
    {
        if !problems.insert(rec.problem_id.clone()) {
            return Err(DataError::DuplicateProblem {
                origin: origin.into(),
                line,
                problem_id: rec.problem_id,
            });
        }
        if let Err(seen) = labels.admit(&rec.dataset_tag, &rec.gold_label) {
            return Err(DataError::LabelAlphabet {
                origin: origin.into(),
                line,
                dataset_tag: rec.dataset_tag,
                label: rec.gold_label,
                labels: seen,
            });
        }
        if let Some(c) = rec.original_confidence_in_gold {
            if !(0.0..=1.0).contains(&c) {
                return Err(DataError::Confidence {
                    origin: origin.into(),
                    line,
                    value: c,
                });
            }
        }
        // Item ids key the prediction join, so they must be unique file-wide.
        for item in &rec.items {
            if !item_ids.insert(item.item_id.clone()) {
                return Err(DataError::DuplicateItem {
                    origin: origin.into(),
                    line,
                    item_id: item.item_id.clone(),
                });
            }
        }

        let originals = rec
            .items
            .iter()
            .filter(|i| i.source == Source::Original)
            .count();
        if originals != 1 {
            return Err(DataError::OriginalCount {
                origin: origin.into(),
                line,
                problem_id: rec.problem_id,
                count: originals,
            });
        }
        let (mut original, paraphrases): (Vec<Item>, Vec<Item>) = rec
            .items
            .into_iter()
            .partition(|i| i.source == Source::Original);
        let bucket = ParaphraseBucket {
            problem_id: rec.problem_id,
            dataset_tag: rec.dataset_tag,
            context: rec.context,
            gold_label: rec.gold_label,
            original_confidence_in_gold: rec.original_confidence_in_gold,
            original: original.remove(0),
            paraphrases,
        };
        if !bucket.has_valid_paraphrases() {
            log::warn!(
                "{origin}:{line}: bucket `{}` has no valid paraphrases and will be excluded from metrics",
                bucket.problem_id
            );
        }
        buckets.push(bucket);
    }
    Ok(buckets)
}

pub fn write_buckets<W: Write>(writer: W, buckets: &[ParaphraseBucket]) -> std::io::Result<()> {
    jsonl::write_lines(writer, buckets.iter().map(BucketRecord::from))
}
