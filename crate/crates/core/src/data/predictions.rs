use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DataError, LabelsSeen, ParaphraseBucket};
use crate::jsonl;

/// Wire form of one `predictions.jsonl` line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub run_id: String,
    pub item_id: String,
    pub predicted_label: String,
    pub confidence_in_gold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub predicted_label: String,
    pub confidence_in_gold: f64,
}

impl Prediction {
    /// Correctness is never stored; it is always derived against the gold label.
    pub fn is_correct(&self, gold_label: &str) -> bool {
        self.predicted_label == gold_label
    }
}

/// All predictions of one model run, keyed by item id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Run {
    pub run_id: String,
    predictions: HashMap<String, Prediction>,
}

impl Run {
    pub fn new(run_id: impl Into<String>) -> Self {
        Self {
            run_id: run_id.into(),
            predictions: HashMap::new(),
        }
    }

    /// Returns the previous prediction if the item was already present.
    pub fn insert(&mut self, item_id: impl Into<String>, p: Prediction) -> Option<Prediction> {
        self.predictions.insert(item_id.into(), p)
    }

    pub fn get(&self, item_id: &str) -> Option<&Prediction> {
        self.predictions.get(item_id)
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }

    /// `Some(correct)` when the item has a prediction.
    pub fn correct(&self, item_id: &str, gold_label: &str) -> Option<bool> {
        self.get(item_id).map(|p| p.is_correct(gold_label))
    }

    /// Fraction of valid items across `buckets` that carry a prediction.
    pub fn coverage(&self, buckets: &[ParaphraseBucket]) -> f64 {
        let (mut total, mut hit) = (0usize, 0usize);
        for item in buckets.iter().flat_map(|b| b.valid_items()) {
            total += 1;
            hit += usize::from(self.predictions.contains_key(&item.item_id));
        }
        if total == 0 {
            0.0
        } else {
            hit as f64 / total as f64
        }
    }

    /// Records in item-id order, for writing.
    pub fn records(&self) -> Vec<PredictionRecord> {
        let mut out: Vec<PredictionRecord> = self
            .predictions
            .iter()
            .map(|(item_id, p)| PredictionRecord {
                run_id: self.run_id.clone(),
                item_id: item_id.clone(),
                predicted_label: p.predicted_label.clone(),
                confidence_in_gold: p.confidence_in_gold,
            })
            .collect();
        out.sort_by(|a, b| a.item_id.cmp(&b.item_id));
        out
    }
}

/// Predictions grouped by run id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTable {
    runs: BTreeMap<String, Run>,
}

impl RunTable {
    pub fn run(&self, run_id: &str) -> Option<&Run> {
        self.runs.get(run_id)
    }

    /// Runs in run-id order.
    pub fn runs(&self) -> impl Iterator<Item = &Run> {
        self.runs.values()
    }

    pub fn run_ids(&self) -> impl Iterator<Item = &str> {
        self.runs.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn coverage(&self, buckets: &[ParaphraseBucket]) -> BTreeMap<String, f64> {
        self.runs
            .iter()
            .map(|(id, run)| (id.clone(), run.coverage(buckets)))
            .collect()
    }

    pub fn into_runs(self) -> impl Iterator<Item = Run> {
        self.runs.into_values()
    }
}

impl FromIterator<Run> for RunTable {
    fn from_iter<I: IntoIterator<Item = Run>>(iter: I) -> Self {
        Self {
            runs: iter.into_iter().map(|r| (r.run_id.clone(), r)).collect(),
        }
    }
}

pub fn load_predictions(path: &Path, buckets: &[ParaphraseBucket]) -> Result<RunTable, DataError> {
    let reader = jsonl::open(path).map_err(|e| DataError::io(path, e))?;
    read_predictions(reader, &path.display().to_string(), buckets)
}

pub fn read_predictions<R: BufRead>(
    reader: R,
    origin: &str,
    buckets: &[ParaphraseBucket],
) -> Result<RunTable, DataError> {
    let lines = jsonl::read_lines::<PredictionRecord, _>(reader)
        .map_err(|e| DataError::from_line_error(origin, e))?;

    let dataset_of: HashMap<&str, &str> = buckets
        .iter()
        .flat_map(|b| {
            std::iter::once(&b.original)
                .chain(&b.paraphrases)
                .map(move |i| (i.item_id.as_str(), b.dataset_tag.as_str()))
        })
        .collect();
    let mut labels = LabelsSeen::from_buckets(buckets);
    let mut runs: BTreeMap<String, Run> = BTreeMap::new();

    for jsonl::Line {
        number: line,
        value: rec,
    } in lines
    {
        let Some(&dataset) = dataset_of.get(rec.item_id.as_str()) else {
            return Err(DataError::UnknownItem {
                origin: origin.into(),
                line,
                item_id: rec.item_id,
            });
        };
        if !(0.0..=1.0).contains(&rec.confidence_in_gold) {
            return Err(DataError::Confidence {
                origin: origin.into(),
                line,
                value: rec.confidence_in_gold,
            });
        }
        if let Err(seen) = labels.admit(dataset, &rec.predicted_label) {
            return Err(DataError::LabelAlphabet {
                origin: origin.into(),
                line,
                dataset_tag: dataset.to_string(),
                label: rec.predicted_label,
                labels: seen,
            });
        }
        let run = runs
            .entry(rec.run_id.clone())
            .or_insert_with(|| Run::new(rec.run_id.clone()));
        let prev = run.insert(
            rec.item_id.clone(),
            Prediction {
                predicted_label: rec.predicted_label,
                confidence_in_gold: rec.confidence_in_gold,
            },
        );
        if prev.is_some() {
            return Err(DataError::DuplicatePrediction {
                origin: origin.into(),
                line,
                run_id: rec.run_id,
                item_id: rec.item_id,
            });
        }
    }

    let table = RunTable { runs };
    for (run, cov) in table.coverage(buckets) {
        if cov < 1.0 {
            log::warn!("{origin}: run `{run}` covers {:.1}% of valid items", cov * 100.0);
        }
    }
    Ok(table)
}

pub fn write_predictions<W: Write>(writer: W, records: &[PredictionRecord]) -> std::io::Result<()> {
    jsonl::write_lines(writer, records)
}
