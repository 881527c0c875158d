use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{lexical_distance, syntactic_distance, ParseTree};
use crate::data::DataError;
use crate::{jsonl, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairSource {
    Human,
    Automatic,
}

impl fmt::Display for PairSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairSource::Human => "human",
            PairSource::Automatic => "automatic",
        })
    }
}

fn default_tag() -> String {
    "all".to_string()
}

/// One original/paraphrase pair. Records without a `dataset_tag` are grouped
/// under `"all"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParaphrasePairRecord {
    pub problem_id: String,
    #[serde(default = "default_tag")]
    pub dataset_tag: String,
    pub original_text: String,
    pub paraphrase_text: String,
    pub source: PairSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_tree: Option<ParseTree>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paraphrase_tree: Option<ParseTree>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantic_score: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairMetrics {
    pub lex: f64,
    /// Present only when both trees are.
    pub syn: Option<f64>,
    pub sem: Option<f64>,
}

pub fn pair_metrics(pair: &ParaphrasePairRecord) -> PairMetrics {
    let syn = match (&pair.original_tree, &pair.paraphrase_tree) {
        (Some(a), Some(b)) => Some(syntactic_distance(a, b)),
        _ => None,
    };
    PairMetrics {
        lex: lexical_distance(&pair.original_text, &pair.paraphrase_text),
        syn,
        sem: pair.semantic_score,
    }
}

/// Means over one `(dataset_tag, source)` group. Each mean skips pairs
/// lacking that metric and is absent when no pair has it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversitySummary {
    pub dataset_tag: String,
    pub source: PairSource,
    pub mean_lex: f64,
    pub mean_syn: Option<f64>,
    pub mean_sem: Option<f64>,
    pub n_pairs: usize,
}

#[derive(Default)]
struct Acc {
    lex: Vec<f64>,
    syn: Vec<f64>,
    sem: Vec<f64>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Groups are returned sorted by dataset tag, then human before automatic.
/// Values are summed in input order, so the result does not depend on `exec`.
pub fn summarize_diversity(pairs: &[ParaphrasePairRecord], exec: Execution) -> Vec<DiversitySummary> {
    let metrics = exec.map(pairs, pair_metrics);
    let mut groups: BTreeMap<(&str, PairSource), Acc> = BTreeMap::new();
    for (pair, m) in pairs.iter().zip(&metrics) {
        let acc = groups.entry((&pair.dataset_tag, pair.source)).or_default();
        acc.lex.push(m.lex);
        acc.syn.extend(m.syn);
        acc.sem.extend(m.sem);
    }
    groups
        .into_iter()
        .map(|((tag, source), acc)| DiversitySummary {
            dataset_tag: tag.to_string(),
            source,
            mean_lex: mean(&acc.lex).expect("every group has at least one pair"),
            mean_syn: mean(&acc.syn),
            mean_sem: mean(&acc.sem),
            n_pairs: acc.lex.len(),
        })
        .collect()
}

fn pct(x: Option<f64>) -> String {
    x.map(|v| format!("{:.1}", 100.0 * v)).unwrap_or_default()
}

/// `dataset,source,lex,syn,sem,n_pairs` with metrics as percentages to one
/// decimal; absent means are empty cells.
pub fn write_summary_csv<W: Write>(mut w: W, rows: &[DiversitySummary]) -> io::Result<()> {
    writeln!(w, "dataset,source,lex,syn,sem,n_pairs")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.dataset_tag,
            r.source,
            pct(Some(r.mean_lex)),
            pct(r.mean_syn),
            pct(r.mean_sem),
            r.n_pairs
        )?;
    }
    Ok(())
}

pub fn load_pairs(path: &Path) -> Result<Vec<ParaphrasePairRecord>, DataError> {
    let reader = jsonl::open(path).map_err(|e| DataError::io(path, e))?;
    read_pairs(reader, &path.display().to_string())
}

pub fn read_pairs<R: BufRead>(reader: R, origin: &str) -> Result<Vec<ParaphrasePairRecord>, DataError> {
    let lines = jsonl::read_lines::<ParaphrasePairRecord, _>(reader)
        .map_err(|e| DataError::from_line_error(origin, e))?;
    let mut out = Vec::with_capacity(lines.len());
    for line in lines {
        if let Some(s) = line.value.semantic_score {
            if !s.is_finite() {
                return Err(DataError::Malformed {
                    origin: origin.to_string(),
                    line: line.number,
                    message: format!("semantic_score {s} is not finite"),
                });
            }
        }
        out.push(line.value);
    }
    if out.is_empty() {
        log::warn!("{origin}: no paraphrase pairs");
    }
    Ok(out)
}
