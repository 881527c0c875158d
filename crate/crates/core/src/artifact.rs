//! Partial-input artifact analysis.
//!
//! Buckets whose original item a partial-input model (one that sees only part
//! of the problem) answers correctly are *likely* to contain an annotation
//! artifact; the rest are *unlikely*. Both runs are then scored per subset.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::data::{ParaphraseBucket, Run};
use crate::metrics::{
    bucket_accuracy, collect_stats, corrected_metrics, estimate_pc, original_accuracy, Estimator,
    MetricsError, StratumDistribution, Weighting,
};
use crate::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ArtifactSubset {
    Likely,
    Unlikely,
}

impl fmt::Display for ArtifactSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArtifactSubset::Likely => "likely",
            ArtifactSubset::Unlikely => "unlikely",
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ArtifactError {
    #[error("partial-input run `{run_id}` has no prediction for the original of {} bucket(s), first `{}`", missing.len(), missing[0])]
    MissingPartial { run_id: String, missing: Vec<String> },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Problem ids split by partial-input correctness on the original item.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ArtifactPartition {
    pub likely: Vec<String>,
    pub unlikely: Vec<String>,
    /// Buckets whose original has no partial-input prediction; in neither subset.
    pub unpartitioned: Vec<String>,
}

impl ArtifactPartition {
    pub fn ids(&self, subset: ArtifactSubset) -> &[String] {
        match subset {
            ArtifactSubset::Likely => &self.likely,
            ArtifactSubset::Unlikely => &self.unlikely,
        }
    }
}

/// Membership depends only on the partial run's predictions for originals.
pub fn partition_by_partial_input(buckets: &[ParaphraseBucket], partial: &Run) -> ArtifactPartition {
    let mut out = ArtifactPartition::default();
    for b in buckets {
        let target = match partial.correct(&b.original.item_id, &b.gold_label) {
            Some(true) => &mut out.likely,
            Some(false) => &mut out.unlikely,
            None => &mut out.unpartitioned,
        };
        target.push(b.problem_id.clone());
    }
    out.likely.sort();
    out.unlikely.sort();
    out.unpartitioned.sort();
    out
}

/// Like [`partition_by_partial_input`] but fails if any original lacks a
/// partial-input prediction.
pub fn strict_partition(buckets: &[ParaphraseBucket], partial: &Run) -> Result<ArtifactPartition, ArtifactError> {
    let p = partition_by_partial_input(buckets, partial);
    if !p.unpartitioned.is_empty() {
        return Err(ArtifactError::MissingPartial {
            run_id: partial.run_id.clone(),
            missing: p.unpartitioned,
        });
    }
    Ok(p)
}

#[derive(Debug, Clone, Default)]
pub struct ArtifactOptions {
    pub weighting: Weighting,
    pub estimator: Estimator,
    /// Reference for the corrected columns of both subsets.
    pub reference: Option<StratumDistribution>,
    /// Per-subset references; each overrides `reference` for its subset.
    pub likely_reference: Option<StratumDistribution>,
    pub unlikely_reference: Option<StratumDistribution>,
}

impl ArtifactOptions {
    fn reference_for(&self, subset: ArtifactSubset) -> Option<&StratumDistribution> {
        let own = match subset {
            ArtifactSubset::Likely => &self.likely_reference,
            ArtifactSubset::Unlikely => &self.unlikely_reference,
        };
        own.as_ref().or(self.reference.as_ref())
    }
}

/// Accuracy columns of one run on one subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunColumns {
    #[serde(rename = "A_O")]
    pub a_o: Option<f64>,
    #[serde(rename = "A_bucket")]
    pub a_bucket: Option<f64>,
    #[serde(rename = "A_bucket_corrected")]
    pub a_bucket_corrected: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetRow {
    pub subset: ArtifactSubset,
    pub n_buckets: usize,
    pub partial: RunColumns,
    pub full: RunColumns,
    /// Consistency of the full-input run.
    #[serde(rename = "P_C")]
    pub p_c: Option<f64>,
    #[serde(rename = "P_C_corrected")]
    pub p_c_corrected: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArtifactReport {
    pub partial_run: String,
    pub full_run: String,
    pub weighting: Weighting,
    pub estimator: Estimator,
    pub partition: ArtifactPartition,
    /// One row per non-empty subset, likely first.
    pub rows: Vec<SubsetRow>,
}

struct Scored {
    columns: RunColumns,
    p_c: Option<f64>,
    p_c_corrected: Option<f64>,
}

fn score(
    buckets: &[ParaphraseBucket],
    run: &Run,
    opts: &ArtifactOptions,
    reference: Option<&StratumDistribution>,
    exec: Execution,
) -> Result<Scored, MetricsError> {
    let stats = collect_stats(buckets, run, exec).stats;
    let a_o = original_accuracy(buckets, run);
    if stats.is_empty() {
        log::warn!("run `{}`: no predicted paraphrases in this subset; bucket columns absent", run.run_id);
        return Ok(Scored {
            columns: RunColumns {
                a_o,
                a_bucket: None,
                a_bucket_corrected: None,
            },
            p_c: None,
            p_c_corrected: None,
        });
    }
    let corrected = reference
        .map(|r| corrected_metrics(&stats, r, opts.weighting))
        .transpose()?;
    Ok(Scored {
        columns: RunColumns {
            a_o,
            a_bucket: Some(bucket_accuracy(&stats, opts.weighting)?),
            a_bucket_corrected: corrected.map(|c| c.a_bucket),
        },
        p_c: Some(estimate_pc(&stats, opts.weighting, opts.estimator)?),
        p_c_corrected: corrected.map(|c| c.p_c),
    })
}

pub fn artifact_report(
    partition: &ArtifactPartition,
    buckets: &[ParaphraseBucket],
    partial: &Run,
    full: &Run,
    opts: &ArtifactOptions,
    exec: Execution,
) -> Result<ArtifactReport, MetricsError> {
    let mut rows = Vec::new();
    for subset in [ArtifactSubset::Likely, ArtifactSubset::Unlikely] {
        let ids: BTreeSet<&str> = partition.ids(subset).iter().map(String::as_str).collect();
        let members: Vec<ParaphraseBucket> = buckets
            .iter()
            .filter(|b| ids.contains(b.problem_id.as_str()))
            .cloned()
            .collect();
        if members.is_empty() {
            log::warn!("artifact subset `{subset}` has no buckets; row omitted");
            continue;
        }
        let reference = opts.reference_for(subset);
        let p = score(&members, partial, opts, reference, exec)?;
        let f = score(&members, full, opts, reference, exec)?;
        rows.push(SubsetRow {
            subset,
            n_buckets: members.len(),
            partial: p.columns,
            full: f.columns,
            p_c: f.p_c,
            p_c_corrected: f.p_c_corrected,
        });
    }
    Ok(ArtifactReport {
        partial_run: partial.run_id.clone(),
        full_run: full.run_id.clone(),
        weighting: opts.weighting,
        estimator: opts.estimator,
        partition: partition.clone(),
        rows,
    })
}

fn pct(v: Option<f64>) -> String {
    v.map(|x| format!("{:.1}", 100.0 * x)).unwrap_or_default()
}

/// One line per subset, metrics as percentages to one decimal, absent values
/// as empty cells.
pub fn write_artifact_csv<W: Write>(mut w: W, report: &ArtifactReport) -> io::Result<()> {
    writeln!(
        w,
        "subset,n_buckets,partial_A_O,partial_A_bucket,partial_A_bucket_corrected,full_A_O,full_A_bucket,full_A_bucket_corrected,P_C,P_C_corrected"
    )?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.subset,
            r.n_buckets,
            pct(r.partial.a_o),
            pct(r.partial.a_bucket),
            pct(r.partial.a_bucket_corrected),
            pct(r.full.a_o),
            pct(r.full.a_bucket),
            pct(r.full.a_bucket_corrected),
            pct(r.p_c),
            pct(r.p_c_corrected)
        )?;
    }
    Ok(())
}
