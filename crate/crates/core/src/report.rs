//! Per-run evaluation reports, multi-run sweep tables and curve emitters.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::data::{ParaphraseBucket, Run};
use crate::metrics::{
    accuracy_panel, collect_stats, corrected_metrics, estimate_pc, iso_pvap_curve, pvap, vap,
    variance_decomposition, Estimator, MetricsError, StratumDistribution, Weighting,
};
use crate::Execution;

/// The full metric panel for one run. Absent values serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub run_id: String,
    pub n_buckets: usize,
    pub n_paraphrases: u64,
    /// Fraction of valid items (originals and paraphrases) with a prediction.
    pub coverage: f64,
    /// Buckets dropped because none of their valid paraphrases was predicted.
    pub excluded_buckets: Vec<String>,
    pub weighting: Weighting,
    pub estimator: Estimator,
    #[serde(rename = "A_O")]
    pub a_o: Option<f64>,
    #[serde(rename = "A_T")]
    pub a_t: Option<f64>,
    #[serde(rename = "A_bucket")]
    pub a_bucket: f64,
    #[serde(rename = "A_bucket_corrected")]
    pub a_bucket_corrected: Option<f64>,
    #[serde(rename = "P_C")]
    pub p_c: f64,
    #[serde(rename = "P_C_corrected")]
    pub p_c_corrected: Option<f64>,
    #[serde(rename = "VAP")]
    pub vap: f64,
    #[serde(rename = "PVAP")]
    pub pvap: Option<f64>,
    pub total_variance: f64,
    /// Reference mass moved off empty deciles by the correction.
    pub redistributed_mass: Option<f64>,
}

impl EvaluationReport {
    fn numbers(&self) -> Vec<(&'static str, Option<f64>)> {
        vec![
            ("coverage", Some(self.coverage)),
            ("A_O", self.a_o),
            ("A_T", self.a_t),
            ("A_bucket", Some(self.a_bucket)),
            ("A_bucket_corrected", self.a_bucket_corrected),
            ("P_C", Some(self.p_c)),
            ("P_C_corrected", self.p_c_corrected),
            ("VAP", Some(self.vap)),
            ("PVAP", self.pvap),
            ("total_variance", Some(self.total_variance)),
            ("redistributed_mass", self.redistributed_mass),
        ]
    }

    /// Every present value must be finite and, apart from VAP and variances,
    /// a probability. Returns the offending field on failure.
    pub fn check(&self) -> Result<(), String> {
        for (name, v) in self.numbers() {
            let Some(v) = v else { continue };
            let ok = match name {
                "VAP" | "total_variance" => v.is_finite() && (0.0..=0.25).contains(&v),
                _ => (0.0..=1.0).contains(&v),
            };
            if !ok {
                return Err(format!("run `{}`: {name} = {v} is out of range", self.run_id));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct EvalOptions {
    pub weighting: Weighting,
    pub estimator: Estimator,
    /// Reference decile distribution for the corrected columns.
    pub reference: Option<StratumDistribution>,
    /// Externally measured full test-set accuracy.
    pub test_accuracy: Option<f64>,
}

pub fn evaluate_run(
    buckets: &[ParaphraseBucket],
    run: &Run,
    opts: &EvalOptions,
    exec: Execution,
) -> Result<EvaluationReport, MetricsError> {
    let collected = collect_stats(buckets, run, exec);
    let stats = &collected.stats;
    if stats.is_empty() {
        return Err(MetricsError::Empty);
    }
    let w = opts.weighting;
    let panel = accuracy_panel(buckets, stats, run, w, opts.test_accuracy)?;
    let corrected = match &opts.reference {
        Some(reference) => Some(corrected_metrics(stats, reference, w)?),
        None => None,
    };
    Ok(EvaluationReport {
        run_id: run.run_id.clone(),
        n_buckets: stats.len(),
        n_paraphrases: stats.iter().map(|s| s.n).sum(),
        coverage: run.coverage(buckets),
        excluded_buckets: collected.excluded.clone(),
        weighting: w,
        estimator: opts.estimator,
        a_o: panel.original,
        a_t: panel.test,
        a_bucket: panel.bucket,
        a_bucket_corrected: corrected.map(|c| c.a_bucket),
        p_c: estimate_pc(stats, w, opts.estimator)?,
        p_c_corrected: corrected.map(|c| c.p_c),
        vap: vap(stats, w)?,
        pvap: pvap(stats)?,
        total_variance: variance_decomposition(stats)?.total,
        redistributed_mass: corrected.map(|c| c.redistributed_mass),
    })
}

fn pct(v: Option<f64>) -> String {
    v.map(|x| format!("{:.1}", 100.0 * x)).unwrap_or_else(|| "—".to_string())
}

/// Display width, ignoring combining diacritics such as the tilde in `P̃_C`.
fn width(s: &str) -> usize {
    s.chars().filter(|c| !('\u{300}'..='\u{36f}').contains(c)).count()
}

/// Fixed-width table, one row per report, all metrics as percentages.
pub fn render_table(reports: &[EvaluationReport]) -> String {
    let header = [
        "run", "A_O", "A_T", "A_bucket", "Ã_bucket", "P_C", "P̃_C", "VAP", "PVAP",
    ];
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.run_id.clone(),
                pct(r.a_o),
                pct(r.a_t),
                pct(Some(r.a_bucket)),
                pct(r.a_bucket_corrected),
                pct(Some(r.p_c)),
                pct(r.p_c_corrected),
                pct(Some(r.vap)),
                pct(r.pvap),
            ]
        })
        .collect();
    let col_width = |i: usize| {
        rows.iter()
            .map(|r| width(&r[i]))
            .chain([width(header[i])])
            .max()
            .unwrap_or(0)
    };
    let widths: Vec<usize> = (0..header.len()).map(col_width).collect();
    let line = |cells: Vec<String>| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            let pad = widths[i] - width(c);
            if i == 0 {
                s.push_str(c);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str("  ");
                s.push_str(&" ".repeat(pad));
                s.push_str(c);
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(header.iter().map(|h| h.to_string()).collect());
    for r in rows {
        out.push_str(&line(r));
    }
    if let Some(r) = reports.first() {
        out.push_str(&format!(
            "\nweighting: {}, estimator: {}; metrics in percent\n",
            r.weighting, r.estimator
        ));
    }
    out
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Plot-ready sweep table sorted by run id; absent values are empty cells.
pub fn write_sweep_csv<W: Write>(mut w: W, reports: &[EvaluationReport]) -> io::Result<()> {
    let mut sorted: Vec<&EvaluationReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.run_id.cmp(&b.run_id));
    writeln!(w, "run_id,a_bucket,p_c,a_bucket_corrected,p_c_corrected,vap,pvap")?;
    for r in sorted {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.run_id,
            r.a_bucket,
            r.p_c,
            cell(r.a_bucket_corrected),
            cell(r.p_c_corrected),
            r.vap,
            cell(r.pvap)
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub acc: f64,
    pub fraction: f64,
    pub p_c: f64,
}

/// P_C at which a fraction of the maximal variance is explained by paraphrase,
/// on the grid `acc = i / steps`. Fraction 1 is the min-P_C curve.
pub fn curve_points(steps: usize, fractions: &[f64]) -> Result<Vec<CurvePoint>, MetricsError> {
    if steps == 0 {
        return Err(MetricsError::OutOfRange {
            name: "grid steps",
            value: 0.0,
        });
    }
    let mut out = Vec::with_capacity((steps + 1) * fractions.len());
    for &fraction in fractions {
        for i in 0..=steps {
            let acc = i as f64 / steps as f64;
            out.push(CurvePoint {
                acc,
                fraction,
                p_c: iso_pvap_curve(acc, fraction)?,
            });
        }
    }
    Ok(out)
}

pub fn write_curves_csv<W: Write>(mut w: W, points: &[CurvePoint]) -> io::Result<()> {
    writeln!(w, "acc,fraction,p_c")?;
    for p in points {
        writeln!(w, "{},{},{}", p.acc, p.fraction, p.p_c)?;
    }
    Ok(())
}
