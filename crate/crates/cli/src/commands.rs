use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use paracons::artifact::{
    artifact_report, partition_by_partial_input, strict_partition, write_artifact_csv, ArtifactOptions,
    ArtifactReport,
};
use paracons::data::{load_buckets, load_predictions, write_buckets, write_predictions, LabelAlphabet};
use paracons::diversity::{load_pairs, summarize_diversity, write_summary_csv, SYNTACTIC_DEPTH};
use paracons::metrics::{MetricsError, StratumDistribution};
use paracons::report::{
    curve_points, evaluate_run, render_table, write_curves_csv, write_sweep_csv, EvalOptions,
    EvaluationReport,
};
use paracons::sampling::{
    aflite_filter_with, load_embeddings, read_candidates, stratified_sample, AfliteConfig, ProbeConfig,
    StratifyConfig,
};
use paracons::synth::{generate_scenario, ScenarioSpec};
use paracons::{jsonl, Execution};
use serde::{Deserialize, Serialize};

use crate::manifest::Output;
use crate::{
    AfliteArgs, ArtifactArgs, CurvesArgs, DiversityArgs, EvalArgs, Failure, MetricArgs, StratifyArgs,
    SweepArgs, SynthArgs,
};

type Result<T> = std::result::Result<T, Failure>;

fn alphabet(labels: &Option<String>) -> Result<Option<LabelAlphabet>> {
    labels.as_deref().map(|s| s.parse().map_err(Failure::input)).transpose()
}

fn load_reference(path: &Path) -> Result<StratumDistribution> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_optional_reference(path: &Option<PathBuf>) -> Result<Option<StratumDistribution>> {
    path.as_deref().map(load_reference).transpose()
}

fn bytes<F>(f: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| Failure::Invariant(e.to_string()))?;
    Ok(buf)
}

fn check_reports(reports: &[EvaluationReport]) -> Result<()> {
    reports.iter().try_for_each(|r| r.check().map_err(Failure::Invariant))
}

/// Parses `VALUE` (every run) and `RUN=VALUE` entries.
fn test_accuracies(entries: &[String]) -> Result<(Option<f64>, BTreeMap<String, f64>)> {
    let mut default = None;
    let mut per_run = BTreeMap::new();
    for e in entries {
        let (run, value) = match e.split_once('=') {
            Some((r, v)) => (Some(r), v),
            None => (None, e.as_str()),
        };
        let v: f64 = value
            .parse()
            .map_err(|_| Failure::Input(format!("--test-accuracy `{e}`: `{value}` is not a number")))?;
        match run {
            Some(r) => {
                per_run.insert(r.to_string(), v);
            }
            None => default = Some(v),
        }
    }
    Ok((default, per_run))
}

fn eval_options(m: &MetricArgs, reference: Option<StratumDistribution>, test_accuracy: Option<f64>) -> EvalOptions {
    EvalOptions {
        weighting: m.weighting,
        estimator: m.estimator,
        reference,
        test_accuracy,
    }
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let buckets = load_buckets(&a.buckets, alphabet(&a.labels)?).map_err(Failure::input)?;
    let table = load_predictions(&a.predictions, &buckets).map_err(Failure::input)?;
    let reference = load_optional_reference(&a.metrics.reference)?;
    if a.corrected && reference.is_none() {
        log::warn!("corrected metrics requested without --reference; corrected columns absent");
    }
    let (default_acc, per_run_acc) = test_accuracies(&a.test_accuracy)?;
    for run in per_run_acc.keys() {
        if table.run(run).is_none() {
            return Err(Failure::Input(format!("--test-accuracy names unknown run `{run}`")));
        }
    }

    let runs: Vec<_> = match &a.run {
        Some(id) => vec![table
            .run(id)
            .ok_or_else(|| Failure::Input(format!("{}: no run `{id}`", a.predictions.display())))?],
        None => table.runs().collect(),
    };
    if runs.is_empty() {
        return Err(Failure::Input(format!("{}: no predictions", a.predictions.display())));
    }
    let mut reports = Vec::new();
    for run in runs {
        let acc = per_run_acc.get(&run.run_id).copied().or(default_acc);
        let opts = eval_options(&a.metrics, reference.clone(), acc);
        let r = evaluate_run(&buckets, run, &opts, Execution::Parallel)
            .map_err(|e| Failure::Input(format!("run `{}`: {e}", run.run_id)))?;
        reports.push(r);
    }
    check_reports(&reports)?;

    let mut out = Output::create(&a.out)?;
    out.write_json("report.json", &reports)?;
    out.write("report.txt", render_table(&reports))?;
    let mut inputs = vec![a.buckets.as_path(), a.predictions.as_path()];
    inputs.extend(a.metrics.reference.as_deref());
    out.finish("eval", &a, None, &inputs)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepManifest {
    runs: Vec<SweepEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepEntry {
    buckets: PathBuf,
    predictions: PathBuf,
    #[serde(default)]
    labels: Option<String>,
    /// Overrides the command-line reference for this entry.
    #[serde(default)]
    reference: Option<PathBuf>,
}

pub fn sweep(a: SweepArgs) -> Result<()> {
    let text = fs::read_to_string(&a.manifest)
        .map_err(|e| Failure::Input(format!("{}: {e}", a.manifest.display())))?;
    let manifest: SweepManifest = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", a.manifest.display())))?;
    let base = a.manifest.parent().unwrap_or(Path::new(""));
    let resolve = |p: &Path| base.join(p);
    let shared_reference = load_optional_reference(&a.metrics.reference)?;

    let mut inputs: Vec<PathBuf> = vec![a.manifest.clone()];
    inputs.extend(a.metrics.reference.clone());
    let mut reports: Vec<EvaluationReport> = Vec::new();
    let mut seen = BTreeSet::new();
    for entry in &manifest.runs {
        let (bpath, ppath) = (resolve(&entry.buckets), resolve(&entry.predictions));
        let buckets = load_buckets(&bpath, alphabet(&entry.labels)?).map_err(Failure::input)?;
        let table = load_predictions(&ppath, &buckets).map_err(Failure::input)?;
        let reference = match &entry.reference {
            Some(r) => {
                let path = resolve(r);
                let dist = load_reference(&path)?;
                inputs.push(path);
                Some(dist)
            }
            None => shared_reference.clone(),
        };
        inputs.push(bpath);
        inputs.push(ppath.clone());
        for run in table.runs() {
            if !seen.insert(run.run_id.clone()) {
                return Err(Failure::Input(format!(
                    "{}: duplicate run id `{}`",
                    ppath.display(),
                    run.run_id
                )));
            }
            let opts = eval_options(&a.metrics, reference.clone(), None);
            let r = evaluate_run(&buckets, run, &opts, Execution::Parallel)
                .map_err(|e| Failure::Input(format!("run `{}`: {e}", run.run_id)))?;
            reports.push(r);
        }
    }
    if reports.len() < 2 {
        return Err(Failure::Input(format!(
            "a sweep needs at least 2 runs, found {}",
            reports.len()
        )));
    }
    reports.sort_by(|x, y| x.run_id.cmp(&y.run_id));
    check_reports(&reports)?;

    let mut out = Output::create(&a.out)?;
    out.write("sweep.csv", bytes(|w| write_sweep_csv(w, &reports))?)?;
    out.write_json("sweep.json", &reports)?;
    out.write("sweep.txt", render_table(&reports))?;
    let inputs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    out.finish("sweep", &a, None, &inputs)
}

fn exec(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn lines(ids: &[String]) -> String {
    ids.iter().map(|id| format!("{id}\n")).collect()
}

pub fn aflite(a: AfliteArgs) -> Result<()> {
    let data = load_embeddings(&a.embeddings).map_err(Failure::input)?;
    let cfg = AfliteConfig {
        n_ensemble: a.n_ensemble,
        m_train: a.m_train,
        k_remove: a.k_remove,
        tau: a.tau,
        seed: a.seed,
        probe: ProbeConfig {
            learning_rate: a.learning_rate,
            epochs: a.epochs,
            l2: a.l2,
        },
    };
    let result = aflite_filter_with(&data, &cfg, exec(a.sequential)).map_err(Failure::input)?;
    if let Some((id, s)) = result
        .final_scores
        .iter()
        .find(|(_, s)| s.is_some_and(|v| !(0.0..=1.0).contains(&v)))
    {
        return Err(Failure::Invariant(format!("score {s:?} of `{id}` is outside [0, 1]")));
    }

    let mut out = Output::create(&a.out)?;
    out.write_json("filter.json", &result)?;
    out.write("easy.txt", lines(&result.easy_ids))?;
    out.write("hard.txt", lines(&result.hard_ids))?;
    out.finish("aflite", &a, Some(a.seed), &[&a.embeddings])
}

pub fn stratify(a: StratifyArgs) -> Result<()> {
    let reader = jsonl::open(&a.candidates).map_err(|e| Failure::Input(format!("{}: {e}", a.candidates.display())))?;
    let candidates = read_candidates(reader, &a.candidates.display().to_string()).map_err(Failure::input)?;
    let cfg = StratifyConfig {
        quota_per_decile: a.quota_per_decile,
        seed: a.seed,
    };
    let selection = stratified_sample(&candidates, &cfg, a.total_per_subset).map_err(Failure::input)?;

    let mut out = Output::create(&a.out)?;
    out.write("selection.jsonl", bytes(|w| jsonl::write_lines(w, &selection))?)?;
    let ids: Vec<String> = selection.iter().map(|s| s.id.clone()).collect();
    out.write("selected.txt", lines(&ids))?;
    out.finish("stratify", &a, Some(a.seed), &[&a.candidates])
}

#[derive(Serialize)]
struct DiversityOutput<'a> {
    syntactic_depth: usize,
    lexical_normalizer: &'static str,
    syntactic_normalizer: &'static str,
    summaries: &'a [paracons::diversity::DiversitySummary],
}

pub fn diversity(a: DiversityArgs) -> Result<()> {
    let pairs = load_pairs(&a.pairs).map_err(Failure::input)?;
    if pairs.is_empty() {
        return Err(Failure::Input(format!("{}: no paraphrase pairs", a.pairs.display())));
    }
    let summaries = summarize_diversity(&pairs, exec(a.sequential));
    for s in &summaries {
        let finite = [Some(s.mean_lex), s.mean_syn, s.mean_sem]
            .iter()
            .flatten()
            .all(|v| v.is_finite());
        if !finite || !(0.0..=1.0).contains(&s.mean_lex) {
            return Err(Failure::Invariant(format!("non-finite diversity summary {s:?}")));
        }
    }

    let mut out = Output::create(&a.out)?;
    out.write("diversity.csv", bytes(|w| write_summary_csv(w, &summaries))?)?;
    out.write_json(
        "diversity.json",
        &DiversityOutput {
            syntactic_depth: SYNTACTIC_DEPTH,
            lexical_normalizer: "character length of the longer canonical bag",
            syntactic_normalizer: "sum of the two truncated trees' node counts",
            summaries: &summaries,
        },
    )?;
    out.finish("diversity", &a, None, &[&a.pairs])
}

fn check_artifact(r: &ArtifactReport) -> Result<()> {
    for row in &r.rows {
        let values = [
            row.partial.a_o,
            row.partial.a_bucket,
            row.partial.a_bucket_corrected,
            row.full.a_o,
            row.full.a_bucket,
            row.full.a_bucket_corrected,
            row.p_c,
            row.p_c_corrected,
        ];
        if let Some(v) = values.iter().flatten().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Failure::Invariant(format!("{} subset value {v} outside [0, 1]", row.subset)));
        }
    }
    Ok(())
}

pub fn artifact_split(a: ArtifactArgs) -> Result<()> {
    let buckets = load_buckets(&a.buckets, alphabet(&a.labels)?).map_err(Failure::input)?;
    let table = load_predictions(&a.predictions, &buckets).map_err(Failure::input)?;
    let run = |id: &str| {
        table
            .run(id)
            .ok_or_else(|| Failure::Input(format!("{}: no run `{id}`", a.predictions.display())))
    };
    let (partial, full) = (run(&a.partial_run)?, run(&a.full_run)?);
    let partition = if a.allow_missing {
        let p = partition_by_partial_input(&buckets, partial);
        if !p.unpartitioned.is_empty() {
            log::warn!(
                "{} bucket(s) lack a partial-input original prediction; excluded from both subsets",
                p.unpartitioned.len()
            );
        }
        p
    } else {
        strict_partition(&buckets, partial).map_err(Failure::input)?
    };
    let opts = ArtifactOptions {
        weighting: a.metrics.weighting,
        estimator: a.metrics.estimator,
        reference: load_optional_reference(&a.metrics.reference)?,
        likely_reference: load_optional_reference(&a.likely_reference)?,
        unlikely_reference: load_optional_reference(&a.unlikely_reference)?,
    };
    let report = artifact_report(&partition, &buckets, partial, full, &opts, Execution::Parallel)
        .map_err(Failure::input)?;
    check_artifact(&report)?;

    let mut out = Output::create(&a.out)?;
    out.write("artifact.csv", bytes(|w| write_artifact_csv(w, &report))?)?;
    out.write_json("artifact.json", &report)?;
    let mut inputs = vec![a.buckets.as_path(), a.predictions.as_path()];
    inputs.extend(a.metrics.reference.as_deref());
    inputs.extend(a.likely_reference.as_deref());
    inputs.extend(a.unlikely_reference.as_deref());
    out.finish("artifact-split", &a, None, &inputs)
}

pub fn synth(a: SynthArgs) -> Result<()> {
    let spec = ScenarioSpec {
        kind: a.kind,
        n_buckets: a.n_buckets,
        bucket_size: a.bucket_size,
        accuracy: a.accuracy,
        theta_spread: a.theta_spread,
        seed: a.seed,
        run_id: a.run_id.clone(),
    };
    let scenario = generate_scenario(&spec).map_err(Failure::input)?;

    let mut out = Output::create(&a.out)?;
    out.write("buckets.jsonl", bytes(|w| write_buckets(w, &scenario.buckets))?)?;
    out.write("predictions.jsonl", bytes(|w| write_predictions(w, &scenario.predictions))?)?;
    out.finish("synth", &a, Some(a.seed), &[])
}

pub fn curves(a: CurvesArgs) -> Result<()> {
    let points = curve_points(a.grid, &a.fractions).map_err(|e| match e {
        MetricsError::OutOfRange { name, value } => {
            Failure::Input(format!("{name} = {value} is out of range"))
        }
        other => Failure::input(other),
    })?;
    if let Some(p) = points.iter().find(|p| !(0.0..=1.0).contains(&p.p_c)) {
        return Err(Failure::Invariant(format!("curve value {p:?} outside [0, 1]")));
    }
    let mut out = Output::create(&a.out)?;
    out.write("curves.csv", bytes(|w| write_curves_csv(w, &points))?)?;
    out.finish("curves", &a, None, &[])
}
