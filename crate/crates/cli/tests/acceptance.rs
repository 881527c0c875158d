//! Acceptance suite: twelve criteria, one PASS/FAIL line each.
//!
//! Every numeric check is made against an oracle written here, independent of
//! the library's own arithmetic. Set `UPDATE_GOLDEN=1` to rewrite the golden
//! files under `tests/golden`.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use paracons::artifact::{artifact_report, strict_partition, ArtifactOptions, ArtifactSubset};
use paracons::data::{Item, Prediction, ParaphraseBucket, Run, Source};
use paracons::diversity::{lexical_distance, syntactic_distance, tree_edit_distance, ParseTree};
use paracons::metrics::{
    bucket_accuracy, collect_stats, corrected_metrics, estimate_pc, estimate_pc_flip, fleiss_kappa,
    iso_pvap_curve, min_pc, vap, variance_decomposition, BucketStats, Estimator, StratumDistribution,
    Weighting,
};
use paracons::report::{curve_points, write_curves_csv};
use paracons::sampling::{
    aflite_filter_with, stratified_sample, train_probe, AfliteConfig, Candidate, EmbeddedExample,
    ProbeConfig, StratifyConfig, Subset,
};
use paracons::synth::{generate_scenario, Scenario, ScenarioKind, ScenarioSpec};
use paracons::Execution;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WEIGHTINGS: [Weighting; 2] = [Weighting::Uniform, Weighting::Size];

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

// ---------------------------------------------------------------- fixtures

fn stats(rows: &[(u64, u64)]) -> Vec<BucketStats> {
    rows.iter()
        .enumerate()
        .map(|(i, &(n, c))| BucketStats {
            problem_id: format!("b{i:04}"),
            n,
            n_correct: c,
            original_correct: None,
            original_confidence_in_gold: None,
        })
        .collect()
}

/// 1,000 fixtures with 1–200 buckets of 1–12 predicted paraphrases.
fn random_fixtures() -> Vec<Vec<(u64, u64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    (0..1000)
        .map(|f| {
            let buckets = rng.random_range(1..=200);
            // A quarter of the fixtures are pure or near-pure to exercise edges.
            let style = f % 4;
            (0..buckets)
                .map(|_| {
                    let n = rng.random_range(1..=12u64);
                    let c = match style {
                        0 => *[0, n].choose(&mut rng).unwrap(),
                        _ => rng.random_range(0..=n),
                    };
                    (n, c)
                })
                .collect()
        })
        .collect()
}

/// Naive f64 weighted mean over buckets.
fn weighted_mean(rows: &[(u64, u64)], w: Weighting, f: impl Fn(f64) -> f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for &(n, c) in rows {
        let weight = match w {
            Weighting::Uniform => 1.0,
            Weighting::Size => n as f64,
        };
        num += weight * f(c as f64 / n as f64);
        den += weight;
    }
    num / den
}

fn run_from(scenario: &Scenario) -> Run {
    let mut run = Run::new(scenario.predictions[0].run_id.clone());
    for p in &scenario.predictions {
        run.insert(
            p.item_id.clone(),
            Prediction {
                predicted_label: p.predicted_label.clone(),
                confidence_in_gold: p.confidence_in_gold,
            },
        );
    }
    run
}

// ---------------------------------------------------------------- criteria

fn c1_estimator_identity() -> Check {
    let fixtures = random_fixtures();
    let mut worst = 0.0f64;
    for rows in &fixtures {
        let s = stats(rows);
        for w in WEIGHTINGS {
            let plugin = estimate_pc(&s, w, Estimator::Plugin).unwrap();
            let flip = estimate_pc_flip(&s, w).unwrap();
            let from_vap = 1.0 - 2.0 * vap(&s, w).unwrap();
            let naive = weighted_mean(rows, w, |t| t * t + (1.0 - t) * (1.0 - t));
            for v in [flip, from_vap, naive] {
                worst = worst.max((plugin - v).abs());
            }
        }
    }
    ensure!(worst <= 1e-12, "max deviation {worst:e} exceeds 1e-12");
    Ok(format!("{} fixtures x 2 weightings, max deviation {worst:.1e}", fixtures.len()))
}

fn c2_pair_oracle() -> Check {
    let mut checked = 0;
    for n in 1..=12u64 {
        for c in 0..=n {
            // Exhaustive ordered pairs (i, j) drawn with replacement.
            let correct: Vec<bool> = (0..n).map(|i| i < c).collect();
            let mut agree = 0u64;
            let mut agree_distinct = 0u64;
            for i in 0..n as usize {
                for j in 0..n as usize {
                    if correct[i] == correct[j] {
                        agree += 1;
                        if i != j {
                            agree_distinct += 1;
                        }
                    }
                }
            }
            // θ² + (1−θ)² scaled by n² is c² + (n−c)²: an integer identity.
            ensure!(agree == c * c + (n - c) * (n - c), "n={n} c={c}: {agree} agreeing pairs");
            let s = stats(&[(n, c)]);
            let plugin = estimate_pc(&s, Weighting::Uniform, Estimator::Plugin).unwrap();
            ensure!(
                plugin == agree as f64 / (n * n) as f64,
                "n={n} c={c}: plugin {plugin} vs {agree}/{}",
                n * n
            );
            if n >= 2 {
                let unbiased = estimate_pc(&s, Weighting::Uniform, Estimator::UnbiasedPairs).unwrap();
                ensure!(
                    unbiased == agree_distinct as f64 / (n * (n - 1)) as f64,
                    "n={n} c={c}: unbiased {unbiased}"
                );
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} bucket shapes, exact"))
}

fn c3_total_variance() -> Check {
    let mut worst = 0.0f64;
    let mut worst_pooled = 0.0f64;
    for rows in random_fixtures() {
        let d = variance_decomposition(&stats(&rows)).unwrap();
        worst = worst.max((d.total - (d.within + d.between)).abs());
        // Independent oracle: population variance of the pooled 0/1 values.
        let (items, correct) = rows.iter().fold((0u64, 0u64), |(n, c), r| (n + r.0, c + r.1));
        let mean = correct as f64 / items as f64;
        let pooled = rows
            .iter()
            .map(|&(n, c)| c as f64 * (1.0 - mean).powi(2) + (n - c) as f64 * mean.powi(2))
            .sum::<f64>()
            / items as f64;
        worst_pooled = worst_pooled.max((d.total - pooled).abs());
    }
    ensure!(worst <= 1e-12, "identity gap {worst:e}");
    ensure!(worst_pooled <= 1e-12, "total vs pooled oracle gap {worst_pooled:e}");
    Ok(format!("identity gap {worst:.1e}, pooled-oracle gap {worst_pooled:.1e}"))
}

fn scenario_pc(spec: &ScenarioSpec) -> (f64, f64) {
    let s = generate_scenario(spec).unwrap();
    let st = collect_stats(&s.buckets, &run_from(&s), Execution::Sequential).stats;
    (
        estimate_pc(&st, Weighting::Uniform, Estimator::Plugin).unwrap(),
        bucket_accuracy(&st, Weighting::Uniform).unwrap(),
    )
}

fn c4_figure_two_regimes() -> Check {
    let (pure, pure_acc) = scenario_pc(&ScenarioSpec::new(ScenarioKind::Pure, 10, 5, 0.8));
    ensure!(pure == 1.0 && pure_acc == 0.8, "pure: P_C {pure}, accuracy {pure_acc}");
    let (uniform, uni_acc) = scenario_pc(&ScenarioSpec::new(ScenarioKind::Uniform, 10, 5, 0.8));
    ensure!(uniform == 0.68 && uni_acc == 0.8, "uniform: P_C {uniform}, accuracy {uni_acc}");
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for seed in 0..200 {
        let mut spec = ScenarioSpec::new(ScenarioKind::Mixed, 1000, 5, 0.8);
        spec.theta_spread = 0.2;
        spec.seed = seed;
        let (pc, acc) = scenario_pc(&spec);
        let bound = 1.0 - 2.0 * acc * (1.0 - acc);
        ensure!(pc >= bound - 1e-12 && pc <= 1.0, "seed {seed}: P_C {pc} vs min {bound}");
        ensure!((acc - 0.8).abs() <= 0.02, "seed {seed}: accuracy {acc}");
        lo = lo.min(pc);
        hi = hi.max(pc);
    }
    Ok(format!("pure 1.0, uniform 0.68, mixed P_C in [{lo:.4}, {hi:.4}] over 200 seeds"))
}

fn c5_min_pc_and_curves() -> Check {
    ensure!(min_pc(0.8).unwrap() == 0.68, "min_pc(0.8) = {}", min_pc(0.8).unwrap());
    let iso = iso_pvap_curve(0.8, 0.5).unwrap();
    ensure!((iso - 0.84).abs() <= 1e-12, "iso_pvap(0.8, 0.5) = {iso}");
    for rows in random_fixtures() {
        let s = stats(&rows);
        for w in WEIGHTINGS {
            let pc = estimate_pc(&s, w, Estimator::Plugin).unwrap();
            let acc = weighted_mean(&rows, w, |t| t);
            let bound = 1.0 - 2.0 * acc * (1.0 - acc);
            ensure!(pc >= bound - 1e-12, "P_C {pc} below min_pc({acc}) = {bound}");
        }
    }
    let fractions = [1.0, 0.75, 0.5, 0.25, 0.0];
    let mut csv = Vec::new();
    write_curves_csv(&mut csv, &curve_points(100, &fractions).unwrap()).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let expected = 1.0 - 2.0 * v[1] * v[0] * (1.0 - v[0]);
        ensure!((v[2] - expected).abs() <= 1e-12, "curve row `{line}` vs {expected}");
        rows += 1;
    }
    ensure!(rows == 101 * fractions.len(), "{rows} curve rows");
    Ok(format!("min_pc(0.8) = 0.68, iso(0.8, 0.5) = {iso}, {rows} curve rows"))
}

fn c6_correction() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let b = rng.random_range(1..=80);
        let s: Vec<BucketStats> = (0..b)
            .map(|i| {
                let n = rng.random_range(1..=12);
                BucketStats {
                    problem_id: format!("b{i}"),
                    n,
                    n_correct: rng.random_range(0..=n),
                    original_correct: None,
                    original_confidence_in_gold: Some(rng.random()),
                }
            })
            .collect();
        let confs: Vec<f64> = s.iter().map(|x| x.original_confidence_in_gold.unwrap()).collect();
        let reference = StratumDistribution::from_confidences(&confs).unwrap();
        for w in WEIGHTINGS {
            let c = corrected_metrics(&s, &reference, w).unwrap();
            worst = worst.max((c.p_c - estimate_pc(&s, w, Estimator::Plugin).unwrap()).abs());
            worst = worst.max((c.a_bucket - bucket_accuracy(&s, w).unwrap()).abs());
        }
    }
    ensure!(worst <= 1e-12, "identity deviation {worst:e}");

    // Two strata: decile 1 holds θ = 1 buckets, decile 9 θ = 0.5 buckets,
    // equally sampled; the reference puts 90% / 10% on them.
    let mut two = Vec::new();
    for i in 0..4 {
        let (conf, n, c) = if i < 2 { (0.15, 4, 4) } else { (0.95, 4, 2) };
        two.push(BucketStats {
            problem_id: format!("t{i}"),
            n,
            n_correct: c,
            original_correct: None,
            original_confidence_in_gold: Some(conf),
        });
    }
    let mut p = [0.0; 10];
    p[1] = 0.9;
    p[9] = 0.1;
    let c = corrected_metrics(&two, &StratumDistribution::new(p).unwrap(), Weighting::Uniform).unwrap();
    ensure!(c.p_c == 0.95, "two-stratum P̃_C = {}", c.p_c);
    Ok(format!("identity deviation {worst:.1e}; two-stratum P̃_C = 0.95"))
}

fn planted_fixture() -> (Vec<EmbeddedExample>, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut planted = Vec::new();
    let data = (0..2000)
        .map(|i| {
            let id = format!("x{i:04}");
            let label = rng.random_bool(0.5);
            let mut vector: Vec<f64> = (0..100).map(|_| rng.random_range(-1.0..1.0)).collect();
            if i % 4 == 0 {
                // The artifact: coordinate 0 reveals the label.
                vector[0] = if label { 3.0 } else { -3.0 };
                planted.push(id.clone());
            }
            EmbeddedExample {
                example_id: id,
                label,
                vector,
            }
        })
        .collect();
    (data, planted)
}

fn c7_aflite() -> Check {
    let (data, planted) = planted_fixture();
    // The fixture really is planted: an independently trained probe is
    // near-perfect on planted examples and near chance elsewhere.
    let (train, held): (Vec<_>, Vec<_>) = data.iter().cloned().partition(|e| e.example_id < "x1000".into());
    let probe = train_probe(&train, &ProbeConfig::default()).unwrap();
    let planted_set: std::collections::HashSet<&str> = planted.iter().map(String::as_str).collect();
    let (hp, hn): (Vec<_>, Vec<_>) = held.iter().partition(|e| planted_set.contains(e.example_id.as_str()));
    let (acc_p, acc_n) = (probe.accuracy(hp.iter().copied()), probe.accuracy(hn.iter().copied()));
    ensure!(acc_p >= 0.95, "independent probe accuracy on planted examples {acc_p}");

    let cfg = AfliteConfig {
        n_ensemble: 64,
        m_train: 1000,
        k_remove: 100,
        tau: 0.75,
        seed: 2024,
        probe: ProbeConfig::default(),
    };
    let a = aflite_filter_with(&data, &cfg, Execution::Parallel).unwrap();
    let b = aflite_filter_with(&data, &cfg, Execution::Parallel).unwrap();
    let seq = aflite_filter_with(&data, &cfg, Execution::Sequential).unwrap();
    ensure!(a == b, "two runs with the same seed differ");
    ensure!(a == seq, "sequential and parallel runs differ");
    let easy: std::collections::HashSet<&str> = a.easy_ids.iter().map(String::as_str).collect();
    let recovered = planted.iter().filter(|id| easy.contains(id.as_str())).count();
    let rate = recovered as f64 / planted.len() as f64;
    ensure!(rate >= 0.9, "only {recovered}/{} planted examples are easy", planted.len());
    ensure!(a.easy_ids.len() + a.hard_ids.len() == data.len(), "not a partition");
    Ok(format!(
        "{recovered}/{} planted in easy ({} easy, {} iterations); probe oracle {acc_p:.2}/{acc_n:.2}",
        planted.len(),
        a.easy_ids.len(),
        a.iterations
    ))
}

fn c8_sampler() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut candidates = Vec::new();
    for subset in [Subset::Easy, Subset::Hard] {
        for d in 0..10 {
            // At least the 13 per decile a 125 quota can ask for.
            for k in 0..rng.random_range(13..40) {
                candidates.push(Candidate {
                    id: format!("{subset}-{d}-{k}"),
                    confidence_in_gold: (d as f64 + rng.random_range(0.01..0.99)) / 10.0,
                    subset,
                });
            }
        }
    }
    candidates.shuffle(&mut rng);
    let cfg = StratifyConfig {
        quota_per_decile: None,
        seed: 1,
    };
    let sel = stratified_sample(&candidates, &cfg, 125).unwrap();
    ensure!(sel.len() == 250, "{} selections", sel.len());
    let unique: std::collections::HashSet<&str> = sel.iter().map(|s| s.id.as_str()).collect();
    ensure!(unique.len() == 250, "duplicate selections");
    for subset in [Subset::Easy, Subset::Hard] {
        let mut counts = [0usize; 10];
        for s in sel.iter().filter(|s| s.subset == subset) {
            counts[s.decile] += 1;
        }
        let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
        ensure!(hi - lo <= 1, "{subset} decile counts {counts:?}");
    }
    ensure!(stratified_sample(&candidates, &cfg, 125).unwrap() == sel, "not deterministic");
    Ok("125 + 125 = 250 unique ids, per-decile counts within 1".into())
}

/// Lowercase, whitespace split, sort, dedup, join.
fn bag(s: &str) -> Vec<char> {
    let mut toks: Vec<String> = s.split_whitespace().map(|t| t.to_lowercase()).collect();
    toks.sort();
    toks.dedup();
    toks.join(" ").chars().collect()
}

/// Textbook full-matrix Levenshtein.
fn levenshtein_dp(a: &[char], b: &[char]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

fn random_text(rng: &mut ChaCha8Rng) -> String {
    const WORDS: [&str; 12] = ["The", "cat", "sat", "on", "a", "mat", "dog", "ran,", "home", "É", "naïve", "cat."];
    let n = rng.random_range(0..9);
    (0..n).map(|_| WORDS[rng.random_range(0..WORDS.len())]).collect::<Vec<_>>().join(" ")
}

/// Preorder view for the mapping oracle.
struct Flat {
    labels: Vec<String>,
    /// `anc[i][j]`: node i is a proper ancestor of node j.
    anc: Vec<Vec<bool>>,
}

fn flatten(t: &ParseTree) -> Flat {
    fn walk(t: &ParseTree, path: &mut Vec<usize>, labels: &mut Vec<String>, parents: &mut Vec<Vec<usize>>) {
        labels.push(t.label.clone());
        parents.push(path.clone());
        let me = labels.len() - 1;
        path.push(me);
        for c in &t.children {
            walk(c, path, labels, parents);
        }
        path.pop();
    }
    let (mut labels, mut ancestors) = (Vec::new(), Vec::new());
    walk(t, &mut Vec::new(), &mut labels, &mut ancestors);
    let n = labels.len();
    let mut anc = vec![vec![false; n]; n];
    for (j, list) in ancestors.iter().enumerate() {
        for &i in list {
            anc[i][j] = true;
        }
    }
    Flat { labels, anc }
}

/// Minimum edit cost over all edit-script mappings: one-to-one node pairings
/// that preserve preorder (sibling order) and ancestry. The cost of the
/// script is relabels plus deletions of unmapped source nodes plus
/// insertions of unmapped target nodes.
fn edit_script_oracle(a: &ParseTree, b: &ParseTree) -> usize {
    let (fa, fb) = (flatten(a), flatten(b));
    fn search(i: usize, pairs: &mut Vec<(usize, usize)>, relabels: usize, fa: &Flat, fb: &Flat, best: &mut usize) {
        if i == fa.labels.len() {
            let m = pairs.len();
            *best = (*best).min(relabels + (fa.labels.len() - m) + (fb.labels.len() - m));
            return;
        }
        search(i + 1, pairs, relabels, fa, fb, best);
        let start = pairs.last().map_or(0, |p| p.1 + 1);
        for j in start..fb.labels.len() {
            if pairs.iter().all(|&(pi, pj)| fa.anc[pi][i] == fb.anc[pj][j]) {
                pairs.push((i, j));
                let cost = usize::from(fa.labels[i] != fb.labels[j]);
                search(i + 1, pairs, relabels + cost, fa, fb, best);
                pairs.pop();
            }
        }
    }
    let mut best = usize::MAX;
    search(0, &mut Vec::new(), 0, &fa, &fb, &mut best);
    best
}

/// Every ordered tree shape with exactly `n` nodes, as child lists.
fn shapes(n: usize) -> Vec<ParseTree> {
    fn forests(n: usize) -> Vec<Vec<ParseTree>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in 1..=n {
            for head in shapes(first) {
                for mut tail in forests(n - first) {
                    tail.insert(0, head.clone());
                    out.push(tail);
                }
            }
        }
        out
    }
    forests(n - 1).into_iter().map(|kids| ParseTree::node("X", kids)).collect()
}

fn relabel(t: &ParseTree, labels: &mut impl Iterator<Item = &'static str>) -> ParseTree {
    let label = labels.next().unwrap();
    ParseTree::node(label, t.children.iter().map(|c| relabel(c, labels)).collect())
}

fn c9_diversity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..500 {
        let (a, b) = (random_text(&mut rng), random_text(&mut rng));
        let (ba, bb) = (bag(&a), bag(&b));
        let longest = ba.len().max(bb.len());
        let expected = if longest == 0 { 0.0 } else { levenshtein_dp(&ba, &bb) as f64 / longest as f64 };
        let got = lexical_distance(&a, &b);
        ensure!(got == expected, "lexical `{a}` vs `{b}`: {got} vs {expected}");
    }

    // All shapes up to 6 nodes (65), each labeled from {A, B} in 3 ways.
    let all_shapes: Vec<ParseTree> = (1..=6).flat_map(shapes).collect();
    ensure!(all_shapes.len() == 65, "{} shapes", all_shapes.len());
    let mut trees = Vec::new();
    for s in &all_shapes {
        for k in 0..3 {
            let mut labels = (0..).map(move |i: usize| if (i * 7 + k * 3).is_multiple_of(k + 2) { "A" } else { "B" });
            trees.push(relabel(s, &mut labels));
        }
    }
    let mut pairs = 0usize;
    for a in &trees {
        for b in &trees {
            let oracle = edit_script_oracle(a, b);
            let got = tree_edit_distance(a, b);
            ensure!(got == oracle, "{a} vs {b}: {got} vs oracle {oracle}");
            let (ta, tb) = (a.truncate(3), b.truncate(3));
            let expected = edit_script_oracle(&ta, &tb) as f64 / (ta.node_count() + tb.node_count()) as f64;
            ensure!(syntactic_distance(a, b) == expected, "syntactic {a} vs {b}");
            pairs += 1;
        }
    }

    for _ in 0..1000 {
        let (a, b) = (random_text(&mut rng), random_text(&mut rng));
        ensure!(lexical_distance(&a, &a) == 0.0, "lexical d(x,x) != 0 for `{a}`");
        ensure!(lexical_distance(&a, &b) == lexical_distance(&b, &a), "lexical asymmetry");
        let ta = &trees[rng.random_range(0..trees.len())];
        let tb = &trees[rng.random_range(0..trees.len())];
        ensure!(syntactic_distance(ta, ta) == 0.0, "syntactic d(x,x) != 0 for {ta}");
        ensure!(syntactic_distance(ta, tb) == syntactic_distance(tb, ta), "syntactic asymmetry");
    }
    Ok(format!("500 lexical pairs, {pairs} tree pairs (all 65 shapes <= 6 nodes), 1000 symmetry draws"))
}

fn item(id: String, source: Source) -> Item {
    Item {
        text: id.clone(),
        item_id: id,
        source,
        valid: true,
    }
}

fn c10_artifact() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut last = String::new();
    for fixture in 0..20 {
        let n = rng.random_range(2..60);
        let buckets: Vec<ParaphraseBucket> = (0..n)
            .map(|i| {
                let id = format!("f{fixture}-{i}");
                ParaphraseBucket {
                    problem_id: id.clone(),
                    dataset_tag: "d".into(),
                    context: vec![],
                    gold_label: if i % 2 == 0 { "yes" } else { "no" }.into(),
                    original_confidence_in_gold: Some(rng.random()),
                    original: item(format!("{id}-o"), Source::Original),
                    paraphrases: (0..rng.random_range(1..8)).map(|j| item(format!("{id}-p{j}"), Source::Human)).collect(),
                }
            })
            .collect();
        let breaking = fixture % 2 == 0;
        let (mut partial, mut full) = (Run::new("partial"), Run::new("full"));
        let set = |run: &mut Run, b: &ParaphraseBucket, id: &str, ok: bool| {
            let other = if b.gold_label == "yes" { "no" } else { "yes" };
            run.insert(
                id,
                Prediction {
                    predicted_label: if ok { b.gold_label.clone() } else { other.into() },
                    confidence_in_gold: if ok { 0.9 } else { 0.1 },
                },
            );
        };
        for b in &buckets {
            let artifact = rng.random_bool(0.5);
            set(&mut partial, b, &b.original.item_id, artifact);
            set(&mut full, b, &b.original.item_id, rng.random_bool(0.8));
            for p in &b.paraphrases {
                // Artifact-breaking paraphrases defeat the partial model.
                let ok = if breaking { rng.random_bool(0.1) } else { rng.random_bool(0.5) };
                set(&mut partial, b, &p.item_id, ok);
                set(&mut full, b, &p.item_id, rng.random_bool(0.75));
            }
        }
        let partition = strict_partition(&buckets, &partial).map_err(|e| e.to_string())?;
        let report = artifact_report(&partition, &buckets, &partial, &full, &ArtifactOptions::default(), Execution::Parallel)
            .map_err(|e| e.to_string())?;
        let mut recomposed = 0.0;
        for row in &report.rows {
            let want = if row.subset == ArtifactSubset::Likely { 1.0 } else { 0.0 };
            ensure!(row.partial.a_o == Some(want), "fixture {fixture}: {} partial A_O {:?}", row.subset, row.partial.a_o);
            recomposed += (row.full.a_o.unwrap() * row.n_buckets as f64).round();
            if row.subset == ArtifactSubset::Unlikely {
                // estimate_pc oracle: direct per-bucket evaluation.
                let ids: std::collections::HashSet<&String> = partition.unlikely.iter().collect();
                let mut acc = 0.0;
                let mut count = 0;
                for b in buckets.iter().filter(|b| ids.contains(&b.problem_id)) {
                    let c = b.paraphrases.iter().filter(|p| full.correct(&p.item_id, &b.gold_label) == Some(true)).count();
                    let t = c as f64 / b.paraphrases.len() as f64;
                    acc += t * t + (1.0 - t) * (1.0 - t);
                    count += 1;
                }
                let oracle = acc / count as f64;
                ensure!((row.p_c.unwrap() - oracle).abs() <= 1e-12, "unlikely P_C {:?} vs {oracle}", row.p_c);
            }
            if breaking && row.subset == ArtifactSubset::Likely {
                let a = row.partial.a_bucket.unwrap();
                ensure!(a <= 0.5, "fixture {fixture}: likely partial A_bucket {a} not far below 1");
                last = format!("likely subset: partial A_O 100%, partial A_bucket {:.1}%", 100.0 * a);
            }
        }
        let whole = buckets.iter().filter(|b| full.correct(&b.original.item_id, &b.gold_label) == Some(true)).count();
        ensure!(recomposed as usize == whole, "fixture {fixture}: subset A_O does not recompose");
    }
    Ok(format!("20 fixtures; {last}"))
}

fn c11_fleiss() -> Check {
    let perfect: Vec<Vec<u64>> = (0..50).map(|i| if i % 3 == 0 { vec![4, 0] } else { vec![0, 4] }).collect();
    let k = fleiss_kappa(&perfect).map_err(|e| e.to_string())?;
    ensure!(k == Some(1.0), "perfect agreement κ = {k:?}");

    // Hand-evaluated oracle: [[3,0],[0,3],[2,1]] with 3 raters.
    let p_bar = (1.0 + 1.0 + (2.0 * 1.0) / 6.0) / 3.0;
    let (pa, pb) = (5.0 / 9.0, 4.0 / 9.0);
    let pe = pa * pa + pb * pb;
    let oracle = (p_bar - pe) / (1.0 - pe);
    let k = fleiss_kappa(&[vec![3, 0], vec![0, 3], vec![2, 1]]).unwrap().unwrap();
    ensure!((k - oracle).abs() <= 1e-12, "κ {k} vs hand value {oracle}");

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let random: Vec<Vec<u64>> = (0..10_000)
        .map(|_| {
            let mut row = vec![0u64; 3];
            for _ in 0..5 {
                row[rng.random_range(0..3)] += 1;
            }
            row
        })
        .collect();
    let k = fleiss_kappa(&random).unwrap().unwrap();
    ensure!(k.abs() < 0.05, "random κ = {k}");
    Ok(format!("perfect 1.0, hand case {oracle:.4}, random κ = {k:.4}"))
}

// ---------------------------------------------------------------- CLI

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_paracons")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn paracons(cwd: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(bin())
        .args(args)
        .current_dir(cwd)
        .env("RUST_LOG", "error")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "`paracons {}` exited {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(())
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn write_inputs(root: &Path) {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut emb = String::new();
    for i in 0..300 {
        let label = rng.random_bool(0.5);
        let mut v: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        if i % 3 == 0 {
            v[0] = if label { 2.0 } else { -2.0 };
        }
        let vec = v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        emb.push_str(&format!("{{\"example_id\":\"e{i:03}\",\"label\":{},\"vector\":[{vec}]}}\n", u8::from(label)));
    }
    fs::write(root.join("embeddings.jsonl"), emb).unwrap();

    let mut cand = String::new();
    for i in 0..400 {
        let subset = if i % 2 == 0 { "easy" } else { "hard" };
        cand.push_str(&format!(
            "{{\"id\":\"c{i:03}\",\"confidence_in_gold\":{},\"subset\":\"{subset}\"}}\n",
            rng.random::<f64>()
        ));
    }
    fs::write(root.join("candidates.jsonl"), cand).unwrap();

    let pairs = [
        r#"{"problem_id":"p1","dataset_tag":"snli","original_text":"A man sleeps","paraphrase_text":"A person naps on a couch","source":"human","original_tree":"(S (NP (DT A) (NN man)) (VP sleeps))","paraphrase_tree":"(S (NP (DT A) (NN person)) (VP (VBZ naps) (PP on)))","semantic_score":0.61}"#,
        r#"{"problem_id":"p1","dataset_tag":"snli","original_text":"A man sleeps","paraphrase_text":"A man is sleeping","source":"automatic","original_tree":"(S (NP (DT A) (NN man)) (VP sleeps))","paraphrase_tree":"(S (NP (DT A) (NN man)) (VP (VBZ is) (VP sleeping)))","semantic_score":0.93}"#,
        r#"{"problem_id":"p2","dataset_tag":"atomic","original_text":"She bakes bread","paraphrase_text":"Bread is baked by her","source":"human","semantic_score":0.72}"#,
    ];
    fs::write(root.join("pairs.jsonl"), pairs.join("\n") + "\n").unwrap();

    // Artifact fixture: buckets with `partial` and `full` runs.
    let mut buckets = String::new();
    let mut preds = String::new();
    for i in 0..12 {
        let gold = if i % 2 == 0 { "yes" } else { "no" };
        let other = if gold == "yes" { "no" } else { "yes" };
        buckets.push_str(&format!(
            "{{\"problem_id\":\"a{i:02}\",\"dataset_tag\":\"d\",\"gold_label\":\"{gold}\",\"original_confidence_in_gold\":{},\"items\":[{{\"item_id\":\"a{i:02}-o\",\"text\":\"o\",\"source\":\"original\",\"valid\":true}},{{\"item_id\":\"a{i:02}-p0\",\"text\":\"p\",\"source\":\"human\",\"valid\":true}},{{\"item_id\":\"a{i:02}-p1\",\"text\":\"q\",\"source\":\"qcpg\",\"valid\":true}}]}}\n",
            (i as f64 + 0.5) / 12.0
        ));
        for (run, ids) in [("partial", [i % 3 == 0, false, i % 4 == 0]), ("full", [true, i % 2 == 0, i % 5 != 0])] {
            for (k, ok) in ["o", "p0", "p1"].iter().zip(ids) {
                preds.push_str(&format!(
                    "{{\"run_id\":\"{run}\",\"item_id\":\"a{i:02}-{k}\",\"predicted_label\":\"{}\",\"confidence_in_gold\":{}}}\n",
                    if ok { gold } else { other },
                    if ok { 0.8 } else { 0.3 }
                ));
            }
        }
    }
    fs::write(root.join("art_buckets.jsonl"), buckets).unwrap();
    fs::write(root.join("art_predictions.jsonl"), preds).unwrap();
    fs::write(root.join("reference.json"), r#"{"proportions":[0.05,0.05,0.1,0.1,0.1,0.1,0.1,0.1,0.1,0.2]}"#).unwrap();
}

fn c12_cli() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = tmp.path();
    write_inputs(root);
    for (name, kind) in [("pure", "pure"), ("uniform", "uniform")] {
        paracons(root, &["synth", "--kind", kind, "--run-id", name, "--seed", "3", "--out", name])?;
    }
    fs::write(
        root.join("sweep.json"),
        r#"{"runs":[{"buckets":"uniform/buckets.jsonl","predictions":"uniform/predictions.jsonl"},{"buckets":"pure/buckets.jsonl","predictions":"pure/predictions.jsonl"}]}"#,
    )
    .unwrap();

    let commands: Vec<(&str, Vec<&str>)> = vec![
        ("eval", vec!["eval", "--buckets", "uniform/buckets.jsonl", "--predictions", "uniform/predictions.jsonl", "--reference", "reference.json", "--test-accuracy", "0.81"]),
        ("sweep", vec!["sweep", "--manifest", "sweep.json"]),
        ("curves", vec!["curves", "--grid", "10", "--fractions", "1,0.5,0"]),
        ("aflite", vec!["aflite", "--embeddings", "embeddings.jsonl", "--n-ensemble", "8", "--m-train", "150", "--k-remove", "20", "--seed", "5"]),
        ("stratify", vec!["stratify", "--candidates", "candidates.jsonl", "--total-per-subset", "50", "--seed", "5"]),
        ("diversity", vec!["diversity", "--pairs", "pairs.jsonl"]),
        ("artifact-split", vec!["artifact-split", "--buckets", "art_buckets.jsonl", "--predictions", "art_predictions.jsonl", "--reference", "reference.json"]),
        ("synth", vec!["synth", "--kind", "mixed", "--n-buckets", "50", "--theta-spread", "0.2", "--seed", "9"]),
    ];
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut goldens = 0;
    for (name, args) in &commands {
        let mut outputs = Vec::new();
        for copy in ["a", "b"] {
            let out = format!("out/{name}/{copy}");
            let mut full = args.clone();
            full.extend(["--out", out.as_str()]);
            paracons(root, &full)?;
            outputs.push(read_dir(&root.join(&out)));
        }
        ensure!(outputs[0] == outputs[1], "`{name}` outputs differ between identical runs");
        ensure!(outputs[0].contains_key("manifest.json"), "`{name}` wrote no manifest");

        if ["eval", "curves", "sweep"].contains(name) {
            let dir = golden_dir().join(name);
            if update {
                fs::create_dir_all(&dir).unwrap();
                for (file, bytes) in &outputs[0] {
                    fs::write(dir.join(file), bytes).unwrap();
                }
            }
            ensure!(dir.exists(), "missing golden directory {}", dir.display());
            let golden = read_dir(&dir);
            ensure!(
                golden == outputs[0],
                "`{name}` output differs from {} (files {:?})",
                dir.display(),
                outputs[0].keys().collect::<Vec<_>>()
            );
            goldens += 1;
        }
    }

    let sweep = fs::read_to_string(root.join("out/sweep/a/sweep.csv")).unwrap();
    let rows: HashMap<&str, Vec<&str>> = sweep.lines().skip(1).map(|l| {
        let v: Vec<&str> = l.split(',').collect();
        (v[0], v)
    }).collect();
    ensure!(rows["pure"][2] == "1" && rows["uniform"][2] == "0.68", "sweep P_C rows: {sweep}");
    Ok(format!("{} subcommands byte-identical across reruns; {goldens} golden sets match", commands.len()))
}

// ---------------------------------------------------------------- runner

type Criterion = (&'static str, f64, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("estimator identity", 5.0, c1_estimator_identity),
        ("pair-oracle equivalence", 5.0, c2_pair_oracle),
        ("law of total variance", 5.0, c3_total_variance),
        ("variance regimes from synth", 10.0, c4_figure_two_regimes),
        ("min-P_C bound and curves", 2.0, c5_min_pc_and_curves),
        ("correction identity", 1.0, c6_correction),
        ("AFLite planted artifact", 60.0, c7_aflite),
        ("stratified sampler", 1.0, c8_sampler),
        ("diversity oracles", 30.0, c9_diversity),
        ("artifact partition", 5.0, c10_artifact),
        ("Fleiss kappa", 5.0, c11_fleiss),
        ("CLI determinism and goldens", 30.0, c12_cli),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let label = format!("criterion {:>2} ({name})", i + 1);
        if !filter.is_empty() && !filter.iter().any(|p| label.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > Duration::from_secs_f64(*budget) => {
                Err(format!("took {:.2}s, budget {budget}s", elapsed.as_secs_f64()))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {label} [{:.2}s]: {detail}", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {label} [{:.2}s]: {why}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
