//! AFLite: iterative adversarial filtering with an ensemble of linear probes.
//!
//! Each iteration trains `n_ensemble` probes, each on its own random subset
//! of `m_train` remaining examples, and scores every held-out example by the
//! fraction of probes that classify it correctly. Up to `k_remove` examples
//! scoring strictly above `tau` (highest first, ties by ascending id) move to
//! the easy partition. Filtering stops after the first iteration that removes
//! fewer than `k_remove`; whatever remains is the hard partition.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::embedding::validate;
use super::probe::{fit, LinearProbe, ProbeConfig};
use super::{EmbeddedExample, SamplingError};
use crate::exec::Execution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AfliteConfig {
    pub n_ensemble: usize,
    pub m_train: usize,
    pub k_remove: usize,
    pub tau: f64,
    pub seed: u64,
    pub probe: ProbeConfig,
}

impl Default for AfliteConfig {
    fn default() -> Self {
        Self {
            n_ensemble: 64,
            m_train: 5000,
            k_remove: 500,
            tau: 0.75,
            seed: 0,
            probe: ProbeConfig::default(),
        }
    }
}

impl AfliteConfig {
    fn validate(&self, dataset_size: usize) -> Result<(), SamplingError> {
        let bad = |m: String| Err(SamplingError::Config(m));
        if self.n_ensemble == 0 {
            return bad("n_ensemble must be at least 1".into());
        }
        if self.m_train == 0 {
            return bad("m_train must be at least 1".into());
        }
        if self.k_remove == 0 {
            return bad("k_remove must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return bad(format!("tau = {} is outside [0, 1]", self.tau));
        }
        if dataset_size <= self.m_train {
            return bad(format!(
                "dataset size {dataset_size} must exceed m_train = {}",
                self.m_train
            ));
        }
        if self.k_remove >= dataset_size {
            return bad(format!(
                "k_remove = {} must be smaller than the dataset size {dataset_size}",
                self.k_remove
            ));
        }
        self.probe.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterResult {
    /// In removal order.
    #[serde(rename = "easy")]
    pub easy_ids: Vec<String>,
    /// In input order.
    #[serde(rename = "hard")]
    pub hard_ids: Vec<String>,
    /// Score at removal for easy examples; last-iteration score for hard
    /// ones, `None` if they were not held out in that iteration.
    #[serde(rename = "scores")]
    pub final_scores: BTreeMap<String, Option<f64>>,
    pub iterations: usize,
}

enum Member {
    Probe(LinearProbe),
    /// The member's training subset held a single label.
    Constant(bool),
}

impl Member {
    fn predict(&self, x: &[f64]) -> bool {
        match self {
            Member::Probe(p) => p.predict(x),
            Member::Constant(label) => *label,
        }
    }
}

/// Held-out positions (into `remaining`) and whether the member got them right.
fn member_votes(
    data: &[EmbeddedExample],
    remaining: &[usize],
    cfg: &AfliteConfig,
    iteration: usize,
    member: usize,
) -> Result<Vec<(usize, bool)>, SamplingError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(((iteration as u64) << 32) | member as u64);
    let mut in_train = vec![false; remaining.len()];
    for pos in rand::seq::index::sample(&mut rng, remaining.len(), cfg.m_train) {
        in_train[pos] = true;
    }
    let train: Vec<&EmbeddedExample> = remaining
        .iter()
        .zip(&in_train)
        .filter_map(|(&idx, &t)| t.then_some(&data[idx]))
        .collect();
    let model = match fit(&train, &cfg.probe) {
        Ok(p) => Member::Probe(p),
        Err(SamplingError::SingleClass) => Member::Constant(train[0].label),
        Err(e) => return Err(e),
    };
    Ok(remaining
        .iter()
        .enumerate()
        .filter(|(pos, _)| !in_train[*pos])
        .map(|(pos, &idx)| (pos, model.predict(&data[idx].vector) == data[idx].label))
        .collect())
}

pub fn aflite_filter(data: &[EmbeddedExample], cfg: &AfliteConfig) -> Result<FilterResult, SamplingError> {
    aflite_filter_with(data, cfg, Execution::default())
}

/// [`aflite_filter`] with an explicit execution strategy. Vote merging only
/// adds integers, so every strategy yields the same result.
pub fn aflite_filter_with(
    data: &[EmbeddedExample],
    cfg: &AfliteConfig,
    exec: Execution,
) -> Result<FilterResult, SamplingError> {
    validate(data)?;
    cfg.validate(data.len())?;

    let mut remaining: Vec<usize> = (0..data.len()).collect();
    let mut last_score: Vec<Option<f64>> = vec![None; data.len()];
    let mut easy = Vec::new();
    let mut iterations = 0;

    while remaining.len() > cfg.m_train {
        let votes = exec.map_range(cfg.n_ensemble, |member| {
            member_votes(data, &remaining, cfg, iterations, member)
        });
        iterations += 1;

        let mut correct = vec![0u32; remaining.len()];
        let mut seen = vec![0u32; remaining.len()];
        for member in votes {
            for (pos, ok) in member? {
                seen[pos] += 1;
                correct[pos] += u32::from(ok);
            }
        }
        let scores: Vec<Option<f64>> = correct
            .iter()
            .zip(&seen)
            .map(|(&c, &n)| (n > 0).then(|| f64::from(c) / f64::from(n)))
            .collect();
        for (&idx, s) in remaining.iter().zip(&scores) {
            last_score[idx] = *s;
        }

        let mut over: Vec<(usize, f64)> = scores
            .iter()
            .enumerate()
            .filter_map(|(pos, s)| s.filter(|&s| s > cfg.tau).map(|s| (pos, s)))
            .collect();
        over.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| data[remaining[a.0]].example_id.cmp(&data[remaining[b.0]].example_id))
        });
        over.truncate(cfg.k_remove);
        let removed = over.len();

        let mut drop = vec![false; remaining.len()];
        for &(pos, _) in &over {
            drop[pos] = true;
            easy.push(remaining[pos]);
        }
        remaining = remaining
            .iter()
            .zip(&drop)
            .filter_map(|(&idx, &d)| (!d).then_some(idx))
            .collect();
        log::info!("aflite iteration {iterations}: removed {removed}, {} remain", remaining.len());

        if removed < cfg.k_remove {
            break;
        }
    }
    if remaining.len() <= cfg.m_train {
        log::warn!(
            "aflite stopped: {} examples remain, not more than m_train = {}",
            remaining.len(),
            cfg.m_train
        );
    }

    let ids = |idxs: &[usize]| -> Vec<String> {
        idxs.iter().map(|&i| data[i].example_id.clone()).collect()
    };
    Ok(FilterResult {
        easy_ids: ids(&easy),
        hard_ids: ids(&remaining),
        final_scores: data
            .iter()
            .zip(&last_score)
            .map(|(e, s)| (e.example_id.clone(), *s))
            .collect(),
        iterations,
    })
}
