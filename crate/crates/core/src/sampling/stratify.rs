//! Round-robin sampling over confidence deciles.
//!
//! Within each subset, rounds visit deciles in ascending order and draw one
//! uniformly random unselected candidate from each decile that still has any,
//! until the subset's total is reached.

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SamplingError;
use crate::data::DataError;
use crate::jsonl;
use crate::metrics::decile_of;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    Easy,
    Hard,
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subset::Easy => "easy",
            Subset::Hard => "hard",
        })
    }
}

/// One line of the sampler's candidates file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    pub confidence_in_gold: f64,
    pub subset: Subset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratifyConfig {
    /// Cap on draws per decile within one subset; `None` means uncapped.
    pub quota_per_decile: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Selection {
    pub id: String,
    pub subset: Subset,
    pub decile: usize,
}

pub fn read_candidates<R: BufRead>(reader: R, origin: &str) -> Result<Vec<Candidate>, SamplingError> {
    Ok(jsonl::read_lines(reader)
        .map_err(|e| DataError::from_line_error(origin, e))?
        .into_iter()
        .map(|l| l.value)
        .collect())
}

/// Selects `total_per_subset` ids from each subset present, easy first.
pub fn stratified_sample(
    candidates: &[Candidate],
    cfg: &StratifyConfig,
    total_per_subset: usize,
) -> Result<Vec<Selection>, SamplingError> {
    if cfg.quota_per_decile == Some(0) {
        return Err(SamplingError::Config("quota_per_decile must be at least 1".into()));
    }
    let mut ids = HashSet::new();
    for c in candidates {
        if !ids.insert(c.id.as_str()) {
            return Err(SamplingError::DuplicateId(c.id.clone()));
        }
        if !(0.0..=1.0).contains(&c.confidence_in_gold) {
            return Err(SamplingError::Config(format!(
                "candidate `{}` has confidence {} outside [0, 1]",
                c.id, c.confidence_in_gold
            )));
        }
    }

    let mut out = Vec::new();
    for (stream, subset) in [Subset::Easy, Subset::Hard].into_iter().enumerate() {
        let pool: Vec<&Candidate> = candidates.iter().filter(|c| c.subset == subset).collect();
        if pool.is_empty() {
            continue;
        }
        if total_per_subset > pool.len() {
            return Err(SamplingError::NotEnoughCandidates {
                subset,
                requested: total_per_subset,
                available: pool.len(),
            });
        }

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream as u64);
        let mut deciles: [Vec<&str>; 10] = Default::default();
        for c in &pool {
            deciles[decile_of(c.confidence_in_gold)].push(&c.id);
        }
        // Canonical order first so the draw depends only on the candidate set.
        for d in deciles.iter_mut() {
            d.sort_unstable();
            d.shuffle(&mut rng);
        }

        let mut taken = [0usize; 10];
        let mut selected = 0;
        while selected < total_per_subset {
            let before = selected;
            for (d, bin) in deciles.iter().enumerate() {
                if selected == total_per_subset {
                    break;
                }
                let capped = cfg.quota_per_decile.is_some_and(|q| taken[d] >= q);
                if taken[d] < bin.len() && !capped {
                    out.push(Selection {
                        id: bin[taken[d]].to_string(),
                        subset,
                        decile: d,
                    });
                    taken[d] += 1;
                    selected += 1;
                }
            }
            if selected == before {
                return Err(SamplingError::Config(format!(
                    "quota_per_decile = {:?} allows only {selected} of {total_per_subset} {subset} selections",
                    cfg.quota_per_decile
                )));
            }
        }
    }
    Ok(out)
}
