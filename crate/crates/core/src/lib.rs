//! Paraphrastic consistency metrology.
//!
//! `paracons` scores classifier predictions over *buckets* of paraphrased
//! reasoning problems. The headline quantity is P_C, the probability that two
//! paraphrases of the same problem are both answered correctly or both
//! answered incorrectly, together with its variance decomposition (VAP and
//! PVAP) and confidence-stratified corrections.
//!
//! Supporting tooling covers the dataset-construction side: AFLite adversarial
//! filtering over precomputed embeddings, decile round-robin stratified
//! sampling, paraphrase diversity metrics and partial-input artifact analysis.
//!
//! Metrics over bucket correctness are computed in exact rational arithmetic
//! from integer tallies and rounded once, so results do not depend on bucket
//! order or on whether work ran in parallel.

pub mod artifact;
pub mod data;
pub mod diversity;
pub mod exec;
pub mod jsonl;
pub mod metrics;
pub mod report;
pub mod sampling;
pub mod synth;
pub mod text;

pub use exec::Execution;
