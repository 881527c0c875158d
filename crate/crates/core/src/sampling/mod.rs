//! Dataset-construction side: AFLite adversarial filtering over precomputed
//! embeddings and confidence-decile stratified sampling.

mod aflite;
mod embedding;
mod probe;
mod stratify;

use thiserror::Error;

pub use aflite::{aflite_filter, aflite_filter_with, AfliteConfig, FilterResult};
pub use embedding::{load_embeddings, read_embeddings, EmbeddedExample};
pub use probe::{train_probe, LinearProbe, ProbeConfig};
pub use stratify::{
    read_candidates, stratified_sample, Candidate, Selection, StratifyConfig, Subset,
};

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error(transparent)]
    Data(#[from] crate::data::DataError),
    #[error("{origin}:{line}: {message}")]
    Record {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("training set contains only one label")]
    SingleClass,
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("example `{0}` has non-finite features")]
    NonFinite(String),
    #[error("example `{id}` has dimension {found}, expected {expected}")]
    Dimension {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate example id `{0}`")]
    DuplicateId(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{requested} requested from the {subset} subset, which has only {available} candidates")]
    NotEnoughCandidates {
        subset: Subset,
        requested: usize,
        available: usize,
    },
}
