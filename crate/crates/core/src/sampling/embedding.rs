use std::collections::HashSet;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};

use super::SamplingError;
use crate::data::DataError;
use crate::jsonl;

/// One line of `embeddings.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedExample {
    pub example_id: String,
    /// Accepts `true`/`false` or `1`/`0` on input; written as `0`/`1`.
    #[serde(deserialize_with = "binary_label", serialize_with = "label_as_int")]
    pub label: bool,
    pub vector: Vec<f64>,
}

fn binary_label<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Bool(bool),
        Int(i64),
    }
    match Raw::deserialize(d)? {
        Raw::Bool(b) => Ok(b),
        Raw::Int(0) => Ok(false),
        Raw::Int(1) => Ok(true),
        Raw::Int(other) => Err(serde::de::Error::custom(format!(
            "label must be 0 or 1, got {other}"
        ))),
    }
}

fn label_as_int<S: serde::Serializer>(label: &bool, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u8(u8::from(*label))
}

/// Checks shared dimensionality, finiteness and id uniqueness.
pub(crate) fn validate(examples: &[EmbeddedExample]) -> Result<(), SamplingError> {
    let mut ids = HashSet::new();
    let dim = examples.first().map_or(0, |e| e.vector.len());
    for e in examples {
        if !ids.insert(e.example_id.as_str()) {
            return Err(SamplingError::DuplicateId(e.example_id.clone()));
        }
        if e.vector.len() != dim {
            return Err(SamplingError::Dimension {
                id: e.example_id.clone(),
                expected: dim,
                found: e.vector.len(),
            });
        }
        if e.vector.iter().any(|x| !x.is_finite()) {
            return Err(SamplingError::NonFinite(e.example_id.clone()));
        }
    }
    Ok(())
}

pub fn load_embeddings(path: &Path) -> Result<Vec<EmbeddedExample>, SamplingError> {
    let reader = jsonl::open(path).map_err(|e| DataError::io(path, e))?;
    read_embeddings(reader, &path.display().to_string())
}

pub fn read_embeddings<R: BufRead>(
    reader: R,
    origin: &str,
) -> Result<Vec<EmbeddedExample>, SamplingError> {
    let examples: Vec<EmbeddedExample> = jsonl::read_lines(reader)
        .map_err(|e| DataError::from_line_error(origin, e))?
        .into_iter()
        .map(|l| l.value)
        .collect();
    validate(&examples)?;
    Ok(examples)
}
