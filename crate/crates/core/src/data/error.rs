use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Failure while loading or validating record files. `origin` is the file
/// path (or a caller-supplied name for in-memory readers); lines are 1-based.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{origin}:{line}: malformed record: {message}")]
    Malformed {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("{origin}:{line}: duplicate problem_id `{problem_id}`")]
    DuplicateProblem {
        origin: String,
        line: usize,
        problem_id: String,
    },
    #[error("{origin}:{line}: duplicate item_id `{item_id}`")]
    DuplicateItem {
        origin: String,
        line: usize,
        item_id: String,
    },
    #[error("{origin}:{line}: bucket `{problem_id}` has {count} items with source \"original\", expected exactly one")]
    OriginalCount {
        origin: String,
        line: usize,
        problem_id: String,
        count: usize,
    },
    #[error("{origin}:{line}: label `{label}` breaks the binary alphabet of dataset `{dataset_tag}` (labels {labels:?})")]
    LabelAlphabet {
        origin: String,
        line: usize,
        dataset_tag: String,
        label: String,
        labels: Vec<String>,
    },
    #[error("{0}")]
    Alphabet(String),
    #[error("{origin}:{line}: confidence {value} is outside [0, 1]")]
    Confidence {
        origin: String,
        line: usize,
        value: f64,
    },
    #[error("{origin}:{line}: unknown item_id `{item_id}`")]
    UnknownItem {
        origin: String,
        line: usize,
        item_id: String,
    },
    #[error("{origin}:{line}: duplicate prediction for run `{run_id}`, item `{item_id}`")]
    DuplicatePrediction {
        origin: String,
        line: usize,
        run_id: String,
        item_id: String,
    },
}

impl DataError {
    pub(crate) fn from_line_error(origin: &str, err: crate::jsonl::LineError) -> Self {
        match err {
            crate::jsonl::LineError::Io(source) => DataError::Io {
                path: PathBuf::from(origin),
                source,
            },
            crate::jsonl::LineError::Parse { line, message } => DataError::Malformed {
                origin: origin.to_string(),
                line,
                message,
            },
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: io::Error) -> Self {
        DataError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
