//! Paraphrase diversity: bag-of-words lexical distance, syntactic distance on
//! depth-truncated constituency trees, and per-group summaries that also
//! average externally supplied semantic-similarity scores.
//!
//! Normalizers: lexical edit distance is divided by the longer canonical
//! string's length, tree edit distance by the two truncated trees' combined
//! node count. Both keep the distances in `[0, 1]`.

mod lexical;
mod summary;
mod ted;
mod tree;

pub use lexical::lexical_distance;
pub use summary::{
    load_pairs, pair_metrics, read_pairs, summarize_diversity, write_summary_csv, DiversitySummary,
    PairMetrics,
    PairSource, ParaphrasePairRecord,
};
pub use ted::tree_edit_distance;
pub use tree::{ParseTree, TreeError};

/// Constituency trees are compared down to this depth (root = 1).
pub const SYNTACTIC_DEPTH: usize = 3;

/// Normalized Zhang–Shasha distance between the depth-3 truncations.
pub fn syntactic_distance(a: &ParseTree, b: &ParseTree) -> f64 {
    let (a, b) = (a.truncate(SYNTACTIC_DEPTH), b.truncate(SYNTACTIC_DEPTH));
    tree_edit_distance(&a, &b) as f64 / (a.node_count() + b.node_count()) as f64
}
