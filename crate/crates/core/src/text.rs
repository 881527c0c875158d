//! Tokenization shared by the lexical metrics.
//!
//! Text is lowercased and split on Unicode whitespace. Punctuation stays
//! attached to its token.

use std::collections::BTreeSet;

pub fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split_whitespace().map(str::to_lowercase)
}

pub fn token_set(text: &str) -> BTreeSet<String> {
    tokens(text).collect()
}

/// Deduplicated, lexicographically sorted tokens joined by single spaces.
pub fn canonical_bag(text: &str) -> String {
    token_set(text).into_iter().collect::<Vec<_>>().join(" ")
}
