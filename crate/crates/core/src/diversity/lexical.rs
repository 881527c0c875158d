use crate::text::canonical_bag;

/// Character-level Levenshtein distance between the two texts' canonical
/// bags of words, divided by the longer bag's length in characters.
pub fn lexical_distance(a: &str, b: &str) -> f64 {
    let (a, b) = (canonical_bag(a), canonical_bag(b));
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 0.0;
    }
    strsim::levenshtein(&a, &b) as f64 / longest as f64
}
