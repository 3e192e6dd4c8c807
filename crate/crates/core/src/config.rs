//! Shared tokenization and tunable parameters.

use std::collections::BTreeSet;
use std::io::BufRead;

/// Fixed 50-word English function-word list used when no stop list is
/// supplied. `fixtures/stoplist.txt` mirrors this.
pub const DEFAULT_STOP_WORDS: [&str; 50] = [
    "a", "an", "the", "and", "or", "but", "if", "of", "in", "on", "at", "by", "for", "with",
    "to", "from", "as", "is", "are", "was", "were", "be", "been", "being", "that", "this",
    "these", "those", "it", "its", "he", "she", "his", "her", "they", "them", "who", "whom",
    "which", "what", "not", "no", "any", "some", "all", "my", "your", "our", "their", "has",
];

/// Words ignored by gloss tokenization and content-word tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopList {
    words: BTreeSet<String>,
}

impl Default for StopList {
    fn default() -> Self {
        StopList {
            words: DEFAULT_STOP_WORDS.iter().map(|w| w.to_string()).collect(),
        }
    }
}

impl StopList {
    pub fn empty() -> Self {
        StopList {
            words: BTreeSet::new(),
        }
    }

    /// One word per line; blank lines and `#` comments are skipped.
    pub fn from_reader(reader: impl BufRead) -> std::io::Result<Self> {
        let mut words = BTreeSet::new();
        for line in reader.lines() {
            let line = line?;
            let word = line.trim();
            if word.is_empty() || word.starts_with('#') {
                continue;
            }
            words.insert(word.to_lowercase());
        }
        Ok(StopList { words })
    }

    pub fn is_stop(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    /// A content word is anything that survives tokenization: not a stop
    /// word and at least two characters long.
    pub fn is_content(&self, word: &str) -> bool {
        word.chars().count() >= 2 && !self.is_stop(word)
    }
}

/// Splits on non-alphanumerics, lowercases, drops tokens shorter than
/// two characters and stop words.
pub fn tokenize(text: &str, stops: &StopList) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .map(str::to_lowercase)
        .filter(|t| stops.is_content(t))
        .collect()
}

/// Iterative-scaling hyperparameters.
#[derive(Debug, Clone, Copy)]
pub struct TrainParams {
    pub max_iters: usize,
    /// Convergence threshold on the largest |empirical - model| feature
    /// count gap.
    pub tol: f64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            max_iters: 100,
            tol: 1e-4,
        }
    }
}

/// Relevant-domains parameters.
#[derive(Debug, Clone, Default)]
pub struct DomainParams {
    pub top_k: TopK,
    /// Domain labels excluded from context and sense vectors (e.g. an
    /// overly generic catch-all label).
    pub blacklist: BTreeSet<String>,
}

/// Per-word cutoff when summing association-ratio entries into a vector.
#[derive(Debug, Clone, Copy)]
pub struct TopK(pub usize);

impl Default for TopK {
    fn default() -> Self {
        TopK(8)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_stoplist_matches_fixture_file() {
        let file = std::fs::File::open(crate::testutil::fixture_path("stoplist.txt")).unwrap();
        let from_file = StopList::from_reader(std::io::BufReader::new(file)).unwrap();
        assert_eq!(from_file, StopList::default());
    }

    #[test]
    fn tokenize_splits_lowercases_and_filters() {
        let stops = StopList::default();
        assert_eq!(
            tokenize("A man-made OBJECT; \"it was full\"", &stops),
            vec!["man", "made", "object", "full"]
        );
        assert!(tokenize("", &stops).is_empty());
        // single-letter tokens are dropped even when not stop words
        assert_eq!(tokenize("x y water", &stops), vec!["water"]);
    }
}
