//! Word-sense disambiguation combining a knowledge-based and a
//! corpus-based method.
//!
//! The knowledge-based side walks a WordNet-style IS-A taxonomy: the
//! specification-marks algorithm counts context words under shared
//! subsumers, backed by four gloss/taxonomy heuristics and a
//! domain-relevance heuristic built from domain-labeled glosses. The
//! corpus-based side trains per-word conditional maximum-entropy
//! classifiers by generalized iterative scaling over collocation,
//! POS-window, keyword and dependency features, with per-word and
//! per-POS feature selection under stratified cross-validation.
//! [`hybrid`] wires the two together (sense pre-labeling, domain
//! features, joint voting) and [`eval`] scores and compares answer sets.
//!
//! Everything is deterministic: taxonomy traversals follow declaration
//! order, randomized splits flow from a single seed, and all tie-breaks
//! are fixed (sense-frequency rank, then lexicographic synset id).

pub mod config;
pub mod domains;
pub mod eval;
pub mod hybrid;
pub mod lexkb;
pub mod maxent;
pub mod specmarks;

#[cfg(test)]
pub(crate) mod testutil {
    use crate::lexkb::LexicalDb;
    use std::path::PathBuf;

    pub fn fixture_path(name: &str) -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("../../fixtures")
            .join(name)
    }

    pub fn load_fixture(name: &str) -> LexicalDb {
        let file = std::fs::File::open(fixture_path(name)).expect("fixture exists");
        LexicalDb::load(std::io::BufReader::new(file)).expect("fixture loads")
    }
}
