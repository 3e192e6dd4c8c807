//! Conditional maximum-entropy word-sense classifiers.
//!
//! One classifier per word. Features pair an observable test on the
//! context with one sense: non-collapsed features test a single value
//! at a slot (word at -1, POS at +2, a collocation pair, a keyword
//! noun, ...), collapsed features test membership of the observed value
//! in the bag of values seen with that sense in training. Parameters
//! are fit by generalized iterative scaling; classification picks the
//! highest conditional probability, falling back to the most frequent
//! sense when nothing discriminates.

mod io;
mod train;

pub use io::{parse_corpus, read_classifier, write_classifier, write_corpus, CorpusError};
pub use train::{
    cross_validate, run_me_systems, select_best, train, train_with_extra, CvReport,
    MeSystemsAnswer, SelectMode, SelectionReport,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::config::StopList;
use crate::lexkb::Pos;

/// One token of an annotated example. Dependency fields come from the
/// corpus (annotations are ingested, never computed here).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedToken {
    pub surface: String,
    pub lemma: String,
    pub pos_tag: String,
    pub dep_head: Option<usize>,
    pub dep_rel: Option<String>,
    pub multiword: bool,
}

/// A sense-labeled occurrence of the target word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingExample {
    pub id: String,
    pub target_lemma: String,
    pub target_pos: Pos,
    pub sense: String,
    pub tokens: Vec<AnnotatedToken>,
    pub target_index: usize,
}

impl TrainingExample {
    fn token_at(&self, offset: i8) -> Option<&AnnotatedToken> {
        let idx = self.target_index as isize + offset as isize;
        if idx < 0 {
            None
        } else {
            self.tokens.get(idx as usize)
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MaxentError {
    #[error("selection code: unknown character {ch:?} at position {pos}")]
    UnknownCode { ch: char, pos: usize },
    #[error("selection code: {ch:?} at position {pos} needs a numeric threshold")]
    MissingThreshold { ch: char, pos: usize },
    #[error("no training examples")]
    NoExamples,
    #[error("examples mix target words: {0:?} and {1:?}")]
    MixedWords(String, String),
    #[error("example targets {got:?} but the classifier is for {want:?}")]
    WordMismatch { want: String, got: String },
    #[error("no sense kept at least {folds} examples; cross-validation is impossible")]
    NoSenseSurvives { folds: usize },
    #[error("cross-validation needs at least 2 folds")]
    TooFewFolds,
    #[error("select_best needs at least one candidate selection")]
    NoCandidates,
}

/// One feature template from the compact selection strings.
///
/// Lowercase codes are non-collapsed (one feature per observed value and
/// sense); uppercase codes are collapsed (one feature per sense, testing
/// bag membership). `k`/`K` carry the keyword percentage threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Template {
    TargetForm,        // 0
    Words,             // s
    PosTags,           // p
    LemmaPairs,        // b
    WordPairs,         // c
    Keywords(u32),     // k<m>
    Relation,          // r
    Head,              // d
    Multiword,         // m
    ContentLemmaBag,   // L
    ContentWordBag,    // W
    WordBag,           // S
    LemmaPairBag,      // B
    WordPairBag,       // C
    PosBag,            // P
    HeadBag,           // D
    MultiwordBag,      // M
    KeywordBag(u32),   // K<m>
}

/// Ordered template list, round-tripping with the compact code strings
/// like `sbcprdk3` or `0LWSBCk5`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureSelection {
    pub templates: Vec<Template>,
}

impl FeatureSelection {
    pub fn parse(code: &str) -> Result<FeatureSelection, MaxentError> {
        let chars: Vec<char> = code.chars().collect();
        let mut templates = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            let tpl = match ch {
                '0' => Template::TargetForm,
                's' => Template::Words,
                'p' => Template::PosTags,
                'b' => Template::LemmaPairs,
                'c' => Template::WordPairs,
                'r' => Template::Relation,
                'd' => Template::Head,
                'm' => Template::Multiword,
                'L' => Template::ContentLemmaBag,
                'W' => Template::ContentWordBag,
                'S' => Template::WordBag,
                'B' => Template::LemmaPairBag,
                'C' => Template::WordPairBag,
                'P' => Template::PosBag,
                'D' => Template::HeadBag,
                'M' => Template::MultiwordBag,
                'k' | 'K' => {
                    let start = i + 1;
                    let mut end = start;
                    while end < chars.len() && chars[end].is_ascii_digit() {
                        end += 1;
                    }
                    if end == start {
                        return Err(MaxentError::MissingThreshold { ch, pos: i });
                    }
                    let m: u32 = chars[start..end].iter().collect::<String>().parse().unwrap();
                    i = end - 1;
                    if ch == 'k' {
                        Template::Keywords(m)
                    } else {
                        Template::KeywordBag(m)
                    }
                }
                other => return Err(MaxentError::UnknownCode { ch: other, pos: i }),
            };
            templates.push(tpl);
            i += 1;
        }
        Ok(FeatureSelection { templates })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for tpl in &self.templates {
            match tpl {
                Template::TargetForm => out.push('0'),
                Template::Words => out.push('s'),
                Template::PosTags => out.push('p'),
                Template::LemmaPairs => out.push('b'),
                Template::WordPairs => out.push('c'),
                Template::Keywords(m) => out.push_str(&format!("k{m}")),
                Template::Relation => out.push('r'),
                Template::Head => out.push('d'),
                Template::Multiword => out.push('m'),
                Template::ContentLemmaBag => out.push('L'),
                Template::ContentWordBag => out.push('W'),
                Template::WordBag => out.push('S'),
                Template::LemmaPairBag => out.push('B'),
                Template::WordPairBag => out.push('C'),
                Template::PosBag => out.push('P'),
                Template::HeadBag => out.push('D'),
                Template::MultiwordBag => out.push('M'),
                Template::KeywordBag(m) => out.push_str(&format!("K{m}")),
            }
        }
        out
    }
}

impl fmt::Display for FeatureSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Value emitted at out-of-range window positions.
pub const BOUNDARY: &str = "<none>";

const WINDOW: [i8; 6] = [-3, -2, -1, 1, 2, 3];
const SPANS: [(i8, i8); 3] = [(-2, -1), (-1, 1), (1, 2)];

/// Where a value was observed: template kind plus window position.
/// Collapsed and non-collapsed variants of one template observe the same
/// values under distinct slots so both can coexist in a selection.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Slot {
    TargetForm,
    Word(i8),
    PosTag(i8),
    LemmaPair(i8, i8),
    WordPair(i8, i8),
    Keyword(u32),
    Relation,
    Head,
    Multiword,
    ContentLemma(i8),
    ContentWord(i8),
    WordBag(i8),
    PosBag(i8),
    LemmaPairBag(i8, i8),
    WordPairBag(i8, i8),
    HeadBag,
    MultiwordBag,
    KeywordBag(u32),
    /// Domain label of an adjacent noun (hybrid scheme).
    DomainAt(i8),
    /// One of the whole-context top domains (hybrid scheme).
    ContextDomain,
}

impl Slot {
    /// Collapsed slots define one bag feature per sense instead of one
    /// feature per value.
    pub fn is_collapsed(&self) -> bool {
        matches!(
            self,
            Slot::ContentLemma(_)
                | Slot::ContentWord(_)
                | Slot::WordBag(_)
                | Slot::PosBag(_)
                | Slot::LemmaPairBag(..)
                | Slot::WordPairBag(..)
                | Slot::HeadBag
                | Slot::MultiwordBag
                | Slot::KeywordBag(_)
        )
    }

    fn is_keyword(&self) -> Option<u32> {
        match self {
            Slot::Keyword(m) | Slot::KeywordBag(m) => Some(*m),
            _ => None,
        }
    }
}

/// Active observations of one example: slot -> values seen there.
pub type Observations = BTreeMap<Slot, BTreeSet<String>>;

fn pair_value(left: Option<&str>, right: Option<&str>) -> String {
    format!(
        "{}|{}",
        left.unwrap_or(BOUNDARY),
        right.unwrap_or(BOUNDARY)
    )
}

/// Extracts the active predicate values of `ex` under `sel`. Window
/// positions run over +/-1..3 with nothing skipped; out-of-range
/// positions observe the boundary sentinel. Content-word slots skip
/// stop words and boundaries instead of padding.
pub fn extract_features(
    ex: &TrainingExample,
    sel: &FeatureSelection,
    stops: &StopList,
) -> Observations {
    let mut obs = Observations::new();
    let mut put = |slot: Slot, value: String| {
        obs.entry(slot).or_default().insert(value);
    };
    for tpl in &sel.templates {
        match tpl {
            Template::TargetForm => {
                put(Slot::TargetForm, ex.tokens[ex.target_index].surface.clone());
            }
            Template::Words | Template::WordBag => {
                for p in WINDOW {
                    let v = ex.token_at(p).map_or(BOUNDARY.into(), |t| t.surface.clone());
                    match tpl {
                        Template::Words => put(Slot::Word(p), v),
                        _ => put(Slot::WordBag(p), v),
                    }
                }
            }
            Template::PosTags | Template::PosBag => {
                for p in WINDOW {
                    let v = ex.token_at(p).map_or(BOUNDARY.into(), |t| t.pos_tag.clone());
                    match tpl {
                        Template::PosTags => put(Slot::PosTag(p), v),
                        _ => put(Slot::PosBag(p), v),
                    }
                }
            }
            Template::LemmaPairs | Template::LemmaPairBag => {
                for (a, b) in SPANS {
                    let v = pair_value(
                        ex.token_at(a).map(|t| t.lemma.as_str()),
                        ex.token_at(b).map(|t| t.lemma.as_str()),
                    );
                    match tpl {
                        Template::LemmaPairs => put(Slot::LemmaPair(a, b), v),
                        _ => put(Slot::LemmaPairBag(a, b), v),
                    }
                }
            }
            Template::WordPairs | Template::WordPairBag => {
                for (a, b) in SPANS {
                    let v = pair_value(
                        ex.token_at(a).map(|t| t.surface.as_str()),
                        ex.token_at(b).map(|t| t.surface.as_str()),
                    );
                    match tpl {
                        Template::WordPairs => put(Slot::WordPair(a, b), v),
                        _ => put(Slot::WordPairBag(a, b), v),
                    }
                }
            }
            Template::Keywords(m) | Template::KeywordBag(m) => {
                let slot = match tpl {
                    Template::Keywords(_) => Slot::Keyword(*m),
                    _ => Slot::KeywordBag(*m),
                };
                for (i, tok) in ex.tokens.iter().enumerate() {
                    if i != ex.target_index && tok.pos_tag.starts_with('N') {
                        put(slot.clone(), tok.lemma.clone());
                    }
                }
            }
            Template::Relation => {
                if let Some(rel) = &ex.tokens[ex.target_index].dep_rel {
                    put(Slot::Relation, rel.clone());
                }
            }
            Template::Head | Template::HeadBag => {
                if let Some(head) = ex.tokens[ex.target_index].dep_head {
                    if let Some(tok) = ex.tokens.get(head) {
                        match tpl {
                            Template::Head => put(Slot::Head, tok.surface.clone()),
                            _ => put(Slot::HeadBag, tok.surface.clone()),
                        }
                    }
                }
            }
            Template::Multiword | Template::MultiwordBag => {
                let v = if ex.tokens[ex.target_index].multiword { "1" } else { "0" };
                match tpl {
                    Template::Multiword => put(Slot::Multiword, v.into()),
                    _ => put(Slot::MultiwordBag, v.into()),
                }
            }
            Template::ContentLemmaBag | Template::ContentWordBag => {
                for p in WINDOW {
                    if let Some(tok) = ex.token_at(p) {
                        match tpl {
                            Template::ContentLemmaBag => {
                                if stops.is_content(&tok.lemma) {
                                    put(Slot::ContentLemma(p), tok.lemma.clone());
                                }
                            }
                            _ => {
                                if stops.is_content(&tok.surface.to_lowercase()) {
                                    put(Slot::ContentWord(p), tok.surface.clone());
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    obs
}

/// What a feature tests at its slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FeatureTest {
    /// The slot observed exactly this value.
    Value(String),
    /// The slot observed some value in the bag (collapsed form).
    Bag(BTreeSet<String>),
}

/// One feature function: fires for (context, sense) when the sense
/// matches and the slot test passes.
#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub slot: Slot,
    pub test: FeatureTest,
    /// Index into the classifier's sense list.
    pub sense: usize,
    /// Multiplicative weight, finite and positive.
    pub alpha: f64,
}

impl Feature {
    pub fn active(&self, obs: &Observations) -> bool {
        match obs.get(&self.slot) {
            None => false,
            Some(values) => match &self.test {
                FeatureTest::Value(v) => values.contains(v),
                FeatureTest::Bag(bag) => values.iter().any(|v| bag.contains(v)),
            },
        }
    }
}

/// Training bookkeeping kept with the model.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingMeta {
    pub examples: usize,
    pub iterations: usize,
    pub converged: bool,
    pub final_gap: f64,
    /// Log-likelihood at each recorded iteration (non-decreasing).
    pub log_likelihood: Vec<f64>,
    /// Single sense in training: classification is constant.
    pub degenerate: bool,
    /// Cross-validated accuracy, when measured (drives pre-labeling).
    pub cv_precision: Option<f64>,
}

/// A trained per-word classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pub word: String,
    pub pos: Pos,
    /// Frequency-ranked sense labels, most frequent first (count
    /// descending, label ascending on ties).
    pub senses: Vec<String>,
    /// Empirical sense distribution from training, aligned with
    /// `senses`; returned when no known feature fires.
    pub priors: Vec<f64>,
    pub features: Vec<Feature>,
    pub selection: FeatureSelection,
    pub meta: TrainingMeta,
}

/// Classification result: chosen sense, full distribution over the
/// classifier's senses, and whether the most-frequent-sense fallback
/// decided.
#[derive(Debug, Clone, PartialEq)]
pub struct MeAnswer {
    pub sense: String,
    pub distribution: Vec<(String, f64)>,
    pub mfs_fallback: bool,
}

impl Classifier {
    pub fn mfs(&self) -> &str {
        &self.senses[0]
    }

    /// Conditional class scores in log space for precomputed
    /// observations.
    fn log_scores(&self, obs: &Observations) -> (Vec<f64>, usize) {
        let mut scores = vec![0.0; self.senses.len()];
        let mut active = 0;
        for f in &self.features {
            if f.active(obs) {
                scores[f.sense] += f.alpha.ln();
                active += 1;
            }
        }
        (scores, active)
    }

    pub(crate) fn classify_obs(&self, obs: &Observations) -> MeAnswer {
        let (log_scores, active) = self.log_scores(obs);
        if active == 0 {
            // nothing discriminates: most frequent sense, prior mass
            return MeAnswer {
                sense: self.senses[0].clone(),
                distribution: self
                    .senses
                    .iter()
                    .cloned()
                    .zip(self.priors.iter().copied())
                    .collect(),
                mfs_fallback: true,
            };
        }
        let max = log_scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let unnorm: Vec<f64> = log_scores.iter().map(|s| (s - max).exp()).collect();
        let z: f64 = unnorm.iter().sum();
        let probs: Vec<f64> = unnorm.iter().map(|u| u / z).collect();

        let best = probs.iter().cloned().fold(0.0, f64::max);
        let tied: Vec<usize> = (0..probs.len())
            .filter(|&i| (best - probs[i]) <= best * 1e-12)
            .collect();
        let (winner, fallback) = if tied.len() == 1 {
            (tied[0], false)
        } else {
            // tie: most frequent sense among the tied ones
            (tied[0], true)
        };
        MeAnswer {
            sense: self.senses[winner].clone(),
            distribution: self
                .senses
                .iter()
                .cloned()
                .zip(probs.iter().copied())
                .collect(),
            mfs_fallback: fallback,
        }
    }

    /// Classifies one context. Unseen predicates are ignored; exact
    /// probability ties (and featureless contexts) fall back to the most
    /// frequent sense.
    pub fn classify(
        &self,
        ex: &TrainingExample,
        stops: &StopList,
    ) -> Result<MeAnswer, MaxentError> {
        if ex.target_lemma != self.word || ex.target_pos != self.pos {
            return Err(MaxentError::WordMismatch {
                want: self.word.clone(),
                got: ex.target_lemma.clone(),
            });
        }
        Ok(self.classify_obs(&extract_features(ex, &self.selection, stops)))
    }
}

/// Majority vote over per-system answers for one instance. Ties break
/// by system priority (MEbfs.pos, then MEbfs, then MEfix), then by the
/// most frequent sense, then by input order.
pub fn vote_me(answers: &[(String, String)], mfs: Option<&str>) -> Option<String> {
    if answers.is_empty() {
        return None;
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (_, sense) in answers {
        *counts.entry(sense).or_default() += 1;
    }
    let best = *counts.values().max().unwrap();
    let tied: BTreeSet<&str> = counts
        .iter()
        .filter(|(_, c)| **c == best)
        .map(|(s, _)| *s)
        .collect();
    if tied.len() == 1 {
        return Some(tied.into_iter().next().unwrap().to_string());
    }
    for system in ["MEbfs.pos", "MEbfs", "MEfix"] {
        if let Some((_, sense)) = answers.iter().find(|(sys, _)| sys == system) {
            if tied.contains(sense.as_str()) {
                return Some(sense.clone());
            }
        }
    }
    if let Some(mfs) = mfs {
        if tied.contains(mfs) {
            return Some(mfs.to_string());
        }
    }
    answers
        .iter()
        .find(|(_, sense)| tied.contains(sense.as_str()))
        .map(|(_, sense)| sense.clone())
}


#[cfg(test)]
mod tests {
    use super::testsupport::*;
    use super::*;

    #[test]
    fn selection_round_trips_table_strings() {
        for code in ["sbcprdk3", "0LWSBck5", "0LWSBCk5", "LWsbCPD", "0Sprd", "sk5", "", "K10"] {
            let sel = FeatureSelection::parse(code).unwrap();
            assert_eq!(sel.render(), code, "round trip of {code:?}");
        }
        let sel = FeatureSelection::parse("sbcprdk3").unwrap();
        assert_eq!(
            sel.templates,
            vec![
                Template::Words,
                Template::LemmaPairs,
                Template::WordPairs,
                Template::PosTags,
                Template::Relation,
                Template::Head,
                Template::Keywords(3),
            ]
        );
        assert_eq!(
            FeatureSelection::parse("0LWSBck5").unwrap().templates,
            vec![
                Template::TargetForm,
                Template::ContentLemmaBag,
                Template::ContentWordBag,
                Template::WordBag,
                Template::LemmaPairBag,
                Template::WordPairs,
                Template::Keywords(5),
            ]
        );
    }

    #[test]
    fn selection_rejects_unknown_codes_with_position() {
        match FeatureSelection::parse("sb1c") {
            Err(MaxentError::UnknownCode { ch: '1', pos: 2 }) => {}
            other => panic!("expected unknown-code error, got {other:?}"),
        }
        match FeatureSelection::parse("sbk") {
            Err(MaxentError::MissingThreshold { ch: 'k', pos: 2 }) => {}
            other => panic!("expected missing-threshold error, got {other:?}"),
        }
    }

    #[test]
    fn empty_selection_extracts_nothing() {
        let ex = example("e", "interest", "s1", [
            ("the", "the", "DET"),
            ("best", "best", "ADJ"),
            ("interest", "interest", "NOUN"),
            ("of", "of", "PREP"),
            ("both", "both", "DET"),
        ]);
        let obs = extract_features(&ex, &FeatureSelection::default(), &StopList::default());
        assert!(obs.is_empty());
    }

    #[test]
    fn window_positions_emit_boundary_sentinels() {
        let ex = example("e", "interest", "s1", [
            ("the", "the", "DET"),
            ("best", "best", "ADJ"),
            ("interest", "interest", "NOUN"),
            ("of", "of", "PREP"),
            ("both", "both", "DET"),
        ]);
        let sel = FeatureSelection::parse("sp").unwrap();
        let obs = extract_features(&ex, &sel, &StopList::default());
        assert!(obs[&Slot::Word(-3)].contains(BOUNDARY));
        assert!(obs[&Slot::Word(-1)].contains("best"));
        assert!(obs[&Slot::Word(3)].contains(BOUNDARY));
        assert!(obs[&Slot::PosTag(1)].contains("PREP"));
    }

    #[test]
    fn collocations_pair_lemmas_and_words() {
        let ex = example("e", "interest", "s1", [
            ("the", "the", "DET"),
            ("persons", "person", "NOUN"),
            ("interest", "interest", "NOUN"),
            ("of", "of", "PREP"),
            ("both", "both", "DET"),
        ]);
        let sel = FeatureSelection::parse("bc").unwrap();
        let obs = extract_features(&ex, &sel, &StopList::default());
        assert!(obs[&Slot::LemmaPair(-2, -1)].contains("the|person"));
        assert!(obs[&Slot::WordPair(-2, -1)].contains("the|persons"));
        assert!(obs[&Slot::LemmaPair(-1, 1)].contains("person|of"));
    }

    #[test]
    fn keyword_slot_collects_non_target_nouns() {
        let ex = example("e", "interest", "s1", [
            ("bank", "bank", "NOUN"),
            ("best", "best", "ADJ"),
            ("interest", "interest", "NOUN"),
            ("rates", "rate", "NOUN"),
            ("both", "both", "DET"),
        ]);
        let sel = FeatureSelection::parse("k10").unwrap();
        let obs = extract_features(&ex, &sel, &StopList::default());
        let keywords = &obs[&Slot::Keyword(10)];
        assert!(keywords.contains("bank") && keywords.contains("rate"));
        assert!(!keywords.contains("interest"));
    }

    #[test]
    fn content_word_slots_skip_stopwords_and_boundaries() {
        let ex = example("e", "interest", "s1", [
            ("the", "the", "DET"),
            ("best", "best", "ADJ"),
            ("interest", "interest", "NOUN"),
            ("of", "of", "PREP"),
            ("loans", "loan", "NOUN"),
        ]);
        let sel = FeatureSelection::parse("LW").unwrap();
        let obs = extract_features(&ex, &sel, &StopList::default());
        assert!(!obs.contains_key(&Slot::ContentLemma(-3)));
        assert!(!obs.contains_key(&Slot::ContentLemma(-2))); // "the"
        assert!(obs[&Slot::ContentLemma(-1)].contains("best"));
        assert!(!obs.contains_key(&Slot::ContentLemma(1))); // "of"
        assert!(obs[&Slot::ContentWord(2)].contains("loans"));
    }

    #[test]
    fn dependency_and_multiword_slots_read_the_target_token() {
        let mut ex = example("e", "interest", "s1", [
            ("banks", "bank", "NOUN"),
            ("expressed", "express", "VERB"),
            ("interest", "interest", "NOUN"),
            ("in", "in", "PREP"),
            ("rates", "rate", "NOUN"),
        ]);
        ex.tokens[2].dep_head = Some(1);
        ex.tokens[2].dep_rel = Some("object".into());
        ex.tokens[2].multiword = true;
        let sel = FeatureSelection::parse("rdmDM").unwrap();
        let obs = extract_features(&ex, &sel, &StopList::default());
        assert!(obs[&Slot::Relation].contains("object"));
        assert!(obs[&Slot::Head].contains("expressed"));
        assert!(obs[&Slot::HeadBag].contains("expressed"));
        assert!(obs[&Slot::Multiword].contains("1"));
        assert!(obs[&Slot::MultiwordBag].contains("1"));
        // without annotations the r/d slots stay silent
        let bare = example("b", "interest", "s1", [
            ("a", "a", "X"),
            ("b", "b", "X"),
            ("interest", "interest", "NOUN"),
            ("c", "c", "X"),
            ("d", "d", "X"),
        ]);
        let obs = extract_features(&bare, &sel, &StopList::default());
        assert!(!obs.contains_key(&Slot::Relation));
        assert!(!obs.contains_key(&Slot::Head));
        assert!(obs[&Slot::Multiword].contains("0"));
    }

    #[test]
    fn vote_me_unanimous_and_majority() {
        let answers = vec![
            ("MEfix".to_string(), "a".to_string()),
            ("MEbfs".to_string(), "a".to_string()),
            ("MEbfs.pos".to_string(), "a".to_string()),
        ];
        assert_eq!(vote_me(&answers, None), Some("a".into()));
        let answers = vec![
            ("MEfix".to_string(), "b".to_string()),
            ("MEbfs".to_string(), "a".to_string()),
            ("MEbfs.pos".to_string(), "a".to_string()),
        ];
        assert_eq!(vote_me(&answers, None), Some("a".into()));
    }

    #[test]
    fn vote_me_three_way_tie_takes_bfs_pos() {
        let answers = vec![
            ("MEfix".to_string(), "a".to_string()),
            ("MEbfs".to_string(), "b".to_string()),
            ("MEbfs.pos".to_string(), "c".to_string()),
        ];
        assert_eq!(vote_me(&answers, None), Some("c".into()));
        // the priority holds under any input permutation
        let answers = vec![
            ("MEbfs.pos".to_string(), "c".to_string()),
            ("MEfix".to_string(), "a".to_string()),
            ("MEbfs".to_string(), "b".to_string()),
        ];
        assert_eq!(vote_me(&answers, None), Some("c".into()));
    }

    #[test]
    fn vote_me_falls_back_to_mfs_for_unknown_systems() {
        let answers = vec![
            ("sysX".to_string(), "a".to_string()),
            ("sysY".to_string(), "b".to_string()),
        ];
        assert_eq!(vote_me(&answers, Some("b")), Some("b".into()));
        assert_eq!(vote_me(&answers, Some("zzz")), Some("a".into()));
        assert_eq!(vote_me(&[], None), None);
    }
}
