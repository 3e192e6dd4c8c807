//! Combination schemes: classifier pre-labeling of context nouns for
//! the specification-marks search, domain labels as extra classifier
//! features, and joint voting of the three classifier systems with the
//! knowledge-based method.

use std::collections::{BTreeMap, BTreeSet};

use crate::config::{DomainParams, StopList, TrainParams};
use crate::domains::{self, DomainLexicon};
use crate::lexkb::{LexicalDb, LexiconError, Pos, SynsetId};
use crate::maxent::{
    train_with_extra, AnnotatedToken, Classifier, FeatureSelection, MaxentError, Slot,
    TrainingExample,
};
use crate::specmarks::{
    specification_marks_restricted, Context, Outcome, SenseAssignment, SenseRestriction,
};

#[derive(Debug, thiserror::Error)]
pub enum HybridError {
    #[error("index {index} is the target; the target is never fixed")]
    TargetFixed { index: usize },
    #[error("index {index} is out of context range")]
    IndexOutOfRange { index: usize },
    #[error("{sense} is not a sense of {word:?}")]
    NotASense { word: String, sense: SynsetId },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Maxent(#[from] MaxentError),
}

/// A context with some non-target nouns pinned to a single sense.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedContext {
    pub ctx: Context,
    fixed: BTreeMap<usize, SynsetId>,
}

impl FixedContext {
    /// Pins `fixed[i]` as the only sense of the noun at index `i`. The
    /// target index stays free and every pinned sense must belong to its
    /// word.
    pub fn new(
        ctx: Context,
        fixed: BTreeMap<usize, SynsetId>,
        db: &LexicalDb,
    ) -> Result<FixedContext, HybridError> {
        for (&index, sense) in &fixed {
            if index == ctx.target {
                return Err(HybridError::TargetFixed { index });
            }
            let word = ctx
                .nouns
                .get(index)
                .ok_or(HybridError::IndexOutOfRange { index })?;
            if !db.senses(word, Pos::Noun).contains(sense) {
                return Err(HybridError::NotASense {
                    word: word.clone(),
                    sense: sense.clone(),
                });
            }
        }
        Ok(FixedContext { ctx, fixed })
    }

    pub fn unconstrained(ctx: Context) -> FixedContext {
        FixedContext {
            ctx,
            fixed: BTreeMap::new(),
        }
    }

    pub fn fixed(&self) -> &BTreeMap<usize, SynsetId> {
        &self.fixed
    }

    /// Sense restriction equivalent to the pinned indices. A lemma
    /// pinned at several indices keeps the union of its pinned senses.
    fn restriction(&self) -> SenseRestriction {
        let mut by_lemma: BTreeMap<&str, BTreeSet<SynsetId>> = BTreeMap::new();
        for (&index, sense) in &self.fixed {
            by_lemma
                .entry(self.ctx.nouns[index].as_str())
                .or_default()
                .insert(sense.clone());
        }
        let mut restriction = SenseRestriction::none();
        for (lemma, senses) in by_lemma {
            restriction.restrict(lemma, senses);
        }
        restriction
    }
}

/// Pins every non-target context noun whose classifier cleared the
/// cross-validated precision threshold to that classifier's prediction.
/// Classifiers are looked up by lemma; predictions that do not name a
/// real sense of the noun are ignored.
pub fn prelabel_with_me(
    ctx: &Context,
    classifiers: &BTreeMap<String, Classifier>,
    precision_threshold: f64,
    db: &LexicalDb,
    stops: &StopList,
) -> Result<FixedContext, HybridError> {
    let mut fixed = BTreeMap::new();
    for (index, noun) in ctx.nouns.iter().enumerate() {
        if index == ctx.target {
            continue;
        }
        let Some(clf) = classifiers.get(noun) else {
            continue;
        };
        if clf.meta.cv_precision.unwrap_or(0.0) < precision_threshold {
            continue;
        }
        let answer = clf.classify(&noun_window_example(ctx, index), stops)?;
        if let Some(sense) = SynsetId::parse(&answer.sense) {
            if db.senses(noun, Pos::Noun).contains(&sense) {
                fixed.insert(index, sense);
            }
        }
    }
    FixedContext::new(ctx.clone(), fixed, db)
}

/// A bare noun window dressed up as an example so a classifier can run
/// on a context that has no token annotations.
fn noun_window_example(ctx: &Context, target: usize) -> TrainingExample {
    TrainingExample {
        id: format!("ctx:{target}"),
        target_lemma: ctx.nouns[target].clone(),
        target_pos: Pos::Noun,
        sense: String::new(),
        tokens: ctx
            .nouns
            .iter()
            .map(|n| AnnotatedToken {
                surface: n.clone(),
                lemma: n.clone(),
                pos_tag: "NOUN".into(),
                dep_head: None,
                dep_rel: None,
                multiword: false,
            })
            .collect(),
        target_index: target,
    }
}

/// Specification marks over a pre-labeled context: pinned nouns
/// contribute only their pinned sense's hypernym chains; free nouns
/// contribute all senses. With nothing pinned this is exactly the plain
/// algorithm.
pub fn sm_with_fixed(fc: &FixedContext, db: &LexicalDb) -> Result<SenseAssignment, LexiconError> {
    specification_marks_restricted(&fc.ctx, db, &fc.restriction())
}

/// Trains with the plain feature set plus domain predicates: the domain
/// labels of each noun at +/-1..3 (as chosen by the domain heuristic
/// over the example's noun window) and the top-3 whole-context domains.
/// An empty domain lexicon adds nothing and reproduces plain training.
pub fn me_with_domain_features(
    examples: &[TrainingExample],
    sel: &FeatureSelection,
    db: &LexicalDb,
    lex: &DomainLexicon,
    dparams: &DomainParams,
    tparams: &TrainParams,
    stops: &StopList,
) -> Result<Classifier, MaxentError> {
    let augment = |ex: &TrainingExample| domain_observations(ex, db, lex, dparams, stops);
    train_with_extra(examples, sel, tparams, stops, Some(&augment))
}

/// Classifies with the same domain augmentation used by
/// [`me_with_domain_features`]; a classifier trained with domain
/// features needs them recomputed for every new context.
pub fn classify_with_domain_features(
    clf: &Classifier,
    ex: &TrainingExample,
    db: &LexicalDb,
    lex: &DomainLexicon,
    dparams: &DomainParams,
    stops: &StopList,
) -> Result<crate::maxent::MeAnswer, MaxentError> {
    if ex.target_lemma != clf.word || ex.target_pos != clf.pos {
        return Err(MaxentError::WordMismatch {
            want: clf.word.clone(),
            got: ex.target_lemma.clone(),
        });
    }
    let mut obs = crate::maxent::extract_features(ex, &clf.selection, stops);
    for (slot, value) in domain_observations(ex, db, lex, dparams, stops) {
        obs.entry(slot).or_default().insert(value);
    }
    Ok(clf.classify_obs(&obs))
}

fn domain_observations(
    ex: &TrainingExample,
    db: &LexicalDb,
    lex: &DomainLexicon,
    dparams: &DomainParams,
    stops: &StopList,
) -> Vec<(Slot, String)> {
    if lex.is_empty() {
        return Vec::new();
    }
    // the example's noun window, remembering where each token landed
    let mut nouns = Vec::new();
    let mut noun_slot_of_token: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, tok) in ex.tokens.iter().enumerate() {
        if tok.pos_tag.starts_with('N') {
            noun_slot_of_token.insert(i, nouns.len());
            nouns.push(tok.lemma.clone());
        }
    }
    if nouns.is_empty() {
        return Vec::new();
    }

    let mut out = Vec::new();
    for offset in [-3i8, -2, -1, 1, 2, 3] {
        let token_index = ex.target_index as isize + offset as isize;
        if token_index < 0 || token_index as usize >= ex.tokens.len() {
            continue;
        }
        let token_index = token_index as usize;
        let Some(&noun_index) = noun_slot_of_token.get(&token_index) else {
            continue;
        };
        let neighbor_ctx = Context::new(nouns.clone(), noun_index);
        if let Ok((labels, _)) = domains::word_domain_labels(&neighbor_ctx, db, lex, dparams, stops)
        {
            for label in labels {
                out.push((Slot::DomainAt(offset), label));
            }
        }
    }

    let cv = domains::context_vector(&nouns, lex, dparams);
    for label in cv.top_labels(3) {
        out.push((Slot::ContextDomain, label));
    }
    out
}

/// Adds the knowledge-based answer to the three classifier systems'
/// votes for one instance. A reduced outcome votes fractionally, an
/// unassigned one abstains; ties go to the best-per-POS system's answer
/// and then to the most frequent sense.
pub fn vme_sm(
    answers_me: &[(String, String)],
    answer_sm: &SenseAssignment,
    mfs: Option<&str>,
) -> Option<String> {
    // integer vote units keep fractional shares exact
    let unit: u64 = match &answer_sm.outcome {
        Outcome::Reduced(set) => set.len() as u64,
        _ => 1,
    };
    let mut votes: BTreeMap<String, u64> = BTreeMap::new();
    for (_, sense) in answers_me {
        *votes.entry(sense.clone()).or_default() += unit;
    }
    match &answer_sm.outcome {
        Outcome::Assigned(sense) => *votes.entry(sense.to_string()).or_default() += unit,
        Outcome::Reduced(set) => {
            for sense in set {
                *votes.entry(sense.to_string()).or_default() += unit / set.len() as u64;
            }
        }
        Outcome::Unassigned => {}
    }
    if votes.is_empty() {
        return mfs.map(str::to_string);
    }
    let best = *votes.values().max().unwrap();
    let tied: BTreeSet<&str> = votes
        .iter()
        .filter(|(_, v)| **v == best)
        .map(|(s, _)| s.as_str())
        .collect();
    if tied.len() == 1 {
        return Some(tied.into_iter().next().unwrap().to_string());
    }
    if let Some((_, sense)) = answers_me.iter().find(|(sys, _)| sys == "MEbfs.pos") {
        if tied.contains(sense.as_str()) {
            return Some(sense.clone());
        }
    }
    match mfs {
        Some(m) if tied.contains(m) => Some(m.to_string()),
        _ => tied.into_iter().next().map(str::to_string),
    }
}
