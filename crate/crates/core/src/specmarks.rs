//! The specification-marks disambiguation algorithm and its taxonomy
//! and gloss heuristics.
//!
//! A specification mark is a synset treated as a counting point: for a
//! candidate sense, the mark's score is the number of distinct context
//! words having at least one sense inside the mark's subhierarchy.
//! Disambiguation starts at the tops of the candidate senses' hypernym
//! chains and descends one level at a time while the maximum is tied,
//! assigning the word when a single sense wins and giving up when the
//! chains are exhausted. Words the algorithm leaves unassigned are
//! handed to the heuristics, either in a cascade (each heuristic sees
//! only the ambiguity the previous ones left) or as independent voters.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::config::{DomainParams, StopList};
use crate::domains::{self, DomainLexicon};
use crate::lexkb::{ancestors, LexicalDb, LexiconError, Pos, SynsetId};

/// Ordered noun context with the position of the word under
/// disambiguation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub nouns: Vec<String>,
    pub target: usize,
}

impl Context {
    /// Panics if `nouns` is empty or `target` out of range (type
    /// invariant).
    pub fn new(nouns: Vec<impl Into<String>>, target: usize) -> Context {
        let nouns: Vec<String> = nouns.into_iter().map(|n| n.into().to_lowercase()).collect();
        assert!(!nouns.is_empty(), "empty context");
        assert!(target < nouns.len(), "target index out of range");
        Context { nouns, target }
    }

    pub fn target_lemma(&self) -> &str {
        &self.nouns[self.target]
    }

    /// Distinct context lemmas; duplicates count once.
    pub fn lemma_set(&self) -> BTreeSet<&str> {
        self.nouns.iter().map(String::as_str).collect()
    }

    /// Distinct context lemmas other than the target's.
    pub fn other_lemmas(&self) -> BTreeSet<&str> {
        let target = self.target_lemma();
        self.nouns
            .iter()
            .map(String::as_str)
            .filter(|l| *l != target)
            .collect()
    }
}

/// How an instance was resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Assigned(SynsetId),
    /// Ambiguity narrowed to at least two surviving senses.
    Reduced(BTreeSet<SynsetId>),
    Unassigned,
}

/// Per-instance result: outcome, the step or heuristic that decided it,
/// and that step's weight or count (0 when not applicable).
#[derive(Debug, Clone, PartialEq)]
pub struct SenseAssignment {
    pub word: String,
    pub outcome: Outcome,
    pub source: String,
    pub score: f64,
}

impl SenseAssignment {
    fn assigned(word: &str, sense: SynsetId, source: &str, score: f64) -> Self {
        SenseAssignment {
            word: word.to_string(),
            outcome: Outcome::Assigned(sense),
            source: source.to_string(),
            score,
        }
    }

    fn reduced(word: &str, senses: BTreeSet<SynsetId>, source: &str, score: f64) -> Self {
        debug_assert!(senses.len() >= 2);
        SenseAssignment {
            word: word.to_string(),
            outcome: Outcome::Reduced(senses),
            source: source.to_string(),
            score,
        }
    }

    fn unassigned(word: &str, source: &str) -> Self {
        SenseAssignment {
            word: word.to_string(),
            outcome: Outcome::Unassigned,
            source: source.to_string(),
            score: 0.0,
        }
    }

    pub fn assigned_sense(&self) -> Option<&SynsetId> {
        match &self.outcome {
            Outcome::Assigned(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SpecmarksError {
    #[error("assignments concern different words: {0:?} vs {1:?}")]
    MismatchedWords(String, String),
    #[error("vote needs at least one assignment")]
    EmptyVote,
    #[error("cascade order includes the domain heuristic but no domain lexicon was supplied")]
    DomainLexiconRequired,
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

/// Optional per-lemma candidate-sense restriction. Lemmas without an
/// entry keep their full sense list.
#[derive(Debug, Clone, Default)]
pub struct SenseRestriction {
    allowed: BTreeMap<String, BTreeSet<SynsetId>>,
}

impl SenseRestriction {
    pub fn none() -> Self {
        SenseRestriction::default()
    }

    pub fn restrict(&mut self, lemma: impl Into<String>, senses: BTreeSet<SynsetId>) {
        self.allowed.insert(lemma.into().to_lowercase(), senses);
    }

    /// Frequency-ranked senses of `lemma` that survive the restriction.
    pub(crate) fn senses(&self, db: &LexicalDb, lemma: &str) -> Vec<SynsetId> {
        db.senses(lemma, Pos::Noun)
            .iter()
            .filter(|s| self.allowed.get(lemma).is_none_or(|set| set.contains(s)))
            .cloned()
            .collect()
    }
}

/// Specification-mark table: mark synset -> candidate sense -> distinct
/// context lemmas subsumed.
///
/// While the mark sits on the sense's own hypernym chain the entry is
/// the full set of context words with a sense inside the mark's
/// subhierarchy; once a mark leaves the chain the sense keeps counting
/// only its own word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkTable {
    entries: BTreeMap<SynsetId, BTreeMap<SynsetId, BTreeSet<String>>>,
}

impl MarkTable {
    pub fn entry(&self, mark: &SynsetId, sense: &SynsetId) -> Option<&BTreeSet<String>> {
        self.entries.get(mark).and_then(|row| row.get(sense))
    }

    pub fn count(&self, mark: &SynsetId, sense: &SynsetId) -> usize {
        self.entry(mark, sense).map_or(0, BTreeSet::len)
    }

    pub fn marks(&self) -> impl Iterator<Item = &SynsetId> {
        self.entries.keys()
    }
}

/// Precomputed subsumption data for one (context, restriction) pair.
struct MarkSpace {
    /// lemma -> restricted senses, for every distinct context lemma
    /// present in the db.
    word_senses: BTreeMap<String, Vec<SynsetId>>,
    /// sense -> synsets on any of its hypernym chains (self included).
    sense_ancestors: BTreeMap<SynsetId, BTreeSet<SynsetId>>,
    /// mark -> distinct context lemmas with some sense under it.
    subsumed: BTreeMap<SynsetId, BTreeSet<String>>,
}

impl MarkSpace {
    fn build(
        ctx: &Context,
        db: &LexicalDb,
        restriction: &SenseRestriction,
    ) -> Result<MarkSpace, LexiconError> {
        let mut word_senses = BTreeMap::new();
        let mut sense_ancestors: BTreeMap<SynsetId, BTreeSet<SynsetId>> = BTreeMap::new();
        let mut subsumed: BTreeMap<SynsetId, BTreeSet<String>> = BTreeMap::new();
        for lemma in ctx.lemma_set() {
            let senses = restriction.senses(db, lemma);
            if senses.is_empty() {
                continue;
            }
            for sense in &senses {
                if !sense_ancestors.contains_key(sense) {
                    sense_ancestors.insert(sense.clone(), ancestors(db, sense)?);
                }
            }
            word_senses.insert(lemma.to_string(), senses);
        }
        for (lemma, senses) in &word_senses {
            for sense in senses {
                for mark in &sense_ancestors[sense] {
                    subsumed
                        .entry(mark.clone())
                        .or_default()
                        .insert(lemma.clone());
                }
            }
        }
        Ok(MarkSpace {
            word_senses,
            sense_ancestors,
            subsumed,
        })
    }

    fn count(&self, mark: &SynsetId) -> usize {
        self.subsumed.get(mark).map_or(0, BTreeSet::len)
    }
}

/// Builds the full mark table for a context: one row per synset on any
/// hypernym chain of any sense of any context noun, one column per
/// candidate sense.
pub fn build_mark_table(ctx: &Context, db: &LexicalDb) -> Result<MarkTable, LexiconError> {
    build_mark_table_restricted(ctx, db, &SenseRestriction::none())
}

pub fn build_mark_table_restricted(
    ctx: &Context,
    db: &LexicalDb,
    restriction: &SenseRestriction,
) -> Result<MarkTable, LexiconError> {
    let space = MarkSpace::build(ctx, db, restriction)?;
    let mut entries: BTreeMap<SynsetId, BTreeMap<SynsetId, BTreeSet<String>>> = BTreeMap::new();
    for mark in space.subsumed.keys() {
        let mut row = BTreeMap::new();
        for (lemma, senses) in &space.word_senses {
            for sense in senses {
                let cell = if space.sense_ancestors[sense].contains(mark) {
                    space.subsumed[mark].clone()
                } else {
                    BTreeSet::from([lemma.clone()])
                };
                row.insert(sense.clone(), cell);
            }
        }
        entries.insert(mark.clone(), row);
    }
    Ok(MarkTable { entries })
}

/// Runs the five-step specification-marks algorithm for the context's
/// target word.
pub fn specification_marks(ctx: &Context, db: &LexicalDb) -> Result<SenseAssignment, LexiconError> {
    specification_marks_restricted(ctx, db, &SenseRestriction::none())
}

/// As [`specification_marks`], with per-lemma candidate restrictions
/// (used by the cascade and by sense pre-labeling).
pub fn specification_marks_restricted(
    ctx: &Context,
    db: &LexicalDb,
    restriction: &SenseRestriction,
) -> Result<SenseAssignment, LexiconError> {
    const SOURCE: &str = "specification-marks";
    let target = ctx.target_lemma().to_string();
    let candidates = restriction.senses(db, &target);
    if candidates.is_empty() {
        return Ok(SenseAssignment::unassigned(&target, "oov"));
    }
    let space = MarkSpace::build(ctx, db, restriction)?;

    // top-down chains per candidate
    let mut chains: Vec<Vec<Vec<SynsetId>>> = Vec::new();
    for sense in &candidates {
        let mut top_down = db.hypernym_chains(sense)?;
        for chain in &mut top_down {
            chain.reverse();
        }
        chains.push(top_down);
    }

    let mut survivors: Vec<usize> = (0..candidates.len()).collect();
    let mut level = 0usize;
    loop {
        let counts: Vec<usize> = survivors
            .iter()
            .map(|&i| {
                chains[i]
                    .iter()
                    .map(|chain| space.count(&chain[level.min(chain.len() - 1)]))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let best = *counts.iter().max().unwrap();
        let tied: Vec<usize> = survivors
            .iter()
            .zip(&counts)
            .filter(|(_, c)| **c == best)
            .map(|(i, _)| *i)
            .collect();
        if tied.len() == 1 {
            let winner = candidates[tied[0]].clone();
            return Ok(SenseAssignment::assigned(
                &target,
                winner,
                SOURCE,
                best as f64,
            ));
        }
        let deepest = tied
            .iter()
            .flat_map(|&i| chains[i].iter().map(Vec::len))
            .max()
            .unwrap_or(1);
        if level + 1 >= deepest {
            // leaf specification marks reached with the tie unresolved
            return Ok(SenseAssignment::unassigned(&target, SOURCE));
        }
        survivors = tied;
        level += 1;
    }
}

/// Walk direction for the chain heuristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

/// True when some whitespace/underscore-separated part of `lemma` (or
/// the whole lemma) equals `word`.
fn lemma_matches(lemma: &str, word: &str) -> bool {
    lemma == word || lemma.split(['_', ' ']).any(|part| part == word)
}

fn synset_matches(db: &LexicalDb, id: &SynsetId, words: &BTreeSet<&str>) -> bool {
    db.synset(id)
        .map(|s| {
            s.lemmas
                .iter()
                .any(|l| words.iter().any(|w| lemma_matches(l, w)))
        })
        .unwrap_or(false)
}

/// Per-sense weights of the hypernym/hyponym heuristic: every chain
/// synset whose lemmas match (or contain as a compound part) a
/// non-target context lemma contributes level/total-levels, with level 1
/// at the top of the walked subhierarchy.
pub fn hypernym_weights(
    ctx: &Context,
    db: &LexicalDb,
    direction: Direction,
) -> Result<Vec<(SynsetId, f64)>, LexiconError> {
    hypernym_weights_restricted(ctx, db, direction, &SenseRestriction::none())
}

fn hypernym_weights_restricted(
    ctx: &Context,
    db: &LexicalDb,
    direction: Direction,
    restriction: &SenseRestriction,
) -> Result<Vec<(SynsetId, f64)>, LexiconError> {
    let words = ctx.other_lemmas();
    let mut out = Vec::new();
    for sense in restriction.senses(db, ctx.target_lemma()) {
        let mut weight = 0.0;
        match direction {
            Direction::Up => {
                for chain in db.hypernym_chains(&sense)? {
                    let total = chain.len() as f64;
                    // chains come bottom-up: the last element is the top
                    for (i, id) in chain.iter().rev().enumerate() {
                        if synset_matches(db, id, &words) {
                            weight += (i + 1) as f64 / total;
                        }
                    }
                }
            }
            Direction::Down => {
                let nodes = db.hyponym_descendants(&sense, None)?;
                let total = (nodes.iter().map(|(_, d)| *d).max().unwrap_or(0) + 1) as f64;
                for (id, depth) in &nodes {
                    if synset_matches(db, id, &words) {
                        weight += (*depth + 1) as f64 / total;
                    }
                }
            }
        }
        out.push((sense, weight));
    }
    Ok(out)
}

/// Chooses by the maximum weight: unique positive maximum assigns, tied
/// maxima reduce, all-zero leaves the word unassigned.
fn decide_by_weights(word: &str, weights: Vec<(SynsetId, f64)>, source: &str) -> SenseAssignment {
    let best = weights.iter().map(|(_, w)| *w).fold(0.0, f64::max);
    if best <= 0.0 {
        return SenseAssignment::unassigned(word, source);
    }
    let tied: BTreeSet<SynsetId> = weights
        .iter()
        .filter(|(_, w)| *w == best)
        .map(|(s, _)| s.clone())
        .collect();
    if tied.len() == 1 {
        let sense = tied.into_iter().next().unwrap();
        SenseAssignment::assigned(word, sense, source, best)
    } else {
        SenseAssignment::reduced(word, tied, source, best)
    }
}

pub fn heuristic_hypernym(
    ctx: &Context,
    db: &LexicalDb,
    direction: Direction,
) -> Result<SenseAssignment, LexiconError> {
    let weights = hypernym_weights(ctx, db, direction)?;
    let source = match direction {
        Direction::Up => "hypernym",
        Direction::Down => "hyponym",
    };
    Ok(decide_by_weights(ctx.target_lemma(), weights, source))
}

/// Per-sense weights of the definition heuristic: the number of distinct
/// non-target context lemmas found among the sense's gloss tokens.
/// (Repeated occurrences of one lemma inside a gloss count once; the
/// worked sister example's weights 2 and 1 force the distinct reading.)
pub fn definition_weights(
    ctx: &Context,
    db: &LexicalDb,
    stops: &StopList,
) -> Result<Vec<(SynsetId, f64)>, LexiconError> {
    definition_weights_restricted(ctx, db, stops, &SenseRestriction::none())
}

fn definition_weights_restricted(
    ctx: &Context,
    db: &LexicalDb,
    stops: &StopList,
    restriction: &SenseRestriction,
) -> Result<Vec<(SynsetId, f64)>, LexiconError> {
    let words = ctx.other_lemmas();
    let mut out = Vec::new();
    for sense in restriction.senses(db, ctx.target_lemma()) {
        let tokens: BTreeSet<String> = db.gloss_tokens(&sense, stops)?.into_iter().collect();
        let count = words.iter().filter(|w| tokens.contains(**w)).count();
        out.push((sense, count as f64));
    }
    Ok(out)
}

pub fn heuristic_definition(
    ctx: &Context,
    db: &LexicalDb,
    stops: &StopList,
) -> Result<SenseAssignment, LexiconError> {
    let weights = definition_weights(ctx, db, stops)?;
    Ok(decide_by_weights(ctx.target_lemma(), weights, "definition"))
}

/// Per-sense weights of the gloss hypernym/hyponym heuristic: every
/// occurrence of a non-target context lemma in the glosses of the
/// sense's chain (up) or subtree (down) adds one.
pub fn gloss_chain_weights(
    ctx: &Context,
    db: &LexicalDb,
    direction: Direction,
    stops: &StopList,
) -> Result<Vec<(SynsetId, f64)>, LexiconError> {
    gloss_chain_weights_restricted(ctx, db, direction, stops, &SenseRestriction::none())
}

fn gloss_chain_weights_restricted(
    ctx: &Context,
    db: &LexicalDb,
    direction: Direction,
    stops: &StopList,
    restriction: &SenseRestriction,
) -> Result<Vec<(SynsetId, f64)>, LexiconError> {
    let words = ctx.other_lemmas();
    let mut out = Vec::new();
    for sense in restriction.senses(db, ctx.target_lemma()) {
        let synsets: BTreeSet<SynsetId> = match direction {
            Direction::Up => ancestors(db, &sense)?,
            Direction::Down => db
                .hyponym_descendants(&sense, None)?
                .into_iter()
                .map(|(id, _)| id)
                .collect(),
        };
        let mut count = 0usize;
        for id in &synsets {
            for token in db.gloss_tokens(id, stops)? {
                if words.contains(token.as_str()) {
                    count += 1;
                }
            }
        }
        out.push((sense, count as f64));
    }
    Ok(out)
}

pub fn heuristic_gloss_hyper(
    ctx: &Context,
    db: &LexicalDb,
    direction: Direction,
    stops: &StopList,
) -> Result<SenseAssignment, LexiconError> {
    let weights = gloss_chain_weights(ctx, db, direction, stops)?;
    let source = match direction {
        Direction::Up => "gloss-hypernym",
        Direction::Down => "gloss-hyponym",
    };
    Ok(decide_by_weights(ctx.target_lemma(), weights, source))
}

/// Finds the most specific synset lying on a hypernym chain of at least
/// one sense of every context word, then keeps the target senses whose
/// chains pass through it.
pub fn heuristic_common_mark(
    ctx: &Context,
    db: &LexicalDb,
) -> Result<SenseAssignment, LexiconError> {
    heuristic_common_mark_restricted(ctx, db, &SenseRestriction::none())
}

fn heuristic_common_mark_restricted(
    ctx: &Context,
    db: &LexicalDb,
    restriction: &SenseRestriction,
) -> Result<SenseAssignment, LexiconError> {
    const SOURCE: &str = "common-mark";
    let target = ctx.target_lemma().to_string();
    let candidates = restriction.senses(db, &target);
    if candidates.is_empty() {
        return Ok(SenseAssignment::unassigned(&target, "oov"));
    }

    // per distinct word: union of chain synsets over its senses
    let mut per_word: Vec<BTreeSet<SynsetId>> = Vec::new();
    for lemma in ctx.lemma_set() {
        let senses = restriction.senses(db, lemma);
        if senses.is_empty() {
            continue;
        }
        let mut union = BTreeSet::new();
        for sense in &senses {
            union.extend(ancestors(db, sense)?);
        }
        per_word.push(union);
    }
    if per_word.len() < 2 {
        return Ok(SenseAssignment::unassigned(&target, SOURCE));
    }
    let mut common = per_word[0].clone();
    for other in &per_word[1..] {
        common = common.intersection(other).cloned().collect();
    }
    if common.is_empty() {
        return Ok(SenseAssignment::unassigned(&target, SOURCE));
    }

    // deepest = longest own hypernym chain; ties break on the smaller id
    let mut deepest: Option<(usize, SynsetId)> = None;
    for mark in common {
        let depth = db
            .hypernym_chains(&mark)?
            .into_iter()
            .map(|c| c.len())
            .max()
            .unwrap_or(1);
        let better = match &deepest {
            None => true,
            Some((d, id)) => depth > *d || (depth == *d && mark < *id),
        };
        if better {
            deepest = Some((depth, mark));
        }
    }
    let (depth, mark) = deepest.unwrap();

    let mut surviving = BTreeSet::new();
    for sense in &candidates {
        if ancestors(db, sense)?.contains(&mark) {
            surviving.insert(sense.clone());
        }
    }
    Ok(match surviving.len() {
        0 => SenseAssignment::unassigned(&target, SOURCE),
        1 => SenseAssignment::assigned(
            &target,
            surviving.into_iter().next().unwrap(),
            SOURCE,
            depth as f64,
        ),
        _ => SenseAssignment::reduced(&target, surviving, SOURCE, depth as f64),
    })
}

/// One of the complementary heuristics, by cascade/vote label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    Hypernym,
    Hyponym,
    Definition,
    GlossHypernym,
    GlossHyponym,
    CommonMark,
    Domain,
}

impl Heuristic {
    pub const ALL: [Heuristic; 7] = [
        Heuristic::Hypernym,
        Heuristic::Hyponym,
        Heuristic::Definition,
        Heuristic::GlossHypernym,
        Heuristic::GlossHyponym,
        Heuristic::CommonMark,
        Heuristic::Domain,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Heuristic::Hypernym => "hypernym",
            Heuristic::Hyponym => "hyponym",
            Heuristic::Definition => "definition",
            Heuristic::GlossHypernym => "gloss-hypernym",
            Heuristic::GlossHyponym => "gloss-hyponym",
            Heuristic::CommonMark => "common-mark",
            Heuristic::Domain => "domain",
        }
    }

    pub fn parse(label: &str) -> Option<Heuristic> {
        Heuristic::ALL.into_iter().find(|h| h.label() == label)
    }
}

/// Everything the heuristics need besides the context.
pub struct HeuristicEnv<'a> {
    pub db: &'a LexicalDb,
    pub stops: &'a StopList,
    pub domain_lexicon: Option<&'a DomainLexicon>,
    pub domain_params: &'a DomainParams,
}

impl HeuristicEnv<'_> {
    pub fn run(
        &self,
        h: Heuristic,
        ctx: &Context,
        restriction: &SenseRestriction,
    ) -> Result<SenseAssignment, SpecmarksError> {
        let word = ctx.target_lemma();
        Ok(match h {
            Heuristic::Hypernym => decide_by_weights(
                word,
                hypernym_weights_restricted(ctx, self.db, Direction::Up, restriction)?,
                h.label(),
            ),
            Heuristic::Hyponym => decide_by_weights(
                word,
                hypernym_weights_restricted(ctx, self.db, Direction::Down, restriction)?,
                h.label(),
            ),
            Heuristic::Definition => decide_by_weights(
                word,
                definition_weights_restricted(ctx, self.db, self.stops, restriction)?,
                h.label(),
            ),
            Heuristic::GlossHypernym => decide_by_weights(
                word,
                gloss_chain_weights_restricted(
                    ctx,
                    self.db,
                    Direction::Up,
                    self.stops,
                    restriction,
                )?,
                h.label(),
            ),
            Heuristic::GlossHyponym => decide_by_weights(
                word,
                gloss_chain_weights_restricted(
                    ctx,
                    self.db,
                    Direction::Down,
                    self.stops,
                    restriction,
                )?,
                h.label(),
            ),
            Heuristic::CommonMark => heuristic_common_mark_restricted(ctx, self.db, restriction)?,
            Heuristic::Domain => {
                let lex = self
                    .domain_lexicon
                    .ok_or(SpecmarksError::DomainLexiconRequired)?;
                domains::domain_disambiguate_restricted(
                    ctx,
                    self.db,
                    lex,
                    self.domain_params,
                    self.stops,
                    restriction,
                )?
            }
        })
    }
}

/// Specification marks first, then each heuristic in order, each seeing
/// only the senses still alive. Stops at the first assignment; a final
/// narrowed-but-unresolved state is returned as the last reduction.
pub fn cascade(
    ctx: &Context,
    env: &HeuristicEnv,
    order: &[Heuristic],
) -> Result<SenseAssignment, SpecmarksError> {
    let word = ctx.target_lemma().to_string();
    let all: Vec<SynsetId> = env.db.senses(&word, Pos::Noun).to_vec();
    if all.is_empty() {
        return Ok(SenseAssignment::unassigned(&word, "oov"));
    }

    let sm = specification_marks(ctx, env.db)?;
    if sm.assigned_sense().is_some() {
        return Ok(sm);
    }

    let mut restriction = SenseRestriction::none();
    let mut surviving: BTreeSet<SynsetId> = all.iter().cloned().collect();
    let mut last_reduction: Option<SenseAssignment> = None;
    for &h in order {
        let result = env.run(h, ctx, &restriction)?;
        match &result.outcome {
            Outcome::Assigned(_) => return Ok(result),
            Outcome::Reduced(set) => {
                debug_assert!(set.is_subset(&surviving));
                surviving = set.clone();
                restriction.restrict(&word, surviving.clone());
                last_reduction = Some(result);
            }
            Outcome::Unassigned => {}
        }
    }
    Ok(match last_reduction {
        Some(reduction) => reduction,
        None => SenseAssignment::unassigned(&word, "cascade"),
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Majority vote over heuristic outcomes for one word. Assigned casts
/// one vote, Reduced casts 1/|set| per member, Unassigned abstains.
/// Votes are tallied in exact integer units so fractional ties are real
/// ties; ties break by sense-frequency rank, then by id. With no votes
/// at all the rank-1 sense is returned so coverage stays full.
pub fn vote(
    db: &LexicalDb,
    assignments: &[SenseAssignment],
) -> Result<SenseAssignment, SpecmarksError> {
    let first = assignments.first().ok_or(SpecmarksError::EmptyVote)?;
    let word = first.word.clone();
    for a in assignments {
        if a.word != word {
            return Err(SpecmarksError::MismatchedWords(word, a.word.clone()));
        }
    }

    let unit: u64 = assignments
        .iter()
        .filter_map(|a| match &a.outcome {
            Outcome::Reduced(set) => Some(set.len() as u64),
            _ => None,
        })
        .fold(1, |acc, n| acc / gcd(acc, n) * n);

    let mut votes: BTreeMap<SynsetId, u64> = BTreeMap::new();
    for a in assignments {
        match &a.outcome {
            Outcome::Assigned(s) => *votes.entry(s.clone()).or_default() += unit,
            Outcome::Reduced(set) => {
                let share = unit / set.len() as u64;
                for s in set {
                    *votes.entry(s.clone()).or_default() += share;
                }
            }
            Outcome::Unassigned => {}
        }
    }

    if votes.is_empty() {
        return Ok(match db.senses(&word, Pos::Noun).first() {
            Some(mfs) => SenseAssignment::assigned(&word, mfs.clone(), "mfs-fallback", 0.0),
            None => SenseAssignment::unassigned(&word, "oov"),
        });
    }

    let best = *votes.values().max().unwrap();
    let winner = votes
        .iter()
        .filter(|(_, v)| **v == best)
        .map(|(s, _)| s.clone())
        .min_by_key(|s| {
            (
                db.sense_rank(&word, Pos::Noun, s).unwrap_or(usize::MAX),
                s.clone(),
            )
        })
        .unwrap();
    Ok(SenseAssignment::assigned(
        &word,
        winner,
        "voting",
        best as f64 / unit as f64,
    ))
}
