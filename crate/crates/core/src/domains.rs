//! Relevant-domains lexicon and the domain disambiguation heuristic.
//!
//! Domain-labeled glosses are treated as a corpus: each gloss is a bag
//! of content words credited to its synset's domain labels. A word's
//! relevance to a domain is its association ratio
//! `AR(w|D) = P(w|D) * ln(P(w|D) / P(w))`; only strictly positive
//! entries are kept. Contexts and sense glosses become sparse vectors
//! over domain labels, compared by cosine.

use std::collections::BTreeMap;

use crate::config::{DomainParams, StopList};
use crate::lexkb::{LexicalDb, LexiconError, SynsetId};
use crate::specmarks::{Context, Outcome, SenseAssignment, SenseRestriction};

/// Word -> weight-descending list of (domain label, association ratio).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DomainLexicon {
    entries: BTreeMap<String, Vec<(String, f64)>>,
}

/// Sparse non-negative vector over domain labels. Zero-weight components
/// are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DomainVector {
    components: BTreeMap<String, f64>,
}

impl DomainVector {
    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&str, f64)> {
        self.components.iter().map(|(label, w)| (label.as_str(), *w))
    }

    pub fn get(&self, label: &str) -> f64 {
        self.components.get(label).copied().unwrap_or(0.0)
    }

    fn add(&mut self, label: &str, weight: f64) {
        if weight != 0.0 {
            *self.components.entry(label.to_string()).or_insert(0.0) += weight;
        }
    }

    /// Labels by descending weight, lexicographic on ties.
    pub fn top_labels(&self, k: usize) -> Vec<String> {
        let mut items: Vec<(&String, f64)> =
            self.components.iter().map(|(l, w)| (l, *w)).collect();
        items.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(b.0)));
        items.into_iter().take(k).map(|(l, _)| l.clone()).collect()
    }
}

/// Raw occurrence counts behind the association ratios, exposed so the
/// probability estimates can be checked independently.
#[derive(Debug, Clone, Default)]
pub struct GlossCounts {
    /// word -> occurrences across every gloss
    pub word_total: BTreeMap<String, u64>,
    /// domain -> word -> occurrences across that domain's glosses
    pub domain_word: BTreeMap<String, BTreeMap<String, u64>>,
    /// domain -> total tokens across that domain's glosses
    pub domain_total: BTreeMap<String, u64>,
    /// total tokens across every gloss
    pub grand_total: u64,
}

/// Tallies gloss tokens per domain. Synsets with several labels credit
/// their tokens to every label; unlabeled glosses still count toward the
/// corpus-wide totals.
pub fn gloss_domain_counts(db: &LexicalDb, stops: &StopList) -> GlossCounts {
    let mut counts = GlossCounts::default();
    for synset in db.synsets() {
        let tokens = crate::config::tokenize(&synset.gloss, stops);
        counts.grand_total += tokens.len() as u64;
        for token in &tokens {
            *counts.word_total.entry(token.clone()).or_default() += 1;
        }
        for label in &synset.domains {
            *counts.domain_total.entry(label.clone()).or_default() += tokens.len() as u64;
            let per_word = counts.domain_word.entry(label.clone()).or_default();
            for token in &tokens {
                *per_word.entry(token.clone()).or_default() += 1;
            }
        }
    }
    counts
}

/// Builds the relevant-domains lexicon from the db's domain-labeled
/// glosses. Returns the lexicon plus any warnings (an empty lexicon is
/// legal but worth flagging).
pub fn build_relevant_domains(db: &LexicalDb, stops: &StopList) -> (DomainLexicon, Vec<String>) {
    let counts = gloss_domain_counts(db, stops);
    let mut warnings = Vec::new();
    if counts.domain_total.is_empty() {
        warnings.push("no domain-labeled glosses; the domain lexicon is empty".to_string());
        return (DomainLexicon::default(), warnings);
    }
    let mut entries: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
    for (domain, per_word) in &counts.domain_word {
        let domain_total = counts.domain_total[domain] as f64;
        for (word, count) in per_word {
            let p_wd = *count as f64 / domain_total;
            let p_w = counts.word_total[word] as f64 / counts.grand_total as f64;
            let ar = p_wd * (p_wd / p_w).ln();
            if ar > 0.0 {
                entries
                    .entry(word.clone())
                    .or_default()
                    .push((domain.clone(), ar));
            }
        }
    }
    for list in entries.values_mut() {
        list.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    }
    if entries.is_empty() {
        warnings
            .push("all association ratios were non-positive; the domain lexicon is empty".into());
    }
    (DomainLexicon { entries }, warnings)
}

impl DomainLexicon {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Weight-descending domain entries for `word`.
    pub fn entries(&self, word: &str) -> &[(String, f64)] {
        self.entries.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// `DOM<TAB>lemma<TAB>label<TAB>weight` lines, weight-descending per
    /// lemma, 17 significant digits.
    pub fn serialize(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        for (word, list) in &self.entries {
            for (label, weight) in list {
                writeln!(w, "DOM\t{}\t{}\t{:.16e}", word, label, weight)?;
            }
        }
        Ok(())
    }

    pub fn load(reader: impl std::io::BufRead) -> Result<DomainLexicon, LexiconError> {
        let mut entries: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let err = |msg: String| LexiconError::Malformed { line: lineno, msg };
            if fields.len() != 4 || fields[0] != "DOM" {
                return Err(err("expected DOM\\tlemma\\tlabel\\tweight".into()));
            }
            let weight: f64 = fields[3]
                .parse()
                .map_err(|e| err(format!("bad weight: {e}")))?;
            entries
                .entry(fields[1].to_string())
                .or_default()
                .push((fields[2].to_string(), weight));
        }
        Ok(DomainLexicon { entries })
    }
}

/// Componentwise sum of each word's top-k domain entries. Unknown words
/// contribute nothing; blacklisted labels are skipped.
pub fn context_vector(
    words: impl IntoIterator<Item = impl AsRef<str>>,
    lex: &DomainLexicon,
    params: &DomainParams,
) -> DomainVector {
    let mut v = DomainVector::default();
    for word in words {
        for (label, weight) in lex.entries(word.as_ref()).iter().take(params.top_k.0) {
            if !params.blacklist.contains(label) {
                v.add(label, *weight);
            }
        }
    }
    v
}

/// Context vector over the gloss tokens of `s`.
pub fn sense_vector(
    s: &SynsetId,
    db: &LexicalDb,
    lex: &DomainLexicon,
    params: &DomainParams,
    stops: &StopList,
) -> Result<DomainVector, LexiconError> {
    Ok(context_vector(db.gloss_tokens(s, stops)?, lex, params))
}

/// Cosine over sparse non-negative vectors; 0 when either side is zero.
pub fn cosine(a: &DomainVector, b: &DomainVector) -> f64 {
    let dot: f64 = a
        .components
        .iter()
        .map(|(label, w)| w * b.get(label))
        .sum();
    let norm =
        |v: &DomainVector| -> f64 { v.components.values().map(|w| w * w).sum::<f64>().sqrt() };
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(0.0, 1.0)
}

/// Assigns the sense whose gloss vector lies closest to the context
/// vector; ties reduce, an all-zero comparison leaves the word
/// unassigned.
pub fn domain_disambiguate(
    ctx: &Context,
    db: &LexicalDb,
    lex: &DomainLexicon,
    params: &DomainParams,
    stops: &StopList,
) -> Result<SenseAssignment, LexiconError> {
    domain_disambiguate_restricted(ctx, db, lex, params, stops, &SenseRestriction::none())
}

pub(crate) fn domain_disambiguate_restricted(
    ctx: &Context,
    db: &LexicalDb,
    lex: &DomainLexicon,
    params: &DomainParams,
    stops: &StopList,
    restriction: &SenseRestriction,
) -> Result<SenseAssignment, LexiconError> {
    const SOURCE: &str = "domain";
    let word = ctx.target_lemma().to_string();
    let candidates = restriction.senses(db, &word);
    if candidates.is_empty() {
        return Ok(SenseAssignment {
            word,
            outcome: Outcome::Unassigned,
            source: "oov".into(),
            score: 0.0,
        });
    }
    let cv = context_vector(&ctx.nouns, lex, params);
    let mut scores = Vec::new();
    for sense in candidates {
        let sv = sense_vector(&sense, db, lex, params, stops)?;
        scores.push((sense, cosine(&sv, &cv)));
    }
    let best = scores.iter().map(|(_, c)| *c).fold(0.0, f64::max);
    if best <= 0.0 {
        return Ok(SenseAssignment {
            word,
            outcome: Outcome::Unassigned,
            source: SOURCE.into(),
            score: 0.0,
        });
    }
    let tied: std::collections::BTreeSet<SynsetId> = scores
        .iter()
        .filter(|(_, c)| *c == best)
        .map(|(s, _)| s.clone())
        .collect();
    Ok(if tied.len() == 1 {
        SenseAssignment {
            word,
            outcome: Outcome::Assigned(tied.into_iter().next().unwrap()),
            source: SOURCE.into(),
            score: best,
        }
    } else {
        SenseAssignment {
            word,
            outcome: Outcome::Reduced(tied),
            source: SOURCE.into(),
            score: best,
        }
    })
}

/// Domain labels of the domain-heuristic-chosen sense (empty unless a
/// single sense won) plus the top-3 context domains. These feed the
/// maximum-entropy domain features.
pub fn word_domain_labels(
    ctx: &Context,
    db: &LexicalDb,
    lex: &DomainLexicon,
    params: &DomainParams,
    stops: &StopList,
) -> Result<(Vec<String>, Vec<String>), LexiconError> {
    let cv = context_vector(&ctx.nouns, lex, params);
    let top_context = cv.top_labels(3);
    let chosen = domain_disambiguate(ctx, db, lex, params, stops)?;
    let sense_labels = match chosen.assigned_sense() {
        Some(sense) => db.require(sense)?.domains.clone(),
        None => Vec::new(),
    };
    Ok((sense_labels, top_context))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexkb::Pos;
    use crate::testutil::load_fixture;
    use proptest::prelude::*;

    fn id(key: &str) -> SynsetId {
        SynsetId::new(Pos::Noun, key)
    }

    #[test]
    fn single_domain_corpus_has_zero_association() {
        // every gloss carries the same label, so P(w|D) = P(w)
        let src = "SYNSET\tN\ta\taa\twater flows downhill\n\
                   SYNSET\tN\tb\tbb\twater carves stone\n\
                   DOMAIN\tN:a\tGeo\nDOMAIN\tN:b\tGeo\n";
        let db = LexicalDb::load(src.as_bytes()).unwrap();
        let (lex, _) = build_relevant_domains(&db, &StopList::default());
        assert!(lex.is_empty());
    }

    #[test]
    fn word_exclusive_to_a_domain_gets_positive_weight() {
        let src = "SYNSET\tN\ta\taa\tmoney market trading\n\
                   SYNSET\tN\tb\tbb\triver water valley\n\
                   DOMAIN\tN:a\tEconomy\nDOMAIN\tN:b\tGeography\n";
        let db = LexicalDb::load(src.as_bytes()).unwrap();
        let (lex, warnings) = build_relevant_domains(&db, &StopList::default());
        assert!(warnings.is_empty());
        let entries = lex.entries("money");
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].0, "Economy");
        // P(w|D) = 1/3, P(w) = 1/6: AR = (1/3) ln 2
        let expected = (1.0 / 3.0) * 2.0_f64.ln();
        assert!((entries[0].1 - expected).abs() < 1e-12);
    }

    #[test]
    fn unlabeled_corpus_warns_and_returns_empty() {
        let src = "SYNSET\tN\ta\taa\tsome gloss here\n";
        let db = LexicalDb::load(src.as_bytes()).unwrap();
        let (lex, warnings) = build_relevant_domains(&db, &StopList::default());
        assert!(lex.is_empty());
        assert_eq!(warnings.len(), 1);
    }

    /// Three synsets, two domains, association ratios computed by hand
    /// from the count table:
    ///   gloss a (Economy): money trade
    ///   gloss b (Economy): money bank
    ///   gloss c (Geography): river bank
    /// totals: 6 tokens; Economy 4, Geography 2.
    #[test]
    fn hand_computed_association_table() {
        let src = "SYNSET\tN\ta\taa\tmoney trade\n\
                   SYNSET\tN\tb\tbb\tmoney bank\n\
                   SYNSET\tN\tc\tcc\triver bank\n\
                   DOMAIN\tN:a\tEconomy\nDOMAIN\tN:b\tEconomy\nDOMAIN\tN:c\tGeography\n";
        let db = LexicalDb::load(src.as_bytes()).unwrap();
        let stops = StopList::default();

        let counts = gloss_domain_counts(&db, &stops);
        assert_eq!(counts.grand_total, 6);
        assert_eq!(counts.domain_total["Economy"], 4);
        assert_eq!(counts.domain_total["Geography"], 2);

        let (lex, _) = build_relevant_domains(&db, &stops);
        let ar = |w: &str, d: &str| {
            lex.entries(w)
                .iter()
                .find(|(label, _)| label == d)
                .map(|(_, ar)| *ar)
        };
        // money: P(w|Econ) = 2/4, P(w) = 2/6 -> 0.5 ln 1.5
        let money = 0.5 * 1.5_f64.ln();
        assert!((ar("money", "Economy").unwrap() - money).abs() < 1e-12);
        // bank in Economy: P = 1/4 vs 2/6 -> negative, dropped
        assert_eq!(ar("bank", "Economy"), None);
        // bank in Geography: P = 1/2 vs 2/6 -> 0.5 ln 1.5
        assert!((ar("bank", "Geography").unwrap() - money).abs() < 1e-12);
        // river: P(w|Geo) = 1/2, P(w) = 1/6 -> 0.5 ln 3
        let river = 0.5 * 3.0_f64.ln();
        assert!((ar("river", "Geography").unwrap() - river).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one_before_filtering() {
        let db = load_fixture("domains.lex");
        let counts = gloss_domain_counts(&db, &StopList::default());
        let total: u64 = counts.word_total.values().sum();
        assert_eq!(total, counts.grand_total);
        for (domain, per_word) in &counts.domain_word {
            let sum: u64 = per_word.values().sum();
            assert_eq!(sum, counts.domain_total[domain], "domain {domain}");
            let p_sum: f64 = per_word
                .values()
                .map(|c| *c as f64 / counts.domain_total[domain] as f64)
                .sum();
            assert!((p_sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_context_gives_zero_vector() {
        let db = load_fixture("domains.lex");
        let (lex, _) = build_relevant_domains(&db, &StopList::default());
        let v = context_vector(Vec::<String>::new(), &lex, &DomainParams::default());
        assert!(v.is_zero());
    }

    #[test]
    fn singleton_context_is_the_entry_list() {
        let db = load_fixture("domains.lex");
        let (lex, _) = build_relevant_domains(&db, &StopList::default());
        let params = DomainParams::default();
        let v = context_vector(["money"], &lex, &params);
        for (label, weight) in lex.entries("money").iter().take(params.top_k.0) {
            assert_eq!(v.get(label), *weight);
        }
        assert_eq!(v.components().count(), lex.entries("money").len().min(8));
    }

    #[test]
    fn sense_vector_mirrors_context_vector_over_gloss_tokens() {
        let db = load_fixture("domains.lex");
        let stops = StopList::default();
        let (lex, _) = build_relevant_domains(&db, &stops);
        let params = DomainParams::default();
        let sv = sense_vector(&id("money1"), &db, &lex, &params, &stops).unwrap();
        let tokens = db.gloss_tokens(&id("money1"), &stops).unwrap();
        assert_eq!(sv, context_vector(tokens, &lex, &params));
        assert!(!sv.is_zero());
        // a sense with an empty gloss has a zero vector
        let bare = LexicalDb::load("SYNSET\tN\tx\txx\t\n".as_bytes()).unwrap();
        let sv = sense_vector(&id("x"), &bare, &lex, &params, &stops).unwrap();
        assert!(sv.is_zero());
    }

    #[test]
    fn shared_domain_components_add() {
        let db = load_fixture("domains.lex");
        let (lex, _) = build_relevant_domains(&db, &StopList::default());
        let params = DomainParams::default();
        let a = context_vector(["sloping"], &lex, &params);
        let b = context_vector(["land"], &lex, &params);
        let both = context_vector(["sloping", "land"], &lex, &params);
        assert!(a.get("Geography") > 0.0 && b.get("Geography") > 0.0);
        assert!((both.get("Geography") - (a.get("Geography") + b.get("Geography"))).abs() < 1e-12);
    }

    #[test]
    fn cosine_basics() {
        let mut v = DomainVector::default();
        v.add("A", 1.0);
        v.add("B", 1.0);
        let mut w = DomainVector::default();
        w.add("A", 1.0);
        assert!((cosine(&v, &v) - 1.0).abs() < 1e-12);
        assert!((cosine(&v, &w) - 1.0 / 2.0_f64.sqrt()).abs() < 1e-12);
        let mut z = DomainVector::default();
        z.add("C", 2.0);
        assert_eq!(cosine(&v, &z), 0.0);
        assert_eq!(cosine(&v, &DomainVector::default()), 0.0);
    }

    #[test]
    fn genotype_selects_sense_one() {
        let db = load_fixture("domains.lex");
        let stops = StopList::default();
        let (lex, _) = build_relevant_domains(&db, &stops);
        let params = DomainParams::default();
        let ctx = Context::new(vec!["chromosome", "genotype", "phenotype", "organism"], 1);
        let result = domain_disambiguate(&ctx, &db, &lex, &params, &stops).unwrap();
        assert_eq!(result.outcome, Outcome::Assigned(id("genotype1")));
    }

    #[test]
    fn monosemous_word_with_signal_is_assigned() {
        let db = load_fixture("domains.lex");
        let stops = StopList::default();
        let (lex, _) = build_relevant_domains(&db, &stops);
        let params = DomainParams::default();
        let ctx = Context::new(vec!["money", "deposit"], 0);
        let result = domain_disambiguate(&ctx, &db, &lex, &params, &stops).unwrap();
        assert_eq!(result.outcome, Outcome::Assigned(id("money1")));
    }

    #[test]
    fn zero_context_vector_is_unassigned() {
        let db = load_fixture("domains.lex");
        let stops = StopList::default();
        let (lex, _) = build_relevant_domains(&db, &stops);
        // blacklisting every label forces all vectors to zero
        let blocked = DomainParams {
            blacklist: lex
                .words()
                .flat_map(|w| lex.entries(w).iter().map(|(l, _)| l.clone()))
                .collect(),
            ..DomainParams::default()
        };
        let ctx = Context::new(vec!["genotype", "chromosome"], 0);
        let result = domain_disambiguate(&ctx, &db, &lex, &blocked, &stops).unwrap();
        assert_eq!(result.outcome, Outcome::Unassigned);
    }

    #[test]
    fn argmax_is_scale_invariant() {
        let db = load_fixture("domains.lex");
        let stops = StopList::default();
        let (lex, _) = build_relevant_domains(&db, &stops);
        let scaled = DomainLexicon {
            entries: lex
                .entries
                .iter()
                .map(|(w, list)| {
                    (
                        w.clone(),
                        list.iter().map(|(l, ar)| (l.clone(), ar * 7.25)).collect(),
                    )
                })
                .collect(),
        };
        let params = DomainParams::default();
        let ctx = Context::new(vec!["chromosome", "genotype", "phenotype", "organism"], 1);
        let plain = domain_disambiguate(&ctx, &db, &lex, &params, &stops).unwrap();
        let big = domain_disambiguate(&ctx, &db, &scaled, &params, &stops).unwrap();
        assert_eq!(plain.outcome, big.outcome);
    }

    #[test]
    fn bank_labels_are_economy() {
        let db = load_fixture("domains.lex");
        let stops = StopList::default();
        let (lex, _) = build_relevant_domains(&db, &stops);
        let params = DomainParams::default();
        let ctx = Context::new(vec!["bank", "money", "deposit"], 0);
        let (sense_labels, top) = word_domain_labels(&ctx, &db, &lex, &params, &stops).unwrap();
        assert_eq!(sense_labels, vec!["Economy".to_string()]);
        assert_eq!(top.first().map(String::as_str), Some("Economy"));
    }

    #[test]
    fn top_labels_orders_by_weight_then_name() {
        let mut v = DomainVector::default();
        v.add("Economy", 2.0);
        v.add("Sport", 1.0);
        assert_eq!(v.top_labels(3), vec!["Economy", "Sport"]);
        let mut tie = DomainVector::default();
        tie.add("B", 1.0);
        tie.add("A", 1.0);
        tie.add("C", 0.5);
        assert_eq!(tie.top_labels(2), vec!["A", "B"]);
    }

    #[test]
    fn lexicon_serialization_round_trips() {
        let db = load_fixture("domains.lex");
        let (lex, _) = build_relevant_domains(&db, &StopList::default());
        let mut buf = Vec::new();
        lex.serialize(&mut buf).unwrap();
        let reloaded = DomainLexicon::load(buf.as_slice()).unwrap();
        assert_eq!(lex, reloaded);
    }

    #[test]
    fn build_is_deterministic() {
        let db = load_fixture("domains.lex");
        let (a, _) = build_relevant_domains(&db, &StopList::default());
        let (b, _) = build_relevant_domains(&db, &StopList::default());
        assert_eq!(a, b);
    }

    fn arb_vector() -> impl Strategy<Value = DomainVector> {
        proptest::collection::btree_map("[a-d]", 0.01f64..10.0, 0..5).prop_map(|m| {
            let mut v = DomainVector::default();
            for (label, w) in m {
                v.add(&label, w);
            }
            v
        })
    }

    proptest! {
        #[test]
        fn cosine_is_symmetric_and_bounded(a in arb_vector(), b in arb_vector()) {
            let ab = cosine(&a, &b);
            let ba = cosine(&b, &a);
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab));
            if !a.is_zero() {
                prop_assert!((cosine(&a, &a) - 1.0).abs() < 1e-12);
            }
        }
    }
}
