//! Parameter estimation by generalized iterative scaling, plus the
//! cross-validation and feature-selection machinery built on it.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{StopList, TrainParams};
use crate::lexkb::Pos;

use super::{
    extract_features, Classifier, Feature, FeatureSelection, FeatureTest, MaxentError,
    Observations, Slot, TrainingExample, TrainingMeta,
};

/// Extra per-example observations merged into the extracted ones (the
/// hybrid scheme injects domain labels this way).
pub type Augment<'a> = dyn Fn(&TrainingExample) -> Vec<(Slot, String)> + 'a;

fn observe_all(
    examples: &[TrainingExample],
    sel: &FeatureSelection,
    stops: &StopList,
    augment: Option<&Augment>,
) -> Vec<Observations> {
    examples
        .iter()
        .map(|ex| {
            let mut obs = extract_features(ex, sel, stops);
            if let Some(augment) = augment {
                for (slot, value) in augment(ex) {
                    obs.entry(slot).or_default().insert(value);
                }
            }
            obs
        })
        .collect()
}

/// Frequency-ranked sense labels: count descending, label ascending.
fn rank_senses(examples: &[TrainingExample]) -> Vec<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for ex in examples {
        *counts.entry(&ex.sense).or_default() += 1;
    }
    let mut senses: Vec<(&str, usize)> = counts.into_iter().collect();
    senses.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    senses.into_iter().map(|(s, _)| s.to_string()).collect()
}

/// Resolves the feature set from training observations: one feature per
/// observed (slot, value, sense) for plain slots, one bag feature per
/// (slot, sense) for collapsed slots. Keyword slots apply the threshold:
/// a noun lemma qualifies for a sense when it occurs in at least m% of
/// that sense's examples and at least twice.
pub fn define_features(
    observations: &[Observations],
    senses: &[String],
    golds: &[usize],
    n_per_sense: &[usize],
) -> Vec<Feature> {
    // slot -> sense -> value -> example count
    let mut counts: BTreeMap<Slot, BTreeMap<usize, BTreeMap<String, usize>>> = BTreeMap::new();
    for (obs, &gold) in observations.iter().zip(golds) {
        for (slot, values) in obs {
            let per_sense = counts.entry(slot.clone()).or_default().entry(gold).or_default();
            for v in values {
                *per_sense.entry(v.clone()).or_default() += 1;
            }
        }
    }

    let mut features = Vec::new();
    for (slot, per_sense) in counts {
        let threshold = slot.is_keyword();
        for (sense, value_counts) in per_sense {
            let keep = |count: usize| -> bool {
                match threshold {
                    None => true,
                    Some(m) => {
                        count >= 2 && count as f64 >= m as f64 / 100.0 * n_per_sense[sense] as f64
                    }
                }
            };
            if slot.is_collapsed() {
                let bag: BTreeSet<String> = value_counts
                    .iter()
                    .filter(|(_, c)| keep(**c))
                    .map(|(v, _)| v.clone())
                    .collect();
                if !bag.is_empty() {
                    features.push(Feature {
                        slot: slot.clone(),
                        test: FeatureTest::Bag(bag),
                        sense,
                        alpha: 1.0,
                    });
                }
            } else {
                for (value, count) in &value_counts {
                    if keep(*count) {
                        features.push(Feature {
                            slot: slot.clone(),
                            test: FeatureTest::Value(value.clone()),
                            sense,
                            alpha: 1.0,
                        });
                    }
                }
            }
        }
    }
    let _ = senses;
    features
}

/// Trains one classifier by generalized iterative scaling.
pub fn train(
    examples: &[TrainingExample],
    sel: &FeatureSelection,
    params: &TrainParams,
    stops: &StopList,
) -> Result<Classifier, MaxentError> {
    train_with_extra(examples, sel, params, stops, None)
}

/// As [`train`], merging extra observations per example before feature
/// definition. With `augment` of `None` (or one yielding nothing) the
/// result is identical to plain training.
pub fn train_with_extra(
    examples: &[TrainingExample],
    sel: &FeatureSelection,
    params: &TrainParams,
    stops: &StopList,
    augment: Option<&Augment>,
) -> Result<Classifier, MaxentError> {
    let first = examples.first().ok_or(MaxentError::NoExamples)?;
    let (word, pos) = (first.target_lemma.clone(), first.target_pos);
    for ex in examples {
        if ex.target_lemma != word || ex.target_pos != pos {
            return Err(MaxentError::MixedWords(word, ex.target_lemma.clone()));
        }
    }

    let senses = rank_senses(examples);
    let golds: Vec<usize> = examples
        .iter()
        .map(|ex| senses.iter().position(|s| *s == ex.sense).unwrap())
        .collect();
    let mut n_per_sense = vec![0usize; senses.len()];
    for &g in &golds {
        n_per_sense[g] += 1;
    }
    let priors: Vec<f64> = n_per_sense
        .iter()
        .map(|n| *n as f64 / examples.len() as f64)
        .collect();

    let mut meta = TrainingMeta {
        examples: examples.len(),
        ..TrainingMeta::default()
    };

    if senses.len() == 1 {
        meta.degenerate = true;
        meta.converged = true;
        return Ok(Classifier {
            word,
            pos,
            senses,
            priors,
            features: Vec::new(),
            selection: sel.clone(),
            meta,
        });
    }

    let observations = observe_all(examples, sel, stops, augment);
    let mut features = define_features(&observations, &senses, &golds, &n_per_sense);
    if features.is_empty() {
        // no usable predicates: most-frequent-sense classifier
        meta.converged = true;
        return Ok(Classifier {
            word,
            pos,
            senses,
            priors,
            features,
            selection: sel.clone(),
            meta,
        });
    }

    let fitted = gis(GisProblem {
        features: &mut features,
        observations: &observations,
        golds: &golds,
        n_senses: senses.len(),
        params,
    });
    meta.iterations = fitted.iterations;
    meta.converged = fitted.converged;
    meta.final_gap = fitted.final_gap;
    meta.log_likelihood = fitted.log_likelihood;

    Ok(Classifier {
        word,
        pos,
        senses,
        priors,
        features,
        selection: sel.clone(),
        meta,
    })
}

struct GisProblem<'a> {
    features: &'a mut Vec<Feature>,
    observations: &'a [Observations],
    golds: &'a [usize],
    n_senses: usize,
    params: &'a TrainParams,
}

struct GisOutcome {
    iterations: usize,
    converged: bool,
    final_gap: f64,
    log_likelihood: Vec<f64>,
}

/// Generalized iterative scaling in log space.
///
/// The classic formulation pads every (context, class) pair with a
/// correction feature so the active count is a constant C. When the
/// correction's empirical count is positive it is trained like any other
/// feature (and folded into the real weights afterwards, which leaves
/// the conditional model unchanged). On corpora where every gold pair
/// already has exactly C active features the correction's empirical
/// count is zero and its update is ill-defined, so it is dropped; the
/// slack form of the update (exponent 1/C without padding) keeps the
/// log-likelihood non-decreasing and has the same fixed point.
fn gis(problem: GisProblem) -> GisOutcome {
    let GisProblem {
        features,
        observations,
        golds,
        n_senses,
        params,
    } = problem;
    let n = observations.len();

    // feature index -> examples where its test passes (sense-independent)
    let passes: Vec<Vec<usize>> = features
        .iter()
        .map(|f| {
            (0..n)
                .filter(|&i| f.active(&observations[i]))
                .collect::<Vec<usize>>()
        })
        .collect();

    // active feature count per (example, class)
    let mut active_count = vec![vec![0u32; n_senses]; n];
    for (fi, f) in features.iter().enumerate() {
        for &i in &passes[fi] {
            active_count[i][f.sense] += 1;
        }
    }
    let cap = active_count
        .iter()
        .flat_map(|row| row.iter().copied())
        .max()
        .unwrap_or(0) as f64;

    let empirical: Vec<f64> = features
        .iter()
        .enumerate()
        .map(|(fi, f)| passes[fi].iter().filter(|&&i| golds[i] == f.sense).count() as f64)
        .collect();

    // correction feature bookkeeping (see doc comment)
    let correction_empirical: f64 = (0..n)
        .map(|i| cap - active_count[i][golds[i]] as f64)
        .sum();
    let use_correction = correction_empirical > 0.0;

    let mut lambdas = vec![0.0f64; features.len()];
    let mut lambda_corr = 0.0f64;
    let mut log_likelihood = Vec::new();
    let mut converged = false;
    let mut final_gap = f64::INFINITY;
    let mut iterations = 0;

    for _ in 0..params.max_iters {
        // p(c|x) under the current weights
        let mut probs = vec![vec![0.0f64; n_senses]; n];
        let mut ll = 0.0;
        for i in 0..n {
            let mut scores = vec![0.0f64; n_senses];
            for (fi, f) in features.iter().enumerate() {
                if passes[fi].binary_search(&i).is_ok() {
                    scores[f.sense] += lambdas[fi];
                }
            }
            if use_correction {
                for (c, s) in scores.iter_mut().enumerate() {
                    *s += lambda_corr * (cap - active_count[i][c] as f64);
                }
            }
            let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let z: f64 = scores.iter().map(|s| (s - max).exp()).sum();
            for c in 0..n_senses {
                probs[i][c] = (scores[c] - max).exp() / z;
            }
            ll += probs[i][golds[i]].ln();
        }
        log_likelihood.push(ll);

        let expected: Vec<f64> = features
            .iter()
            .enumerate()
            .map(|(fi, f)| passes[fi].iter().map(|&i| probs[i][f.sense]).sum())
            .collect();
        final_gap = empirical
            .iter()
            .zip(&expected)
            .map(|(e, m)| (e - m).abs())
            .fold(0.0, f64::max);
        if final_gap < params.tol {
            converged = true;
            break;
        }

        iterations += 1;
        for fi in 0..features.len() {
            lambdas[fi] += (empirical[fi].ln() - expected[fi].ln()) / cap;
        }
        if use_correction {
            let expected_corr: f64 = (0..n)
                .map(|i| {
                    (0..n_senses)
                        .map(|c| probs[i][c] * (cap - active_count[i][c] as f64))
                        .sum::<f64>()
                })
                .sum();
            lambda_corr += (correction_empirical.ln() - expected_corr.ln()) / cap;
        }
    }

    // folding the correction into the per-feature weights leaves p(c|x)
    // unchanged: each active feature contributes (alpha_i / alpha_corr)
    for (f, lambda) in features.iter_mut().zip(&lambdas) {
        f.alpha = (lambda - lambda_corr).exp();
    }
    GisOutcome {
        iterations,
        converged,
        final_gap,
        log_likelihood,
    }
}

/// One stratified cross-validation run.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub folds: usize,
    pub fold_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
    pub senses_kept: usize,
    pub rejected_senses: Vec<String>,
    /// fold index per retained example, aligned with `kept_examples`.
    pub assignment: Vec<(String, usize)>,
}

/// Stratified k-fold cross-validation: within each sense the examples
/// are shuffled by the seed and dealt round-robin (start fold rotating
/// with the sense ordinal), so every fold holds floor or ceil of n/k
/// examples of each sense. Senses with fewer than `folds` examples are
/// rejected before splitting.
pub fn cross_validate(
    examples: &[TrainingExample],
    sel: &FeatureSelection,
    folds: usize,
    seed: u64,
    params: &TrainParams,
    stops: &StopList,
) -> Result<CvReport, MaxentError> {
    if folds < 2 {
        return Err(MaxentError::TooFewFolds);
    }
    if examples.is_empty() {
        return Err(MaxentError::NoExamples);
    }

    let senses = rank_senses(examples);
    let mut by_sense: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, ex) in examples.iter().enumerate() {
        by_sense.entry(&ex.sense).or_default().push(i);
    }

    let mut rejected = Vec::new();
    let mut fold_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept_senses = 0;
    for (ordinal, sense) in senses.iter().enumerate() {
        let indices = &by_sense[sense.as_str()];
        if indices.len() < folds {
            rejected.push(sense.clone());
            continue;
        }
        kept_senses += 1;
        let mut shuffled = indices.clone();
        shuffled.shuffle(&mut rng);
        for (j, idx) in shuffled.into_iter().enumerate() {
            fold_of.insert(idx, (ordinal + j) % folds);
        }
    }
    if kept_senses == 0 {
        return Err(MaxentError::NoSenseSurvives { folds });
    }

    let mut fold_accuracy = Vec::with_capacity(folds);
    for fold in 0..folds {
        let train_set: Vec<TrainingExample> = fold_of
            .iter()
            .filter(|(_, f)| **f != fold)
            .map(|(i, _)| examples[*i].clone())
            .collect();
        let test_set: Vec<&TrainingExample> = fold_of
            .iter()
            .filter(|(_, f)| **f == fold)
            .map(|(i, _)| &examples[*i])
            .collect();
        let clf = train(&train_set, sel, params, stops)?;
        let correct = test_set
            .iter()
            .filter(|ex| clf.classify(ex, stops).map(|a| a.sense == ex.sense).unwrap_or(false))
            .count();
        fold_accuracy.push(correct as f64 / test_set.len() as f64);
    }
    let mean_accuracy = fold_accuracy.iter().sum::<f64>() / folds as f64;
    Ok(CvReport {
        folds,
        fold_accuracy,
        mean_accuracy,
        senses_kept: kept_senses,
        rejected_senses: rejected,
        assignment: fold_of
            .into_iter()
            .map(|(i, f)| (examples[i].id.clone(), f))
            .collect(),
    })
}

/// How [`select_best`] groups words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectMode {
    /// Best candidate per word (keys like `canal,N`).
    PerWord,
    /// Best candidate per part of speech, plus the pooled `ALL` row.
    PerPos,
}

/// Cross-validated feature selection over a multi-word corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    /// word or POS key -> (winning selection, mean accuracy).
    pub entries: BTreeMap<String, (FeatureSelection, f64)>,
    pub warnings: Vec<String>,
}

/// Picks the accuracy-maximizing candidate per word or per POS via
/// stratified cross-validation; ties keep the earlier candidate. Words
/// whose senses are all too rare are skipped with a warning.
pub fn select_best(
    examples: &[TrainingExample],
    candidates: &[FeatureSelection],
    mode: SelectMode,
    folds: usize,
    seed: u64,
    params: &TrainParams,
    stops: &StopList,
) -> Result<SelectionReport, MaxentError> {
    if candidates.is_empty() {
        return Err(MaxentError::NoCandidates);
    }
    // group by word, preserving first-appearance order
    let mut order: Vec<(String, Pos)> = Vec::new();
    let mut groups: BTreeMap<(String, Pos), Vec<TrainingExample>> = BTreeMap::new();
    for ex in examples {
        let key = (ex.target_lemma.clone(), ex.target_pos);
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(ex.clone());
    }

    let mut warnings = Vec::new();
    // per word: accuracy of each candidate
    let mut word_scores: Vec<((String, Pos), Vec<f64>)> = Vec::new();
    for key in &order {
        let group = &groups[key];
        let mut scores = Vec::with_capacity(candidates.len());
        let mut failed = false;
        for sel in candidates {
            match cross_validate(group, sel, folds, seed, params, stops) {
                Ok(report) => scores.push(report.mean_accuracy),
                Err(e) => {
                    warnings.push(format!("{},{}: skipped ({e})", key.0, key.1.tag()));
                    failed = true;
                    break;
                }
            }
        }
        if !failed {
            word_scores.push((key.clone(), scores));
        }
    }

    let argmax = |scores: &[f64]| -> usize {
        let mut best = 0;
        for (i, s) in scores.iter().enumerate() {
            if *s > scores[best] {
                best = i;
            }
        }
        best
    };

    let mut entries = BTreeMap::new();
    match mode {
        SelectMode::PerWord => {
            for ((lemma, pos), scores) in &word_scores {
                let best = argmax(scores);
                entries.insert(
                    format!("{lemma},{}", pos.tag()),
                    (candidates[best].clone(), scores[best]),
                );
            }
        }
        SelectMode::PerPos => {
            let mut by_pos: BTreeMap<char, Vec<&Vec<f64>>> = BTreeMap::new();
            for ((_, pos), scores) in &word_scores {
                by_pos.entry(pos.tag()).or_default().push(scores);
            }
            by_pos.insert('*', word_scores.iter().map(|(_, s)| s).collect());
            for (tag, rows) in by_pos {
                if rows.is_empty() {
                    continue;
                }
                let means: Vec<f64> = (0..candidates.len())
                    .map(|ci| rows.iter().map(|r| r[ci]).sum::<f64>() / rows.len() as f64)
                    .collect();
                let best = argmax(&means);
                let key = if tag == '*' { "ALL".to_string() } else { tag.to_string() };
                entries.insert(key, (candidates[best].clone(), means[best]));
            }
        }
    }
    Ok(SelectionReport { entries, warnings })
}

/// Answers every test example with each of the three selection systems
/// (fixed, best-per-word, best-per-POS) trained on the training set,
/// then majority-votes them. Returned per instance: the three system
/// answers in (MEfix, MEbfs, MEbfs.pos) order plus the voted sense.
#[allow(clippy::too_many_arguments)]
pub fn run_me_systems(
    train_set: &[TrainingExample],
    test_set: &[TrainingExample],
    candidates: &[FeatureSelection],
    fixed: &FeatureSelection,
    folds: usize,
    seed: u64,
    params: &TrainParams,
    stops: &StopList,
) -> Result<Vec<MeSystemsAnswer>, MaxentError> {
    let per_word = select_best(
        train_set,
        candidates,
        SelectMode::PerWord,
        folds,
        seed,
        params,
        stops,
    )?;
    let per_pos = select_best(
        train_set,
        candidates,
        SelectMode::PerPos,
        folds,
        seed,
        params,
        stops,
    )?;

    let mut groups: BTreeMap<(String, Pos), Vec<TrainingExample>> = BTreeMap::new();
    for ex in train_set {
        groups
            .entry((ex.target_lemma.clone(), ex.target_pos))
            .or_default()
            .push(ex.clone());
    }

    let mut classifiers: BTreeMap<(String, Pos, &'static str), Classifier> = BTreeMap::new();
    for (key, group) in &groups {
        let word_key = format!("{},{}", key.0, key.1.tag());
        let bfs_sel = per_word
            .entries
            .get(&word_key)
            .map(|(sel, _)| sel.clone())
            .unwrap_or_else(|| fixed.clone());
        let pos_sel = per_pos
            .entries
            .get(&key.1.tag().to_string())
            .or_else(|| per_pos.entries.get("ALL"))
            .map(|(sel, _)| sel.clone())
            .unwrap_or_else(|| fixed.clone());
        classifiers.insert(
            (key.0.clone(), key.1, "MEfix"),
            train(group, fixed, params, stops)?,
        );
        classifiers.insert(
            (key.0.clone(), key.1, "MEbfs"),
            train(group, &bfs_sel, params, stops)?,
        );
        classifiers.insert(
            (key.0.clone(), key.1, "MEbfs.pos"),
            train(group, &pos_sel, params, stops)?,
        );
    }

    let mut out = Vec::new();
    for ex in test_set {
        let key = (ex.target_lemma.clone(), ex.target_pos);
        let mut answers = Vec::new();
        for system in ["MEfix", "MEbfs", "MEbfs.pos"] {
            if let Some(clf) = classifiers.get(&(key.0.clone(), key.1, system)) {
                answers.push((system.to_string(), clf.classify(ex, stops)?.sense));
            }
        }
        let mfs = classifiers
            .get(&(key.0.clone(), key.1, "MEfix"))
            .map(|c| c.mfs().to_string());
        let voted = super::vote_me(&answers, mfs.as_deref());
        out.push(MeSystemsAnswer {
            instance: ex.id.clone(),
            answers,
            voted,
        });
    }
    Ok(out)
}

/// Per-instance output of [`run_me_systems`].
#[derive(Debug, Clone, PartialEq)]
pub struct MeSystemsAnswer {
    pub instance: String,
    /// (system label, sense), in MEfix / MEbfs / MEbfs.pos order.
    pub answers: Vec<(String, String)>,
    pub voted: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::super::testsupport::*;
    use super::super::AnnotatedToken;
    use super::*;
    use crate::config::TrainParams;

    fn defaults() -> (TrainParams, StopList) {
        (TrainParams::default(), StopList::default())
    }

    /// Independent brute-force fit of the same maximum-entropy model:
    /// plain gradient ascent on the conditional log-likelihood over the
    /// (feature, sense) indicator matrix. Shares nothing with the GIS
    /// path but the feature definitions it is checking. The step size
    /// stays under the curvature bound (sum of per-example active
    /// counts) so the ascent cannot oscillate.
    pub(crate) fn oracle_distributions(
        features: &[Feature],
        observations: &[Observations],
        golds: &[usize],
        n_senses: usize,
        steps: usize,
    ) -> Vec<Vec<f64>> {
        let n = observations.len();
        let fires: Vec<Vec<bool>> = features
            .iter()
            .map(|f| observations.iter().map(|o| f.active(o)).collect())
            .collect();
        let active_per_example: usize = (0..n)
            .map(|i| (0..features.len()).filter(|&fi| fires[fi][i]).count())
            .sum();
        let rate = 2.0 / (1.0 + active_per_example as f64);
        let mut weights = vec![0.0f64; features.len()];
        let mut probs = vec![vec![0.0f64; n_senses]; n];
        for _ in 0..steps {
            for i in 0..n {
                let mut scores = vec![0.0f64; n_senses];
                for (fi, f) in features.iter().enumerate() {
                    if fires[fi][i] {
                        scores[f.sense] += weights[fi];
                    }
                }
                let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let z: f64 = scores.iter().map(|s| (s - max).exp()).sum();
                for c in 0..n_senses {
                    probs[i][c] = (scores[c] - max).exp() / z;
                }
            }
            for (fi, f) in features.iter().enumerate() {
                let mut grad = 0.0;
                for i in 0..n {
                    if fires[fi][i] {
                        grad += (golds[i] == f.sense) as u8 as f64 - probs[i][f.sense];
                    }
                }
                weights[fi] += rate * grad;
            }
        }
        probs
    }

    #[test]
    fn interest_corpus_feature_counts_match_worked_example() {
        let examples = interest_corpus();
        let (params, stops) = defaults();
        let _ = params;

        // non-collapsed POS features at position -1: three pairs
        let clf = train(&examples, &FeatureSelection::parse("p").unwrap(), &TrainParams::default(), &stops).unwrap();
        let at_minus_one: Vec<&Feature> = clf
            .features
            .iter()
            .filter(|f| f.slot == Slot::PosTag(-1))
            .collect();
        assert_eq!(at_minus_one.len(), 3);

        // collapsed form: one bag per sense
        let clf = train(&examples, &FeatureSelection::parse("P").unwrap(), &TrainParams::default(), &stops).unwrap();
        let collapsed: Vec<&Feature> = clf
            .features
            .iter()
            .filter(|f| f.slot == Slot::PosBag(-1))
            .collect();
        assert_eq!(collapsed.len(), 2);
        let bag_of = |sense: &str| -> &BTreeSet<String> {
            let idx = clf.senses.iter().position(|s| s == sense).unwrap();
            match &collapsed.iter().find(|f| f.sense == idx).unwrap().test {
                FeatureTest::Bag(bag) => bag,
                _ => panic!("collapsed feature must carry a bag"),
            }
        };
        assert_eq!(
            bag_of("interest#1"),
            &BTreeSet::from(["ADJ".to_string(), "VERB".to_string()])
        );
        assert_eq!(bag_of("interest#5"), &BTreeSet::from(["ADJ".to_string()]));
    }

    #[test]
    fn collapsed_features_never_outnumber_plain_ones() {
        let examples = interest_corpus();
        let stops = StopList::default();
        let params = TrainParams::default();
        for (plain, collapsed) in [("s", "S"), ("p", "P"), ("b", "B"), ("c", "C")] {
            let plain_clf =
                train(&examples, &FeatureSelection::parse(plain).unwrap(), &params, &stops)
                    .unwrap();
            let collapsed_clf =
                train(&examples, &FeatureSelection::parse(collapsed).unwrap(), &params, &stops)
                    .unwrap();
            assert!(
                collapsed_clf.features.len() <= plain_clf.features.len(),
                "{collapsed} produced more features than {plain}"
            );
        }
    }

    #[test]
    fn separable_corpus_reaches_confident_training_fit() {
        let (mut params, stops) = defaults();
        params.max_iters = 2000;
        let examples = vec![
            example("1", "w", "a", [("x","x","X"),("red","red","ADJ"),("w","w","NOUN"),("x","x","X"),("x","x","X")]),
            example("2", "w", "a", [("y","y","X"),("red","red","ADJ"),("w","w","NOUN"),("x","x","X"),("x","x","X")]),
            example("3", "w", "b", [("x","x","X"),("blue","blue","ADJ"),("w","w","NOUN"),("x","x","X"),("x","x","X")]),
            example("4", "w", "b", [("y","y","X"),("blue","blue","ADJ"),("w","w","NOUN"),("x","x","X"),("x","x","X")]),
        ];
        let sel = FeatureSelection::parse("s").unwrap();
        let clf = train(&examples, &sel, &params, &stops).unwrap();
        for ex in &examples {
            let answer = clf.classify(ex, &stops).unwrap();
            assert_eq!(answer.sense, ex.sense);
            let p = answer
                .distribution
                .iter()
                .find(|(s, _)| *s == ex.sense)
                .unwrap()
                .1;
            assert!(p > 0.99, "p(gold) = {p}");
        }
    }

    #[test]
    fn single_sense_training_set_is_degenerate_but_total() {
        let (params, stops) = defaults();
        let examples = vec![
            example("1", "w", "only", [("a","a","X"),("b","b","X"),("w","w","NOUN"),("c","c","X"),("d","d","X")]),
            example("2", "w", "only", [("e","e","X"),("f","f","X"),("w","w","NOUN"),("g","g","X"),("h","h","X")]),
        ];
        let clf = train(&examples, &FeatureSelection::parse("s").unwrap(), &params, &stops).unwrap();
        assert!(clf.meta.degenerate);
        let answer = clf.classify(&examples[0], &stops).unwrap();
        assert_eq!(answer.sense, "only");
        assert_eq!(answer.distribution, vec![("only".to_string(), 1.0)]);
    }

    #[test]
    fn uninformative_features_recover_the_priors() {
        let (mut params, stops) = defaults();
        params.max_iters = 500;
        params.tol = 1e-9;
        // the -1 word is constant, so the only feature per sense is the
        // shared value; maximum entropy must match the 3:1 marginal
        let make = |id: &str, sense: &str| {
            example(id, "w", sense, [("a","a","X"),("same","same","ADJ"),("w","w","NOUN"),("b","b","X"),("c","c","X")])
        };
        let examples = vec![make("1", "a"), make("2", "a"), make("3", "a"), make("4", "b")];
        let clf = train(&examples, &FeatureSelection::parse("s").unwrap(), &params, &stops).unwrap();
        let answer = clf.classify(&examples[0], &stops).unwrap();
        let p_a = answer.distribution.iter().find(|(s, _)| s == "a").unwrap().1;
        let p_b = answer.distribution.iter().find(|(s, _)| s == "b").unwrap().1;
        assert!((p_a - 0.75).abs() < 1e-3, "p(a) = {p_a}");
        assert!((p_b - 0.25).abs() < 1e-3, "p(b) = {p_b}");
    }

    #[test]
    fn log_likelihood_never_decreases() {
        let (mut params, stops) = defaults();
        params.max_iters = 200;
        let examples = interest_corpus();
        let clf = train(&examples, &FeatureSelection::parse("spbc").unwrap(), &params, &stops)
            .unwrap();
        let ll = &clf.meta.log_likelihood;
        assert!(!ll.is_empty());
        for pair in ll.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-9, "log-likelihood dropped: {pair:?}");
        }
    }

    #[test]
    fn classifier_distributions_sum_to_one() {
        let (params, stops) = defaults();
        let examples = interest_corpus();
        let clf = train(&examples, &FeatureSelection::parse("sp").unwrap(), &params, &stops)
            .unwrap();
        for ex in &examples {
            let answer = clf.classify(ex, &stops).unwrap();
            let sum: f64 = answer.distribution.iter().map(|(_, p)| p).sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn unknown_context_falls_back_to_mfs_with_priors() {
        let (params, stops) = defaults();
        let examples = interest_corpus();
        let clf = train(&examples, &FeatureSelection::parse("s").unwrap(), &params, &stops)
            .unwrap();
        let unseen = example("u", "interest", "interest#1", [
            ("qq", "qq", "Z"),
            ("zz", "zz", "Z"),
            ("interest", "interest", "NOUN"),
            ("yy", "yy", "Z"),
            ("ww", "ww", "Z"),
        ]);
        // every window word is unseen, but boundary sentinels are not
        // observed here since all positions are filled with new words;
        // the s-features still fail to fire only if no value matches
        let answer = clf.classify(&unseen, &stops).unwrap();
        assert_eq!(answer.sense, "interest#1"); // MFS (2 of 3 examples)
        if answer.mfs_fallback {
            let expected: Vec<(String, f64)> = vec![
                ("interest#1".into(), 2.0 / 3.0),
                ("interest#5".into(), 1.0 / 3.0),
            ];
            for ((s, p), (es, ep)) in answer.distribution.iter().zip(&expected) {
                assert_eq!(s, es);
                assert!((p - ep).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classify_rejects_other_words() {
        let (params, stops) = defaults();
        let clf = train(&interest_corpus(), &FeatureSelection::parse("s").unwrap(), &params, &stops)
            .unwrap();
        let other = example("o", "bass", "bass#1", [
            ("a","a","X"),("b","b","X"),("bass","bass","NOUN"),("c","c","X"),("d","d","X"),
        ]);
        assert!(matches!(
            clf.classify(&other, &stops),
            Err(MaxentError::WordMismatch { .. })
        ));
    }

    #[test]
    fn gis_matches_brute_force_oracle_on_toy_problems() {
        let (mut params, stops) = defaults();
        params.max_iters = 30000;
        params.tol = 1e-8;
        let corpora: Vec<Vec<TrainingExample>> = vec![
            // overlapping evidence, 2 senses
            vec![
                example("1", "w", "a", [("u","u","X"),("red","red","J"),("w","w","N"),("p","p","X"),("x","x","X")]),
                example("2", "w", "a", [("u","u","X"),("red","red","J"),("w","w","N"),("q","q","X"),("x","x","X")]),
                example("3", "w", "b", [("u","u","X"),("red","red","J"),("w","w","N"),("p","p","X"),("x","x","X")]),
                example("4", "w", "b", [("u","u","X"),("blue","blue","J"),("w","w","N"),("q","q","X"),("x","x","X")]),
            ],
            // 3 senses, mixed signals
            vec![
                example("1", "w", "a", [("m","m","X"),("one","one","J"),("w","w","N"),("p","p","X"),("x","x","X")]),
                example("2", "w", "b", [("m","m","X"),("two","two","J"),("w","w","N"),("p","p","X"),("x","x","X")]),
                example("3", "w", "c", [("m","m","X"),("three","three","J"),("w","w","N"),("q","q","X"),("x","x","X")]),
                example("4", "w", "a", [("m","m","X"),("one","one","J"),("w","w","N"),("q","q","X"),("x","x","X")]),
                example("5", "w", "b", [("m","m","X"),("one","one","J"),("w","w","N"),("p","p","X"),("x","x","X")]),
            ],
        ];
        for examples in corpora {
            let sel = FeatureSelection::parse("s").unwrap();
            let clf = train(&examples, &sel, &params, &stops).unwrap();

            let senses = clf.senses.clone();
            let golds: Vec<usize> = examples
                .iter()
                .map(|e| senses.iter().position(|s| *s == e.sense).unwrap())
                .collect();
            let observations: Vec<Observations> = examples
                .iter()
                .map(|e| extract_features(e, &sel, &stops))
                .collect();
            let oracle = oracle_distributions(
                &clf.features,
                &observations,
                &golds,
                senses.len(),
                200_000,
            );
            for (i, ex) in examples.iter().enumerate() {
                let answer = clf.classify(ex, &stops).unwrap();
                for (c, (_, p)) in answer.distribution.iter().enumerate() {
                    assert!(
                        (p - oracle[i][c]).abs() < 1e-3,
                        "example {i} class {c}: gis {p} vs oracle {}",
                        oracle[i][c]
                    );
                }
            }
        }
    }

    #[test]
    fn keyword_threshold_filters_rare_nouns() {
        let (params, stops) = defaults();
        let mut examples = Vec::new();
        // "market" appears in 3 of 4 sense-a examples; "once" in 1
        for (i, noun) in ["market", "market", "market", "once"].iter().enumerate() {
            examples.push(example(
                &format!("a{i}"),
                "w",
                "a",
                [("the","the","DET"),(noun,noun,"NOUN"),("w","w","NOUN"),("of","of","PREP"),("x","x","X")],
            ));
        }
        for i in 0..4 {
            examples.push(example(
                &format!("b{i}"),
                "w",
                "b",
                [("the","the","DET"),("river","river","NOUN"),("w","w","NOUN"),("of","of","PREP"),("x","x","X")],
            ));
        }
        let clf = train(&examples, &FeatureSelection::parse("k50").unwrap(), &params, &stops)
            .unwrap();
        let kw: Vec<&Feature> = clf
            .features
            .iter()
            .filter(|f| f.slot == Slot::Keyword(50))
            .collect();
        let values: BTreeSet<&str> = kw
            .iter()
            .map(|f| match &f.test {
                FeatureTest::Value(v) => v.as_str(),
                _ => unreachable!(),
            })
            .collect();
        assert!(values.contains("market") && values.contains("river"));
        assert!(!values.contains("once"), "1 of 4 misses both gates");
    }

    #[test]
    fn cross_validation_stratifies_and_rejects_rare_senses() {
        let (params, stops) = defaults();
        let mut examples = Vec::new();
        for i in 0..3 {
            examples.push(example(&format!("a{i}"), "w", "a",
                [("u","u","X"),("red","red","J"),("w","w","N"),("p","p","X"),("x","x","X")]));
            examples.push(example(&format!("b{i}"), "w", "b",
                [("u","u","X"),("blue","blue","J"),("w","w","N"),("p","p","X"),("x","x","X")]));
        }
        examples.push(example("c0", "w", "c",
            [("u","u","X"),("green","green","J"),("w","w","N"),("p","p","X"),("x","x","X")]));
        examples.push(example("c1", "w", "c",
            [("u","u","X"),("green","green","J"),("w","w","N"),("p","p","X"),("x","x","X")]));

        let sel = FeatureSelection::parse("s").unwrap();
        let report = cross_validate(&examples, &sel, 3, 7, &params, &stops).unwrap();
        assert_eq!(report.rejected_senses, vec!["c".to_string()]);
        assert_eq!(report.senses_kept, 2);
        // exactly one example of each kept sense per fold
        for fold in 0..3 {
            for sense in ["a", "b"] {
                let count = report
                    .assignment
                    .iter()
                    .filter(|(id, f)| *f == fold && id.starts_with(sense))
                    .count();
                assert_eq!(count, 1, "fold {fold} sense {sense}");
            }
        }
    }

    #[test]
    fn cross_validation_is_seed_deterministic() {
        let (params, stops) = defaults();
        let file = std::fs::File::open(crate::testutil::fixture_path("bass.corpus")).unwrap();
        let examples = super::super::parse_corpus(std::io::BufReader::new(file)).unwrap();
        let sel = FeatureSelection::parse("sk25").unwrap();
        let a = cross_validate(&examples, &sel, 3, 42, &params, &stops).unwrap();
        let b = cross_validate(&examples, &sel, 3, 42, &params, &stops).unwrap();
        assert_eq!(a, b);
        let c = cross_validate(&examples, &sel, 3, 43, &params, &stops).unwrap();
        assert_eq!(a.folds, c.folds); // different shuffles may or may not agree
    }

    #[test]
    fn cross_validation_errors_when_nothing_survives() {
        let (params, stops) = defaults();
        let examples = interest_corpus(); // 2 + 1 examples
        let sel = FeatureSelection::parse("s").unwrap();
        assert!(matches!(
            cross_validate(&examples, &sel, 3, 1, &params, &stops),
            Err(MaxentError::NoSenseSurvives { folds: 3 })
        ));
    }

    #[test]
    fn separable_bass_corpus_cross_validates_perfectly() {
        let (params, stops) = defaults();
        let file = std::fs::File::open(crate::testutil::fixture_path("bass.corpus")).unwrap();
        let examples = super::super::parse_corpus(std::io::BufReader::new(file)).unwrap();
        let sel = FeatureSelection::parse("s").unwrap();
        let report = cross_validate(&examples, &sel, 3, 5, &params, &stops).unwrap();
        assert!(report.mean_accuracy > 0.9, "accuracy {}", report.mean_accuracy);
    }

    #[test]
    fn select_best_prefers_the_informative_candidate() {
        let (params, stops) = defaults();
        let file = std::fs::File::open(crate::testutil::fixture_path("bass.corpus")).unwrap();
        let examples = super::super::parse_corpus(std::io::BufReader::new(file)).unwrap();
        // POS tags are near-constant across senses; the word window
        // separates them cleanly
        let candidates = vec![
            FeatureSelection::parse("p").unwrap(),
            FeatureSelection::parse("s").unwrap(),
        ];
        let report = select_best(
            &examples,
            &candidates,
            SelectMode::PerWord,
            3,
            11,
            &params,
            &stops,
        )
        .unwrap();
        let (sel, acc) = &report.entries["bass,N"];
        assert_eq!(sel.render(), "s");
        assert!(*acc > 0.9);
    }

    #[test]
    fn select_best_single_candidate_wins_everywhere() {
        let (params, stops) = defaults();
        let file = std::fs::File::open(crate::testutil::fixture_path("bass.corpus")).unwrap();
        let examples = super::super::parse_corpus(std::io::BufReader::new(file)).unwrap();
        let candidates = vec![FeatureSelection::parse("s").unwrap()];
        let report = select_best(
            &examples,
            &candidates,
            SelectMode::PerPos,
            3,
            11,
            &params,
            &stops,
        )
        .unwrap();
        assert_eq!(report.entries["N"].0.render(), "s");
        assert_eq!(report.entries["ALL"].0.render(), "s");
    }

    #[test]
    fn select_best_groups_parts_of_speech_separately() {
        let (params, stops) = defaults();
        // noun: the word window separates; POS tags are constant
        let mut examples = Vec::new();
        for i in 0..6 {
            let (sense, cue) = if i < 3 { ("n1", "red") } else { ("n2", "blue") };
            examples.push(example(&format!("n{i}"), "wn", sense, [
                ("the","the","DET"),(cue,cue,"ADJ"),("wn","wn","NOUN"),("of","of","PREP"),("it","it","DET"),
            ]));
        }
        // verb: every window word is unique, but the -1 tag separates
        for i in 0..6 {
            let (sense, tag) = if i < 3 { ("v1", "ADV") } else { ("v2", "NOUN") };
            let prev = format!("u{i}");
            let mut ex = example(&format!("v{i}"), "wv", sense, [
                ("the","the","DET"),("x","x","X"),("wv","wv","VERB"),("of","of","PREP"),("it","it","DET"),
            ]);
            ex.target_pos = Pos::Verb;
            ex.tokens[1] = AnnotatedToken {
                surface: prev.clone(),
                lemma: prev,
                pos_tag: tag.into(),
                dep_head: None,
                dep_rel: None,
                multiword: false,
            };
            ex.tokens[2].pos_tag = "VERB".into();
            examples.push(ex);
        }
        let candidates = vec![
            FeatureSelection::parse("s").unwrap(),
            FeatureSelection::parse("p").unwrap(),
        ];
        let report = select_best(
            &examples,
            &candidates,
            SelectMode::PerPos,
            3,
            23,
            &params,
            &stops,
        )
        .unwrap();
        assert_eq!(report.entries["N"].0.render(), "s");
        assert_eq!(report.entries["V"].0.render(), "p");
        assert!(report.entries.contains_key("ALL"));
    }

    #[test]
    fn argmax_survives_example_permutation() {
        let (mut params, stops) = defaults();
        params.max_iters = 500;
        let file = std::fs::File::open(crate::testutil::fixture_path("bass.corpus")).unwrap();
        let examples = super::super::parse_corpus(std::io::BufReader::new(file)).unwrap();
        let sel = FeatureSelection::parse("sk25").unwrap();
        let clf = train(&examples, &sel, &params, &stops).unwrap();
        let mut reversed = examples.clone();
        reversed.reverse();
        let clf_rev = train(&reversed, &sel, &params, &stops).unwrap();
        for ex in &examples {
            assert_eq!(
                clf.classify(ex, &stops).unwrap().sense,
                clf_rev.classify(ex, &stops).unwrap().sense
            );
        }
    }
}
