//! Scoring and system comparison: precision/recall/coverage, pairwise
//! agreement, chance-corrected agreement, wins/ties/loses, the
//! most-frequent-sense baseline, and report rendering.
//!
//! Statistical significance of precision differences (the corrected
//! difference of two proportions) is intentionally out of scope; run
//! the comparison reports through an external stats package if needed.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use crate::lexkb::{LexicalDb, Pos};
use crate::maxent::TrainingExample;
use crate::specmarks::{Outcome, SenseAssignment};

/// One system's answers: instance id -> sense label, `None` = abstained.
/// Instances missing from the map count as abstentions too.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnswerSet {
    pub system: String,
    pub answers: BTreeMap<String, Option<String>>,
}

impl AnswerSet {
    pub fn new(system: impl Into<String>) -> Self {
        AnswerSet {
            system: system.into(),
            answers: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, answer: Option<String>) {
        self.answers.insert(id.into(), answer);
    }

    fn answer(&self, id: &str) -> Option<&str> {
        self.answers.get(id).and_then(|a| a.as_deref())
    }
}

/// Gold standard: instance id -> sense label.
pub type Gold = BTreeMap<String, String>;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("system {system:?} answers instance {id:?} which is not in the gold standard")]
    NotInGold { system: String, id: String },
    #[error("kappa is undefined: both marginals are constant and the systems disagree")]
    KappaUndefined,
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Precision/recall/coverage triple with the underlying counts.
/// recall = precision * coverage by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub system: String,
    pub total: usize,
    pub attempted: usize,
    pub correct: f64,
    pub precision: f64,
    pub recall: f64,
    pub coverage: f64,
}

fn ratio(num: f64, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num / den as f64
    }
}

/// Scores one system against the gold standard. Instances the system
/// never mentions count as abstentions; answering an unknown instance is
/// an error.
pub fn score(sys: &AnswerSet, gold: &Gold) -> Result<ScoreReport, EvalError> {
    for id in sys.answers.keys() {
        if !gold.contains_key(id) {
            return Err(EvalError::NotInGold {
                system: sys.system.clone(),
                id: id.clone(),
            });
        }
    }
    let mut attempted = 0usize;
    let mut correct = 0f64;
    for (id, want) in gold {
        if let Some(got) = sys.answer(id) {
            attempted += 1;
            if got == want {
                correct += 1.0;
            }
        }
    }
    Ok(ScoreReport {
        system: sys.system.clone(),
        total: gold.len(),
        attempted,
        correct,
        precision: ratio(correct, attempted),
        recall: ratio(correct, gold.len()),
        coverage: ratio(attempted as f64, gold.len()),
    })
}

/// How reduced (multi-sense) outcomes are credited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Credit {
    /// Reduced outcomes are abstentions.
    #[default]
    Strict,
    /// A reduced set containing the gold sense earns 1/|set|.
    Soft,
}

/// Scores sense assignments directly, so reduced outcomes can earn
/// partial credit (the answer-file format can only say sense-or-abstain).
pub fn score_assignments(
    system: &str,
    assignments: &[(String, SenseAssignment)],
    gold: &Gold,
    credit: Credit,
) -> Result<ScoreReport, EvalError> {
    let mut attempted = 0usize;
    let mut correct = 0f64;
    for (id, assignment) in assignments {
        let want = gold.get(id).ok_or_else(|| EvalError::NotInGold {
            system: system.to_string(),
            id: id.clone(),
        })?;
        match &assignment.outcome {
            Outcome::Assigned(sense) => {
                attempted += 1;
                if sense.to_string() == *want {
                    correct += 1.0;
                }
            }
            Outcome::Reduced(set) => {
                if credit == Credit::Soft {
                    attempted += 1;
                    if set.iter().any(|s| s.to_string() == *want) {
                        correct += 1.0 / set.len() as f64;
                    }
                }
            }
            Outcome::Unassigned => {}
        }
    }
    Ok(ScoreReport {
        system: system.to_string(),
        total: gold.len(),
        attempted,
        correct,
        precision: ratio(correct, attempted),
        recall: ratio(correct, gold.len()),
        coverage: ratio(attempted as f64, gold.len()),
    })
}

/// Fractions of instances where both, exactly one, or neither system is
/// correct. Abstention counts as incorrect; the three sum to one.
pub fn pair_agreement(
    a: &AnswerSet,
    b: &AnswerSet,
    gold: &Gold,
) -> Result<(f64, f64, f64), EvalError> {
    score(a, gold)?;
    score(b, gold)?;
    let mut both = 0usize;
    let mut one = 0usize;
    let mut zero = 0usize;
    for (id, want) in gold {
        let a_ok = a.answer(id) == Some(want.as_str());
        let b_ok = b.answer(id) == Some(want.as_str());
        match (a_ok, b_ok) {
            (true, true) => both += 1,
            (false, false) => zero += 1,
            _ => one += 1,
        }
    }
    let n = gold.len().max(1) as f64;
    Ok((both as f64 / n, one as f64 / n, zero as f64 / n))
}

/// Accuracy of the oracle that answers correctly whenever either system
/// does: 1 - zero_ok.
pub fn optimal_combination(a: &AnswerSet, b: &AnswerSet, gold: &Gold) -> Result<f64, EvalError> {
    let (_, _, zero) = pair_agreement(a, b, gold)?;
    Ok(1.0 - zero)
}

/// Whether kappa keeps abstentions as an answer category or drops the
/// instances where either system abstained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KappaMode {
    #[default]
    AbstainAsCategory,
    DropAbstentions,
}

const ABSTAIN: &str = "\u{1}abstain";

/// Chance-corrected agreement between two systems over the union of
/// their instances: (p_o - p_e) / (1 - p_e) with the expected agreement
/// from the two answer marginals pooled over instances.
pub fn kappa(a: &AnswerSet, b: &AnswerSet, mode: KappaMode) -> Result<f64, EvalError> {
    let ids: BTreeSet<&String> = a.answers.keys().chain(b.answers.keys()).collect();
    let mut rows: Vec<(&str, &str)> = Vec::new();
    for id in ids {
        let left = a.answer(id).unwrap_or(ABSTAIN);
        let right = b.answer(id).unwrap_or(ABSTAIN);
        if mode == KappaMode::DropAbstentions && (left == ABSTAIN || right == ABSTAIN) {
            continue;
        }
        rows.push((left, right));
    }
    if rows.is_empty() {
        return Err(EvalError::KappaUndefined);
    }
    let n = rows.len() as f64;
    let observed = rows.iter().filter(|(l, r)| l == r).count() as f64 / n;

    let mut left_marginal: BTreeMap<&str, f64> = BTreeMap::new();
    let mut right_marginal: BTreeMap<&str, f64> = BTreeMap::new();
    for (l, r) in &rows {
        *left_marginal.entry(l).or_default() += 1.0 / n;
        *right_marginal.entry(r).or_default() += 1.0 / n;
    }
    let expected: f64 = left_marginal
        .iter()
        .map(|(cat, p)| p * right_marginal.get(cat).copied().unwrap_or(0.0))
        .sum();

    if (1.0 - expected).abs() < f64::EPSILON {
        return if (observed - 1.0).abs() < f64::EPSILON {
            Ok(1.0)
        } else {
            Err(EvalError::KappaUndefined)
        };
    }
    Ok((observed - expected) / (1.0 - expected))
}

/// Per-instance contest: a correct where b is not is a win, same
/// correctness is a tie, the rest are losses.
pub fn wins_ties_loses(
    a: &AnswerSet,
    b: &AnswerSet,
    gold: &Gold,
) -> Result<(usize, usize, usize), EvalError> {
    score(a, gold)?;
    score(b, gold)?;
    let mut wins = 0;
    let mut ties = 0;
    let mut loses = 0;
    for (id, want) in gold {
        let a_ok = a.answer(id) == Some(want.as_str());
        let b_ok = b.answer(id) == Some(want.as_str());
        match (a_ok, b_ok) {
            (true, false) => wins += 1,
            (false, true) => loses += 1,
            _ => ties += 1,
        }
    }
    Ok((wins, ties, loses))
}

/// Baseline that answers every test instance with the word's most
/// frequent training sense. Training ties and unseen words fall back to
/// the lexicon's rank-1 sense; words absent from both abstain.
pub fn mfs_baseline(
    train: &[TrainingExample],
    test: &[TrainingExample],
    db: Option<&LexicalDb>,
) -> AnswerSet {
    let mut counts: BTreeMap<(String, Pos), BTreeMap<String, usize>> = BTreeMap::new();
    for ex in train {
        *counts
            .entry((ex.target_lemma.clone(), ex.target_pos))
            .or_default()
            .entry(ex.sense.clone())
            .or_default() += 1;
    }

    let lexicon_rank = |lemma: &str, pos: Pos, sense: &str| -> usize {
        db.and_then(|db| {
            crate::lexkb::SynsetId::parse(sense)
                .and_then(|id| db.sense_rank(lemma, pos, &id))
        })
        .unwrap_or(usize::MAX)
    };

    let mut out = AnswerSet::new("MFS");
    for ex in test {
        let key = (ex.target_lemma.clone(), ex.target_pos);
        let answer = match counts.get(&key) {
            Some(senses) => {
                let best = senses.values().max().copied().unwrap_or(0);
                senses
                    .iter()
                    .filter(|(_, c)| **c == best)
                    .map(|(s, _)| s.clone())
                    .min_by_key(|s| (lexicon_rank(&key.0, key.1, s), s.clone()))
            }
            None => db
                .and_then(|db| db.senses(&ex.target_lemma, ex.target_pos).first().cloned())
                .map(|id| id.to_string()),
        };
        out.insert(ex.id.clone(), answer);
    }
    out
}

/// Reads `ANSWER<TAB>system<TAB>instance_id<TAB>sense_label|-` lines,
/// grouping by system in order of first appearance.
pub fn parse_answer_file(reader: impl BufRead) -> Result<Vec<AnswerSet>, EvalError> {
    let mut order: Vec<String> = Vec::new();
    let mut sets: BTreeMap<String, AnswerSet> = BTreeMap::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 || fields[0] != "ANSWER" {
            return Err(EvalError::Malformed {
                line: lineno,
                msg: "expected ANSWER\\tsystem\\tinstance\\tsense|-".into(),
            });
        }
        let system = fields[1].to_string();
        if !sets.contains_key(&system) {
            order.push(system.clone());
            sets.insert(system.clone(), AnswerSet::new(system.clone()));
        }
        let answer = match fields[3] {
            "-" => None,
            sense => Some(sense.to_string()),
        };
        sets.get_mut(&system).unwrap().insert(fields[2], answer);
    }
    Ok(order.into_iter().map(|s| sets.remove(&s).unwrap()).collect())
}

pub fn write_answer_file(set: &AnswerSet, mut w: impl Write) -> std::io::Result<()> {
    for (id, answer) in &set.answers {
        writeln!(
            w,
            "ANSWER\t{}\t{}\t{}",
            set.system,
            id,
            answer.as_deref().unwrap_or("-")
        )?;
    }
    Ok(())
}

/// Reads a gold file (answer-file format; abstentions are not allowed).
pub fn parse_gold_file(reader: impl BufRead) -> Result<Gold, EvalError> {
    let sets = parse_answer_file(reader)?;
    let mut gold = Gold::new();
    for set in sets {
        for (id, answer) in set.answers {
            match answer {
                Some(sense) => {
                    gold.insert(id, sense);
                }
                None => {
                    return Err(EvalError::Malformed {
                        line: 0,
                        msg: format!("gold standard abstains on instance {id:?}"),
                    })
                }
            }
        }
    }
    Ok(gold)
}

/// Aligned table plus a machine-readable key=value block.
pub fn render_score_report(report: &ScoreReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:>10} {:>10} {:>10}\n",
        "system", "precision", "recall", "coverage"
    ));
    out.push_str(&format!(
        "{:<12} {:>10.4} {:>10.4} {:>10.4}\n\n",
        report.system, report.precision, report.recall, report.coverage
    ));
    out.push_str(&format!("system={}\n", report.system));
    out.push_str(&format!("total={}\n", report.total));
    out.push_str(&format!("attempted={}\n", report.attempted));
    out.push_str(&format!("correct={}\n", report.correct));
    out.push_str(&format!("precision={:.6}\n", report.precision));
    out.push_str(&format!("recall={:.6}\n", report.recall));
    out.push_str(&format!("coverage={:.6}\n", report.coverage));
    out
}

/// Full pairwise comparison block for `compare`.
pub struct Comparison {
    pub a: ScoreReport,
    pub b: ScoreReport,
    pub both_ok: f64,
    pub one_ok: f64,
    pub zero_ok: f64,
    pub optimal: f64,
    pub kappa: Option<f64>,
    pub wins: usize,
    pub ties: usize,
    pub loses: usize,
}

pub fn compare(
    a: &AnswerSet,
    b: &AnswerSet,
    gold: &Gold,
    mode: KappaMode,
) -> Result<Comparison, EvalError> {
    let (both_ok, one_ok, zero_ok) = pair_agreement(a, b, gold)?;
    let (wins, ties, loses) = wins_ties_loses(a, b, gold)?;
    Ok(Comparison {
        a: score(a, gold)?,
        b: score(b, gold)?,
        both_ok,
        one_ok,
        zero_ok,
        optimal: 1.0 - zero_ok,
        kappa: kappa(a, b, mode).ok(),
        wins,
        ties,
        loses,
    })
}

pub fn render_comparison(c: &Comparison) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<12} {:>10} {:>10} {:>10}\n",
        "system", "precision", "recall", "coverage"
    ));
    for r in [&c.a, &c.b] {
        out.push_str(&format!(
            "{:<12} {:>10.4} {:>10.4} {:>10.4}\n",
            r.system, r.precision, r.recall, r.coverage
        ));
    }
    out.push_str(&format!(
        "\n{:<10} {:>8} {:>8} {:>8} {:>8}\n",
        "agreement", "both", "one", "zero", "optimal"
    ));
    out.push_str(&format!(
        "{:<10} {:>8.4} {:>8.4} {:>8.4} {:>8.4}\n",
        "", c.both_ok, c.one_ok, c.zero_ok, c.optimal
    ));
    out.push_str(&format!(
        "\n{:<10} {:>8} {:>8} {:>8}\n",
        "contest", "wins", "ties", "loses"
    ));
    out.push_str(&format!(
        "{:<10} {:>8} {:>8} {:>8}\n\n",
        "", c.wins, c.ties, c.loses
    ));
    out.push_str(&format!("system_a={}\nsystem_b={}\n", c.a.system, c.b.system));
    out.push_str(&format!("precision_a={:.6}\nrecall_a={:.6}\ncoverage_a={:.6}\n",
        c.a.precision, c.a.recall, c.a.coverage));
    out.push_str(&format!("precision_b={:.6}\nrecall_b={:.6}\ncoverage_b={:.6}\n",
        c.b.precision, c.b.recall, c.b.coverage));
    out.push_str(&format!("both_ok={:.6}\none_ok={:.6}\nzero_ok={:.6}\n",
        c.both_ok, c.one_ok, c.zero_ok));
    out.push_str(&format!("optimal_combination={:.6}\n", c.optimal));
    match c.kappa {
        Some(k) => out.push_str(&format!("kappa={k:.6}\n")),
        None => out.push_str("kappa=undefined\n"),
    }
    out.push_str(&format!("wins={}\nties={}\nloses={}\n", c.wins, c.ties, c.loses));
    out
}
