//! Corpus and classifier file formats.
//!
//! Corpus (UTF-8, tab-separated):
//!
//! ```text
//! EXAMPLE<TAB>id<TAB>target_lemma<TAB>pos<TAB>sense_label<TAB>target_index
//! TOKEN<TAB>index<TAB>surface<TAB>lemma<TAB>pos_tag<TAB>dep_head|-<TAB>dep_rel|-<TAB>mw:0|1
//! END
//! ```
//!
//! Classifier: a `MEMODEL 1` header (word, selection, senses MFS-first,
//! priors, training metadata) followed by one `FEAT` line per feature,
//! alphas at 17 significant digits so trained models diff cleanly.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use crate::lexkb::Pos;

use super::{
    AnnotatedToken, Classifier, Feature, FeatureSelection, FeatureTest, Slot, TrainingExample,
    TrainingMeta,
};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn malformed(line: usize, msg: impl Into<String>) -> CorpusError {
    CorpusError::Malformed {
        line,
        msg: msg.into(),
    }
}

/// Reads a whole corpus stream, validating token indices, the target
/// position, and dependency references.
pub fn parse_corpus(reader: impl BufRead) -> Result<Vec<TrainingExample>, CorpusError> {
    let mut examples = Vec::new();
    let mut current: Option<(usize, TrainingExample)> = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields[0] {
            "EXAMPLE" => {
                if current.is_some() {
                    return Err(malformed(lineno, "EXAMPLE before previous END"));
                }
                if fields.len() != 6 {
                    return Err(malformed(
                        lineno,
                        "EXAMPLE needs id, lemma, pos, sense, target_index",
                    ));
                }
                let pos = Pos::from_tag(fields[3])
                    .ok_or_else(|| malformed(lineno, format!("bad pos {:?}", fields[3])))?;
                let target_index: usize = fields[5]
                    .parse()
                    .map_err(|e| malformed(lineno, format!("bad target index: {e}")))?;
                current = Some((
                    lineno,
                    TrainingExample {
                        id: fields[1].to_string(),
                        target_lemma: fields[2].to_lowercase(),
                        target_pos: pos,
                        sense: fields[4].to_string(),
                        tokens: Vec::new(),
                        target_index,
                    },
                ));
            }
            "TOKEN" => {
                let (_, ex) = current
                    .as_mut()
                    .ok_or_else(|| malformed(lineno, "TOKEN outside EXAMPLE"))?;
                if fields.len() != 8 {
                    return Err(malformed(
                        lineno,
                        "TOKEN needs index, surface, lemma, pos, dep_head, dep_rel, mw",
                    ));
                }
                let index: usize = fields[1]
                    .parse()
                    .map_err(|e| malformed(lineno, format!("bad token index: {e}")))?;
                if index != ex.tokens.len() {
                    return Err(malformed(
                        lineno,
                        format!("token index {index} out of order (expected {})", ex.tokens.len()),
                    ));
                }
                let dep_head = match fields[5] {
                    "-" => None,
                    s => Some(
                        s.parse::<usize>()
                            .map_err(|e| malformed(lineno, format!("bad dep head: {e}")))?,
                    ),
                };
                let dep_rel = match fields[6] {
                    "-" => None,
                    s => Some(s.to_string()),
                };
                let multiword = match fields[7] {
                    "mw:0" => false,
                    "mw:1" => true,
                    other => return Err(malformed(lineno, format!("bad mw flag {other:?}"))),
                };
                ex.tokens.push(AnnotatedToken {
                    surface: fields[2].to_string(),
                    lemma: fields[3].to_lowercase(),
                    pos_tag: fields[4].to_string(),
                    dep_head,
                    dep_rel,
                    multiword,
                });
            }
            "END" => {
                let (start, ex) = current
                    .take()
                    .ok_or_else(|| malformed(lineno, "END without EXAMPLE"))?;
                validate_example(start, &ex)?;
                examples.push(ex);
            }
            other => return Err(malformed(lineno, format!("unknown record {other:?}"))),
        }
    }
    if current.is_some() {
        return Err(malformed(0, "unterminated EXAMPLE (missing END)"));
    }
    Ok(examples)
}

fn validate_example(line: usize, ex: &TrainingExample) -> Result<(), CorpusError> {
    if ex.tokens.is_empty() {
        return Err(malformed(line, format!("example {} has no tokens", ex.id)));
    }
    if ex.target_index >= ex.tokens.len() {
        return Err(malformed(
            line,
            format!("example {}: target index {} out of range", ex.id, ex.target_index),
        ));
    }
    let target = &ex.tokens[ex.target_index];
    if target.lemma != ex.target_lemma {
        return Err(malformed(
            line,
            format!(
                "example {}: target token lemma {:?} != {:?}",
                ex.id, target.lemma, ex.target_lemma
            ),
        ));
    }
    for (i, tok) in ex.tokens.iter().enumerate() {
        if let Some(head) = tok.dep_head {
            if head >= ex.tokens.len() || head == i {
                return Err(malformed(
                    line,
                    format!("example {}: token {i} has bad dep head {head}", ex.id),
                ));
            }
        }
    }
    Ok(())
}

pub fn write_corpus(
    examples: &[TrainingExample],
    mut w: impl Write,
) -> std::io::Result<()> {
    for ex in examples {
        writeln!(
            w,
            "EXAMPLE\t{}\t{}\t{}\t{}\t{}",
            ex.id,
            ex.target_lemma,
            ex.target_pos.tag(),
            ex.sense,
            ex.target_index
        )?;
        for (i, tok) in ex.tokens.iter().enumerate() {
            writeln!(
                w,
                "TOKEN\t{}\t{}\t{}\t{}\t{}\t{}\tmw:{}",
                i,
                tok.surface,
                tok.lemma,
                tok.pos_tag,
                tok.dep_head.map_or("-".to_string(), |h| h.to_string()),
                tok.dep_rel.as_deref().unwrap_or("-"),
                tok.multiword as u8,
            )?;
        }
        writeln!(w, "END")?;
    }
    Ok(())
}

fn render_slot(slot: &Slot) -> String {
    match slot {
        Slot::TargetForm => "0".into(),
        Slot::Word(p) => format!("s[{p:+}]"),
        Slot::PosTag(p) => format!("p[{p:+}]"),
        Slot::LemmaPair(a, b) => format!("b[{a:+},{b:+}]"),
        Slot::WordPair(a, b) => format!("c[{a:+},{b:+}]"),
        Slot::Keyword(m) => format!("k{m}"),
        Slot::Relation => "r".into(),
        Slot::Head => "d".into(),
        Slot::Multiword => "m".into(),
        Slot::ContentLemma(p) => format!("L[{p:+}]"),
        Slot::ContentWord(p) => format!("W[{p:+}]"),
        Slot::WordBag(p) => format!("S[{p:+}]"),
        Slot::PosBag(p) => format!("P[{p:+}]"),
        Slot::LemmaPairBag(a, b) => format!("B[{a:+},{b:+}]"),
        Slot::WordPairBag(a, b) => format!("C[{a:+},{b:+}]"),
        Slot::HeadBag => "D".into(),
        Slot::MultiwordBag => "M".into(),
        Slot::KeywordBag(m) => format!("K{m}"),
        Slot::DomainAt(p) => format!("dom[{p:+}]"),
        Slot::ContextDomain => "ctxdom".into(),
    }
}

fn parse_slot(text: &str) -> Option<Slot> {
    let positions = |inner: &str| -> Option<(i8, i8)> {
        let (a, b) = inner.split_once(',')?;
        Some((a.parse().ok()?, b.parse().ok()?))
    };
    if let Some(rest) = text.strip_prefix("dom[") {
        return Some(Slot::DomainAt(rest.strip_suffix(']')?.parse().ok()?));
    }
    match text {
        "0" => return Some(Slot::TargetForm),
        "r" => return Some(Slot::Relation),
        "d" => return Some(Slot::Head),
        "m" => return Some(Slot::Multiword),
        "D" => return Some(Slot::HeadBag),
        "M" => return Some(Slot::MultiwordBag),
        "ctxdom" => return Some(Slot::ContextDomain),
        _ => {}
    }
    if let Some(rest) = text.strip_prefix('k') {
        return Some(Slot::Keyword(rest.parse().ok()?));
    }
    if let Some(rest) = text.strip_prefix('K') {
        return Some(Slot::KeywordBag(rest.parse().ok()?));
    }
    let (kind, inner) = text.split_once('[')?;
    let inner = inner.strip_suffix(']')?;
    Some(match kind {
        "s" => Slot::Word(inner.parse().ok()?),
        "p" => Slot::PosTag(inner.parse().ok()?),
        "L" => Slot::ContentLemma(inner.parse().ok()?),
        "W" => Slot::ContentWord(inner.parse().ok()?),
        "S" => Slot::WordBag(inner.parse().ok()?),
        "P" => Slot::PosBag(inner.parse().ok()?),
        "b" => {
            let (a, b) = positions(inner)?;
            Slot::LemmaPair(a, b)
        }
        "c" => {
            let (a, b) = positions(inner)?;
            Slot::WordPair(a, b)
        }
        "B" => {
            let (a, b) = positions(inner)?;
            Slot::LemmaPairBag(a, b)
        }
        "C" => {
            let (a, b) = positions(inner)?;
            Slot::WordPairBag(a, b)
        }
        _ => return None,
    })
}

/// Bag values are `;`-separated inside braces; collocation values keep
/// their internal `|`. Token values containing `;` or braces would not
/// survive; corpus tokens are whitespace-delimited so this does not
/// arise in practice.
fn render_predicate(f: &Feature) -> String {
    let slot = render_slot(&f.slot);
    match &f.test {
        FeatureTest::Value(v) => format!("{slot}={v}"),
        FeatureTest::Bag(bag) => {
            let joined: Vec<&str> = bag.iter().map(String::as_str).collect();
            format!("{slot}={{{}}}", joined.join(";"))
        }
    }
}

/// Writes the classifier in the versioned text format.
pub fn write_classifier(clf: &Classifier, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "MEMODEL 1")?;
    writeln!(w, "WORD\t{}\t{}", clf.word, clf.pos.tag())?;
    writeln!(w, "SELECTION\t{}", clf.selection.render())?;
    writeln!(w, "SENSES\t{}", clf.senses.join("\t"))?;
    let priors: Vec<String> = clf.priors.iter().map(|p| format!("{p:.16e}")).collect();
    writeln!(w, "PRIORS\t{}", priors.join("\t"))?;
    let mut meta = format!(
        "META\texamples={}\titerations={}\tconverged={}\tfinal_gap={:.16e}\tdegenerate={}",
        clf.meta.examples,
        clf.meta.iterations,
        clf.meta.converged as u8,
        clf.meta.final_gap,
        clf.meta.degenerate as u8,
    );
    if let Some(cv) = clf.meta.cv_precision {
        meta.push_str(&format!("\tcv_precision={cv:.16e}"));
    }
    writeln!(w, "{meta}")?;
    for f in &clf.features {
        writeln!(
            w,
            "FEAT\t{}\t{}\t{:.16e}",
            render_predicate(f),
            clf.senses[f.sense],
            f.alpha
        )?;
    }
    Ok(())
}

/// Reads a classifier written by [`write_classifier`]. The training
/// log-likelihood trace is not persisted.
pub fn read_classifier(reader: impl BufRead) -> Result<Classifier, CorpusError> {
    let mut lines = reader.lines().enumerate();
    let mut next = || -> Result<Option<(usize, String)>, CorpusError> {
        for (n, line) in lines.by_ref() {
            let line = line?;
            if !line.trim().is_empty() && !line.starts_with('#') {
                return Ok(Some((n + 1, line)));
            }
        }
        Ok(None)
    };

    let (n, header) = next()?.ok_or_else(|| malformed(1, "empty model file"))?;
    if header != "MEMODEL 1" {
        return Err(malformed(n, format!("bad header {header:?}")));
    }

    let mut word = None;
    let mut selection = FeatureSelection::default();
    let mut senses: Vec<String> = Vec::new();
    let mut priors: Vec<f64> = Vec::new();
    let mut meta = TrainingMeta::default();
    let mut features: Vec<Feature> = Vec::new();

    while let Some((lineno, line)) = next()? {
        let fields: Vec<&str> = line.split('\t').collect();
        match fields[0] {
            "WORD" => {
                if fields.len() != 3 {
                    return Err(malformed(lineno, "WORD needs lemma and pos"));
                }
                let pos = Pos::from_tag(fields[2])
                    .ok_or_else(|| malformed(lineno, format!("bad pos {:?}", fields[2])))?;
                word = Some((fields[1].to_string(), pos));
            }
            "SELECTION" => {
                let code = fields.get(1).unwrap_or(&"");
                selection = FeatureSelection::parse(code)
                    .map_err(|e| malformed(lineno, format!("bad selection: {e}")))?;
            }
            "SENSES" => {
                senses = fields[1..].iter().map(|s| s.to_string()).collect();
                if senses.is_empty() {
                    return Err(malformed(lineno, "SENSES lists nothing"));
                }
            }
            "PRIORS" => {
                priors = fields[1..]
                    .iter()
                    .map(|s| s.parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| malformed(lineno, format!("bad prior: {e}")))?;
            }
            "META" => {
                for item in &fields[1..] {
                    let (key, value) = item
                        .split_once('=')
                        .ok_or_else(|| malformed(lineno, format!("bad META item {item:?}")))?;
                    let bad = |e: String| malformed(lineno, format!("bad META {key}: {e}"));
                    match key {
                        "examples" => meta.examples = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                        "iterations" => meta.iterations = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                        "converged" => meta.converged = value == "1",
                        "degenerate" => meta.degenerate = value == "1",
                        "final_gap" => meta.final_gap = value.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
                        "cv_precision" => {
                            meta.cv_precision =
                                Some(value.parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?)
                        }
                        _ => return Err(malformed(lineno, format!("unknown META key {key:?}"))),
                    }
                }
            }
            "FEAT" => {
                if fields.len() != 4 {
                    return Err(malformed(lineno, "FEAT needs predicate, sense, alpha"));
                }
                let (slot_text, value_text) = fields[1]
                    .split_once('=')
                    .ok_or_else(|| malformed(lineno, format!("bad predicate {:?}", fields[1])))?;
                let slot = parse_slot(slot_text)
                    .ok_or_else(|| malformed(lineno, format!("bad slot {slot_text:?}")))?;
                let test = if value_text.starts_with('{') && value_text.ends_with('}') {
                    let inner = &value_text[1..value_text.len() - 1];
                    let bag: BTreeSet<String> =
                        inner.split(';').map(|s| s.to_string()).collect();
                    FeatureTest::Bag(bag)
                } else {
                    FeatureTest::Value(value_text.to_string())
                };
                let sense = senses
                    .iter()
                    .position(|s| s == fields[2])
                    .ok_or_else(|| malformed(lineno, format!("unknown sense {:?}", fields[2])))?;
                let alpha: f64 = fields[3]
                    .parse()
                    .map_err(|e| malformed(lineno, format!("bad alpha: {e}")))?;
                features.push(Feature {
                    slot,
                    test,
                    sense,
                    alpha,
                });
            }
            other => return Err(malformed(lineno, format!("unknown record {other:?}"))),
        }
    }

    let (word, pos) = word.ok_or_else(|| malformed(0, "missing WORD record"))?;
    if senses.is_empty() {
        return Err(malformed(0, "missing SENSES record"));
    }
    if priors.len() != senses.len() {
        return Err(malformed(0, "PRIORS length does not match SENSES"));
    }
    Ok(Classifier {
        word,
        pos,
        senses,
        priors,
        features,
        selection,
        meta,
    })
}
