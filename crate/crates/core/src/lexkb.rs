//! Lexical knowledge base: synsets, IS-A taxonomy, glosses, domain
//! labels, and the lemma index.
//!
//! The on-disk form is a line-oriented, tab-separated text format so
//! that small hand-built taxonomies can live in the repository and a
//! real WordNet install can be exported by `scripts/import_wordnet.py`:
//!
//! ```text
//! SYNSET<TAB>pos<TAB>key<TAB>lemma1,lemma2,...<TAB>gloss text
//! REL<TAB>hypernym<TAB>src_pos:src_key<TAB>dst_pos:dst_key
//! DOMAIN<TAB>pos:key<TAB>label
//! INDEX<TAB>lemma<TAB>pos<TAB>key1,key2,...
//! ```
//!
//! `INDEX` keys are in sense-frequency order (rank 1 first). `REL`,
//! `DOMAIN` and `INDEX` may forward-reference; validation runs after the
//! whole stream is read. Lines starting with `#` are comments.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use crate::config::{tokenize, StopList};

/// Part-of-speech tag: one of `N`, `V`, `A`, `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl Pos {
    pub fn tag(self) -> char {
        match self {
            Pos::Noun => 'N',
            Pos::Verb => 'V',
            Pos::Adj => 'A',
            Pos::Adv => 'R',
        }
    }

    pub fn from_tag(tag: &str) -> Option<Pos> {
        match tag {
            "N" => Some(Pos::Noun),
            "V" => Some(Pos::Verb),
            "A" => Some(Pos::Adj),
            "R" => Some(Pos::Adv),
            _ => None,
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

/// Unique synset handle: `(pos, key)`, printed as `pos:key`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SynsetId {
    pub pos: Pos,
    pub key: String,
}

impl SynsetId {
    pub fn new(pos: Pos, key: impl Into<String>) -> Self {
        SynsetId {
            pos,
            key: key.into(),
        }
    }

    pub fn parse(s: &str) -> Option<SynsetId> {
        let (pos, key) = s.split_once(':')?;
        if key.is_empty() {
            return None;
        }
        Some(SynsetId::new(Pos::from_tag(pos)?, key))
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.pos, self.key)
    }
}

/// One lexical concept: lemmas, gloss, IS-A links, domain labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synset {
    pub id: SynsetId,
    pub lemmas: Vec<String>,
    pub gloss: String,
    pub hypernyms: Vec<SynsetId>,
    pub hyponyms: Vec<SynsetId>,
    pub domains: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: reference to unknown synset {id}")]
    Dangling { line: usize, id: SynsetId },
    #[error("hypernym cycle: {}", path_string(.0))]
    Cycle(Vec<SynsetId>),
    #[error("unknown synset {0}")]
    UnknownSynset(SynsetId),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn path_string(path: &[SynsetId]) -> String {
    path.iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}

/// Immutable, fully indexed lexicon. Safe to share across threads once
/// loaded.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LexicalDb {
    synsets: BTreeMap<SynsetId, Synset>,
    index: BTreeMap<(String, Pos), Vec<SynsetId>>,
}

impl LexicalDb {
    /// Reads and validates one lexicon stream. Relation symmetry is
    /// completed automatically (a hypernym edge implies the reverse
    /// hyponym edge); the hypernym relation must be acyclic; every
    /// referenced id must resolve.
    pub fn load(reader: impl BufRead) -> Result<LexicalDb, LexiconError> {
        Loader::default().read(reader)
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn synset(&self, id: &SynsetId) -> Option<&Synset> {
        self.synsets.get(id)
    }

    pub fn require(&self, id: &SynsetId) -> Result<&Synset, LexiconError> {
        self.synsets
            .get(id)
            .ok_or_else(|| LexiconError::UnknownSynset(id.clone()))
    }

    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    /// Frequency-ranked senses of `(lemma, pos)`; empty when absent.
    pub fn senses(&self, lemma: &str, pos: Pos) -> &[SynsetId] {
        self.index
            .get(&(lemma.to_lowercase(), pos))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Rank of `sense` in the frequency-ordered sense list of `(lemma,
    /// pos)`, 1-based.
    pub fn sense_rank(&self, lemma: &str, pos: Pos, sense: &SynsetId) -> Option<usize> {
        self.senses(lemma, pos).iter().position(|s| s == sense).map(|i| i + 1)
    }

    /// All hypernym paths from `s` (inclusive) up to a top synset; one
    /// chain per distinct root path, following declaration order.
    pub fn hypernym_chains(&self, s: &SynsetId) -> Result<Vec<Vec<SynsetId>>, LexiconError> {
        let synset = self.require(s)?;
        if synset.hypernyms.is_empty() {
            return Ok(vec![vec![s.clone()]]);
        }
        let mut chains = Vec::new();
        for hyper in &synset.hypernyms {
            for mut chain in self.hypernym_chains(hyper)? {
                chain.insert(0, s.clone());
                chains.push(chain);
            }
        }
        Ok(chains)
    }

    /// Depth-annotated preorder traversal of the subhierarchy under `s`
    /// (depth 0 is `s` itself). Each synset is visited once, at its
    /// first preorder encounter; `max_depth` of `None` is unlimited.
    pub fn hyponym_descendants(
        &self,
        s: &SynsetId,
        max_depth: Option<usize>,
    ) -> Result<Vec<(SynsetId, usize)>, LexiconError> {
        self.require(s)?;
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack = vec![(s.clone(), 0usize)];
        while let Some((id, depth)) = stack.pop() {
            if !seen.insert(id.clone()) {
                continue;
            }
            out.push((id.clone(), depth));
            if max_depth.is_some_and(|m| depth >= m) {
                continue;
            }
            let synset = self.require(&id)?;
            // reversed so the declared hyponym order pops first
            for child in synset.hyponyms.iter().rev() {
                stack.push((child.clone(), depth + 1));
            }
        }
        Ok(out)
    }

    /// Content-word tokens of the gloss, example sentences included.
    pub fn gloss_tokens(&self, s: &SynsetId, stops: &StopList) -> Result<Vec<String>, LexiconError> {
        Ok(tokenize(&self.require(s)?.gloss, stops))
    }

    /// Writes the lexicon back in canonical order: SYNSET records sorted
    /// by id, then REL/DOMAIN/INDEX. Reloading yields an identical db.
    pub fn serialize(&self, mut w: impl Write) -> std::io::Result<()> {
        for s in self.synsets.values() {
            writeln!(
                w,
                "SYNSET\t{}\t{}\t{}\t{}",
                s.id.pos,
                s.id.key,
                s.lemmas.join(","),
                s.gloss
            )?;
        }
        for s in self.synsets.values() {
            for hyper in &s.hypernyms {
                writeln!(w, "REL\thypernym\t{}\t{}", s.id, hyper)?;
            }
        }
        for s in self.synsets.values() {
            for label in &s.domains {
                writeln!(w, "DOMAIN\t{}\t{}", s.id, label)?;
            }
        }
        for ((lemma, pos), ids) in &self.index {
            let keys: Vec<&str> = ids.iter().map(|id| id.key.as_str()).collect();
            writeln!(w, "INDEX\t{}\t{}\t{}", lemma, pos, keys.join(","))?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Loader {
    synsets: BTreeMap<SynsetId, Synset>,
    declaration_order: Vec<SynsetId>,
    edges: Vec<(usize, SynsetId, SynsetId)>,
    domain_records: Vec<(usize, SynsetId, String)>,
    index_records: Vec<(usize, String, Pos, Vec<SynsetId>)>,
}

impl Loader {
    fn read(mut self, reader: impl BufRead) -> Result<LexicalDb, LexiconError> {
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields[0] {
                "SYNSET" => self.synset_record(lineno, &fields)?,
                "REL" => self.rel_record(lineno, &fields)?,
                "DOMAIN" => self.domain_record(lineno, &fields)?,
                "INDEX" => self.index_record(lineno, &fields)?,
                other => {
                    return Err(malformed(lineno, format!("unknown record type {other:?}")))
                }
            }
        }
        self.link()
    }

    fn synset_record(&mut self, lineno: usize, fields: &[&str]) -> Result<(), LexiconError> {
        if fields.len() < 4 || fields.len() > 5 {
            return Err(malformed(lineno, "SYNSET needs pos, key, lemmas, gloss".into()));
        }
        let id = parse_id_parts(lineno, fields[1], fields[2])?;
        let lemmas: Vec<String> = fields[3]
            .split(',')
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty())
            .collect();
        if lemmas.is_empty() {
            return Err(malformed(lineno, format!("synset {id} has no lemmas")));
        }
        let gloss = fields.get(4).unwrap_or(&"").to_string();
        if self.synsets.contains_key(&id) {
            return Err(malformed(lineno, format!("duplicate synset {id}")));
        }
        self.declaration_order.push(id.clone());
        self.synsets.insert(
            id.clone(),
            Synset {
                id,
                lemmas,
                gloss,
                hypernyms: Vec::new(),
                hyponyms: Vec::new(),
                domains: Vec::new(),
            },
        );
        Ok(())
    }

    fn rel_record(&mut self, lineno: usize, fields: &[&str]) -> Result<(), LexiconError> {
        if fields.len() != 4 {
            return Err(malformed(lineno, "REL needs relation, src, dst".into()));
        }
        if fields[1] != "hypernym" {
            return Err(malformed(
                lineno,
                format!("unknown relation {:?} (only hypernym is supported)", fields[1]),
            ));
        }
        let src = parse_id(lineno, fields[2])?;
        let dst = parse_id(lineno, fields[3])?;
        self.edges.push((lineno, src, dst));
        Ok(())
    }

    fn domain_record(&mut self, lineno: usize, fields: &[&str]) -> Result<(), LexiconError> {
        if fields.len() != 3 || fields[2].is_empty() {
            return Err(malformed(lineno, "DOMAIN needs pos:key and a label".into()));
        }
        let id = parse_id(lineno, fields[1])?;
        self.domain_records.push((lineno, id, fields[2].to_string()));
        Ok(())
    }

    fn index_record(&mut self, lineno: usize, fields: &[&str]) -> Result<(), LexiconError> {
        if fields.len() != 4 {
            return Err(malformed(lineno, "INDEX needs lemma, pos, keys".into()));
        }
        let lemma = fields[1].trim().to_lowercase();
        if lemma.is_empty() {
            return Err(malformed(lineno, "INDEX with empty lemma".into()));
        }
        let pos = parse_pos(lineno, fields[2])?;
        let ids: Vec<SynsetId> = fields[3]
            .split(',')
            .map(str::trim)
            .filter(|k| !k.is_empty())
            .map(|k| SynsetId::new(pos, k))
            .collect();
        if ids.is_empty() {
            return Err(malformed(lineno, format!("INDEX {lemma} lists no senses")));
        }
        if self.index_records.iter().any(|(_, l, p, _)| *l == lemma && *p == pos) {
            return Err(malformed(lineno, format!("duplicate INDEX for {lemma}/{pos}")));
        }
        self.index_records.push((lineno, lemma, pos, ids));
        Ok(())
    }

    fn link(mut self) -> Result<LexicalDb, LexiconError> {
        for (lineno, src, dst) in &self.edges {
            for id in [src, dst] {
                if !self.synsets.contains_key(id) {
                    return Err(LexiconError::Dangling {
                        line: *lineno,
                        id: id.clone(),
                    });
                }
            }
        }
        let edges = std::mem::take(&mut self.edges);
        for (_, src, dst) in edges {
            let hypers = &mut self.synsets.get_mut(&src).unwrap().hypernyms;
            if !hypers.contains(&dst) {
                hypers.push(dst.clone());
            }
            let hypos = &mut self.synsets.get_mut(&dst).unwrap().hyponyms;
            if !hypos.contains(&src) {
                hypos.push(src);
            }
        }
        // Relation lists are kept in sorted order so traversal order is a
        // property of the taxonomy, not of REL declaration order.
        for synset in self.synsets.values_mut() {
            synset.hypernyms.sort();
            synset.hyponyms.sort();
        }

        for (lineno, id, label) in std::mem::take(&mut self.domain_records) {
            let synset = self
                .synsets
                .get_mut(&id)
                .ok_or(LexiconError::Dangling { line: lineno, id })?;
            if !synset.domains.contains(&label) {
                synset.domains.push(label);
            }
        }

        let mut index: BTreeMap<(String, Pos), Vec<SynsetId>> = BTreeMap::new();
        for (lineno, lemma, pos, ids) in std::mem::take(&mut self.index_records) {
            for id in &ids {
                if !self.synsets.contains_key(id) {
                    return Err(LexiconError::Dangling {
                        line: lineno,
                        id: id.clone(),
                    });
                }
            }
            index.insert((lemma, pos), ids);
        }
        // Every synset lemma must be reachable through the index; senses
        // not covered by an INDEX record rank after the indexed ones in
        // declaration order.
        for id in &self.declaration_order {
            let synset = &self.synsets[id];
            for lemma in &synset.lemmas {
                let entry = index.entry((lemma.clone(), id.pos)).or_default();
                if !entry.contains(id) {
                    entry.push(id.clone());
                }
            }
        }

        self.check_acyclic()?;
        Ok(LexicalDb {
            synsets: self.synsets,
            index,
        })
    }

    fn check_acyclic(&self) -> Result<(), LexiconError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        let mut marks: HashMap<&SynsetId, Mark> = HashMap::new();
        for start in self.synsets.keys() {
            if marks.contains_key(start) {
                continue;
            }
            // iterative DFS over hypernym edges, tracking the open path
            let mut stack = vec![(start, false)];
            let mut path: Vec<&SynsetId> = Vec::new();
            while let Some((id, expanded)) = stack.pop() {
                if expanded {
                    marks.insert(id, Mark::Done);
                    path.pop();
                    continue;
                }
                match marks.get(id) {
                    Some(Mark::Done) => continue,
                    Some(Mark::Open) => {
                        let from = path.iter().position(|p| *p == id).unwrap_or(0);
                        let mut cycle: Vec<SynsetId> =
                            path[from..].iter().map(|p| (*p).clone()).collect();
                        cycle.push(id.clone());
                        return Err(LexiconError::Cycle(cycle));
                    }
                    None => {}
                }
                marks.insert(id, Mark::Open);
                path.push(id);
                stack.push((id, true));
                for hyper in &self.synsets[id].hypernyms {
                    stack.push((hyper, false));
                }
            }
        }
        Ok(())
    }
}

fn malformed(line: usize, msg: String) -> LexiconError {
    LexiconError::Malformed { line, msg }
}

fn parse_pos(lineno: usize, tag: &str) -> Result<Pos, LexiconError> {
    Pos::from_tag(tag).ok_or_else(|| malformed(lineno, format!("bad pos tag {tag:?}")))
}

fn parse_id(lineno: usize, s: &str) -> Result<SynsetId, LexiconError> {
    SynsetId::parse(s).ok_or_else(|| malformed(lineno, format!("bad synset id {s:?}")))
}

fn parse_id_parts(lineno: usize, pos: &str, key: &str) -> Result<SynsetId, LexiconError> {
    if key.is_empty() {
        return Err(malformed(lineno, "empty synset key".into()));
    }
    Ok(SynsetId::new(parse_pos(lineno, pos)?, key))
}

/// Set of all synsets on any hypernym chain of `s`, `s` included.
/// Membership is exactly the "is subsumed by" test used by the
/// specification-marks machinery.
pub fn ancestors(db: &LexicalDb, s: &SynsetId) -> Result<BTreeSet<SynsetId>, LexiconError> {
    let mut out = BTreeSet::new();
    for chain in db.hypernym_chains(s)? {
        out.extend(chain);
    }
    Ok(out)
}
