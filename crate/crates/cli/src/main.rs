//! Batch driver wiring the disambiguation library: lexicon validation,
//! domain-lexicon builds, knowledge-based and classifier runs, the
//! hybrid schemes, and scoring.

mod config;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use wsd_core::config::{DomainParams, StopList, TopK, TrainParams};
use wsd_core::domains::{self, DomainLexicon};
use wsd_core::eval::{self, AnswerSet, KappaMode};
use wsd_core::hybrid;
use wsd_core::lexkb::{LexicalDb, Pos};
use wsd_core::maxent::{
    self, Classifier, FeatureSelection, MaxentError, SelectMode, TrainingExample,
};
use wsd_core::specmarks::{self, Context, Heuristic, HeuristicEnv, Outcome, SenseAssignment};

use config::Settings;

/// Error carrying the process exit code: 1 usage, 2 input format,
/// 3 algorithmic precondition.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
    fn input(message: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
    fn algorithm(message: impl Into<String>) -> CliError {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<wsd_core::lexkb::LexiconError> for CliError {
    fn from(e: wsd_core::lexkb::LexiconError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<maxent::CorpusError> for CliError {
    fn from(e: maxent::CorpusError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<eval::EvalError> for CliError {
    fn from(e: eval::EvalError) -> Self {
        match e {
            eval::EvalError::KappaUndefined => CliError::algorithm(e.to_string()),
            other => CliError::input(other.to_string()),
        }
    }
}

impl From<MaxentError> for CliError {
    fn from(e: MaxentError) -> Self {
        match e {
            MaxentError::UnknownCode { .. }
            | MaxentError::MissingThreshold { .. }
            | MaxentError::NoCandidates
            | MaxentError::TooFewFolds => CliError::usage(e.to_string()),
            MaxentError::NoExamples
            | MaxentError::MixedWords(..)
            | MaxentError::WordMismatch { .. }
            | MaxentError::NoSenseSurvives { .. } => CliError::algorithm(e.to_string()),
        }
    }
}

impl From<wsd_core::specmarks::SpecmarksError> for CliError {
    fn from(e: wsd_core::specmarks::SpecmarksError) -> Self {
        CliError::algorithm(e.to_string())
    }
}

impl From<hybrid::HybridError> for CliError {
    fn from(e: hybrid::HybridError) -> Self {
        CliError::algorithm(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "wsd", version, about = "Word-sense disambiguation toolkit")]
struct Cli {
    /// Flat key=value configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every randomized step (fold shuffling).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for per-instance runs (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output path (defaults to stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate lexicon files, reporting any defect.
    ValidateLexicon { paths: Vec<PathBuf> },
    /// Disambiguate a corpus with specification marks, the cascade, or
    /// heuristic voting.
    Sm(SmArgs),
    /// Build the relevant-domains lexicon from domain-labeled glosses.
    DomainsBuild(DomainsArgs),
    /// Train, apply, cross-validate, or select features for the
    /// per-word classifiers.
    Me(MeArgs),
    /// Combination schemes joining the two methods.
    Hybrid(HybridArgs),
    /// Score an answer file against a gold standard.
    Score(ScoreArgs),
    /// Compare two answer files against a gold standard.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SmArgs {
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// sm | cascade | vote
    #[arg(long)]
    mode: Option<String>,
    /// Comma-separated heuristic order for cascade/vote.
    #[arg(long)]
    order: Option<String>,
    /// fifteen | whole
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    domain_lexicon: Option<PathBuf>,
    #[arg(long)]
    stoplist: Option<PathBuf>,
}

#[derive(Args)]
struct DomainsArgs {
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    stoplist: Option<PathBuf>,
}

#[derive(Args)]
struct MeArgs {
    #[command(subcommand)]
    command: MeCommand,
}

#[derive(Subcommand)]
enum MeCommand {
    /// Train one classifier per word and write model files.
    Train {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        selection: Option<String>,
        #[arg(long)]
        stoplist: Option<PathBuf>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Classify a corpus with previously trained models.
    Classify {
        #[arg(long)]
        models: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        stoplist: Option<PathBuf>,
    },
    /// Stratified cross-validation per word.
    Cv {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        selection: Option<String>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        stoplist: Option<PathBuf>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Pick the best feature selection per word or per POS.
    Select {
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Comma-separated candidate selection strings.
        #[arg(long)]
        candidates: Option<String>,
        /// word | pos
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        stoplist: Option<PathBuf>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Args)]
struct HybridArgs {
    #[command(subcommand)]
    command: HybridCommand,
}

#[derive(Subcommand)]
enum HybridCommand {
    /// Pin confidently classified context nouns, then run the
    /// specification-marks search.
    Prelabel {
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        train_corpus: Option<PathBuf>,
        #[arg(long)]
        test_corpus: Option<PathBuf>,
        #[arg(long)]
        selection: Option<String>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        stoplist: Option<PathBuf>,
    },
    /// Train and classify with domain-label features added.
    Domainfeat {
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        domain_lexicon: Option<PathBuf>,
        #[arg(long)]
        train_corpus: Option<PathBuf>,
        #[arg(long)]
        test_corpus: Option<PathBuf>,
        #[arg(long)]
        selection: Option<String>,
        #[arg(long)]
        stoplist: Option<PathBuf>,
    },
    /// Majority vote of the three classifier systems plus the
    /// knowledge-based method.
    Vmesm {
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        train_corpus: Option<PathBuf>,
        #[arg(long)]
        test_corpus: Option<PathBuf>,
        #[arg(long)]
        candidates: Option<String>,
        #[arg(long)]
        fixed_selection: Option<String>,
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        stoplist: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    answers: Option<PathBuf>,
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Restrict to one system from the answer file.
    #[arg(long)]
    system: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    answers_a: Option<PathBuf>,
    #[arg(long)]
    answers_b: Option<PathBuf>,
    #[arg(long)]
    gold: Option<PathBuf>,
    /// keep | drop (abstentions in the kappa computation)
    #[arg(long)]
    kappa_mode: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap treats --help/--version as errors with success status
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wsd: {e}");
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::load(cli.config.as_deref())?;
    let seed = settings.parse_or(cli.seed, "seed", 0u64)?;
    let jobs = settings.parse_or(cli.jobs, "jobs", 0usize)?;
    if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::usage(format!("--jobs: {e}")))?;
    }
    let out = settings.path(cli.out.as_ref(), "out");

    match cli.command {
        Command::ValidateLexicon { paths } => cmd_validate_lexicon(&paths, out.as_deref()),
        Command::Sm(args) => cmd_sm(&settings, args, out.as_deref()),
        Command::DomainsBuild(args) => cmd_domains_build(&settings, args, out.as_deref()),
        Command::Me(args) => cmd_me(&settings, args, seed, out.as_deref()),
        Command::Hybrid(args) => cmd_hybrid(&settings, args, seed, out.as_deref()),
        Command::Score(args) => cmd_score(&settings, args, out.as_deref()),
        Command::Compare(args) => cmd_compare(&settings, args, out.as_deref()),
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, content)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        }
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
        }
    }
    Ok(())
}

fn load_lexicon(path: &Path) -> Result<LexicalDb, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    LexicalDb::load(BufReader::new(file))
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_corpus(path: &Path) -> Result<Vec<TrainingExample>, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    maxent::parse_corpus(BufReader::new(file))
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_stops(settings: &Settings, flag: Option<&PathBuf>) -> Result<StopList, CliError> {
    match settings.path(flag, "stoplist") {
        None => Ok(StopList::default()),
        Some(path) => {
            let file = std::fs::File::open(&path)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            Ok(StopList::from_reader(BufReader::new(file))?)
        }
    }
}

fn load_domain_lexicon(path: &Path) -> Result<DomainLexicon, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    DomainLexicon::load(BufReader::new(file))
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn domain_params(settings: &Settings) -> Result<DomainParams, CliError> {
    let top_k = settings.parse_or(None, "top_k", 8usize)?;
    let blacklist = settings
        .get("blacklist")
        .map(|raw| raw.split(',').map(|s| s.trim().to_string()).collect())
        .unwrap_or_default();
    Ok(DomainParams {
        top_k: TopK(top_k),
        blacklist,
    })
}

fn train_params(
    settings: &Settings,
    max_iters: Option<usize>,
    tol: Option<f64>,
) -> Result<TrainParams, CliError> {
    let defaults = TrainParams::default();
    Ok(TrainParams {
        max_iters: settings.parse_or(max_iters, "max_iters", defaults.max_iters)?,
        tol: settings.parse_or(tol, "tol", defaults.tol)?,
    })
}

/// Context window policy for running text vs lexical-sample data.
#[derive(Clone, Copy, PartialEq)]
enum Window {
    /// Seven context nouns before and after the target.
    Fifteen,
    /// The whole example.
    Whole,
}

fn parse_window(settings: &Settings, flag: Option<&String>) -> Result<Window, CliError> {
    match settings.string(flag, "window").as_deref() {
        None | Some("whole") => Ok(Window::Whole),
        Some("fifteen") => Ok(Window::Fifteen),
        Some(other) => Err(CliError::usage(format!(
            "--window must be fifteen or whole, not {other:?}"
        ))),
    }
}

/// Builds the noun context for one instance; None when the target is
/// not a noun (the knowledge-based method covers nouns only).
fn noun_context(ex: &TrainingExample, window: Window) -> Option<Context> {
    if ex.target_pos != Pos::Noun {
        return None;
    }
    let mut nouns = Vec::new();
    let mut target = None;
    for (i, tok) in ex.tokens.iter().enumerate() {
        if i == ex.target_index || tok.pos_tag.starts_with('N') {
            if i == ex.target_index {
                target = Some(nouns.len());
            }
            nouns.push(tok.lemma.clone());
        }
    }
    let target = target?;
    let (nouns, target) = match window {
        Window::Whole => (nouns, target),
        Window::Fifteen => {
            let lo = target.saturating_sub(7);
            let hi = (target + 7 + 1).min(nouns.len());
            (nouns[lo..hi].to_vec(), target - lo)
        }
    };
    Some(Context::new(nouns, target))
}

fn assignment_answer(assignment: &SenseAssignment) -> Option<String> {
    match &assignment.outcome {
        Outcome::Assigned(sense) => Some(sense.to_string()),
        _ => None,
    }
}

fn cmd_validate_lexicon(paths: &[PathBuf], out: Option<&Path>) -> Result<(), CliError> {
    if paths.is_empty() {
        return Err(CliError::usage("validate-lexicon needs at least one path"));
    }
    let mut report = String::new();
    for path in paths {
        let db = load_lexicon(path)?;
        report.push_str(&format!("{}: ok ({} synsets)\n", path.display(), db.len()));
    }
    write_output(out, &report)
}

fn parse_order(raw: Option<&str>, has_domains: bool) -> Result<Vec<Heuristic>, CliError> {
    match raw {
        Some(text) => text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|label| {
                Heuristic::parse(label)
                    .ok_or_else(|| CliError::usage(format!("unknown heuristic {label:?}")))
            })
            .collect(),
        None => {
            let mut order = vec![
                Heuristic::Hypernym,
                Heuristic::Definition,
                Heuristic::Hyponym,
                Heuristic::GlossHypernym,
                Heuristic::GlossHyponym,
                Heuristic::CommonMark,
            ];
            if has_domains {
                order.push(Heuristic::Domain);
            }
            Ok(order)
        }
    }
}

fn cmd_sm(settings: &Settings, args: SmArgs, out: Option<&Path>) -> Result<(), CliError> {
    let db = load_lexicon(&settings.required_path(args.lexicon.as_ref(), "lexicon")?)?;
    let examples = load_corpus(&settings.required_path(args.corpus.as_ref(), "corpus")?)?;
    let stops = load_stops(settings, args.stoplist.as_ref())?;
    let window = parse_window(settings, args.window.as_ref())?;
    let mode = settings
        .string(args.mode.as_ref(), "mode")
        .unwrap_or_else(|| "sm".to_string());
    let domain_lexicon = settings
        .path(args.domain_lexicon.as_ref(), "domain_lexicon")
        .map(|p| load_domain_lexicon(&p))
        .transpose()?;
    let dparams = domain_params(settings)?;
    let order = parse_order(
        settings.string(args.order.as_ref(), "order").as_deref(),
        domain_lexicon.is_some(),
    )?;
    let env = HeuristicEnv {
        db: &db,
        stops: &stops,
        domain_lexicon: domain_lexicon.as_ref(),
        domain_params: &dparams,
    };

    let system = match mode.as_str() {
        "sm" => "SM",
        "cascade" => "SM-cascade",
        "vote" => "SM-vote",
        other => {
            return Err(CliError::usage(format!(
                "--mode must be sm, cascade or vote, not {other:?}"
            )))
        }
    };

    let results: Result<Vec<(String, Option<String>)>, CliError> = examples
        .par_iter()
        .map(|ex| {
            let answer = match noun_context(ex, window) {
                None => None,
                Some(ctx) => match mode.as_str() {
                    "sm" => assignment_answer(&specmarks::specification_marks(&ctx, &db)?),
                    "cascade" => assignment_answer(&specmarks::cascade(&ctx, &env, &order)?),
                    _ => {
                        let mut votes = vec![specmarks::specification_marks(&ctx, &db)?];
                        for &h in &order {
                            votes.push(env.run(h, &ctx, &Default::default())?);
                        }
                        assignment_answer(&specmarks::vote(&db, &votes)?)
                    }
                },
            };
            Ok((ex.id.clone(), answer))
        })
        .collect();

    let mut set = AnswerSet::new(system);
    for (id, answer) in results? {
        set.insert(id, answer);
    }
    let mut buf = Vec::new();
    eval::write_answer_file(&set, &mut buf)?;
    write_output(out, &String::from_utf8(buf).unwrap())
}

fn cmd_domains_build(
    settings: &Settings,
    args: DomainsArgs,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let db = load_lexicon(&settings.required_path(args.lexicon.as_ref(), "lexicon")?)?;
    let stops = load_stops(settings, args.stoplist.as_ref())?;
    let (lexicon, warnings) = domains::build_relevant_domains(&db, &stops);
    for warning in warnings {
        eprintln!("wsd: warning: {warning}");
    }
    let mut buf = Vec::new();
    lexicon.serialize(&mut buf)?;
    write_output(out, &String::from_utf8(buf).unwrap())
}

fn group_by_word(examples: &[TrainingExample]) -> BTreeMap<(String, Pos), Vec<TrainingExample>> {
    let mut groups: BTreeMap<(String, Pos), Vec<TrainingExample>> = BTreeMap::new();
    for ex in examples {
        groups
            .entry((ex.target_lemma.clone(), ex.target_pos))
            .or_default()
            .push(ex.clone());
    }
    groups
}

fn model_file_name(lemma: &str, pos: Pos) -> String {
    format!("{lemma}.{}.memodel", pos.tag())
}

fn cmd_me(settings: &Settings, args: MeArgs, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    match args.command {
        MeCommand::Train {
            corpus,
            selection,
            stoplist,
            max_iters,
            tol,
        } => {
            let examples = load_corpus(&settings.required_path(corpus.as_ref(), "corpus")?)?;
            let sel = FeatureSelection::parse(
                &settings.required_string(selection.as_ref(), "selection")?,
            )?;
            let stops = load_stops(settings, stoplist.as_ref())?;
            let params = train_params(settings, max_iters, tol)?;
            let dir = out
                .map(Path::to_path_buf)
                .ok_or_else(|| CliError::usage("me train needs --out MODEL_DIR"))?;
            std::fs::create_dir_all(&dir)
                .map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
            let mut summary = String::new();
            for ((lemma, pos), group) in group_by_word(&examples) {
                let clf = maxent::train(&group, &sel, &params, &stops)?;
                let path = dir.join(model_file_name(&lemma, pos));
                let mut buf = Vec::new();
                maxent::write_classifier(&clf, &mut buf)?;
                std::fs::write(&path, buf)
                    .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                summary.push_str(&format!(
                    "{lemma},{}: {} examples, {} features, converged={}\n",
                    pos.tag(),
                    clf.meta.examples,
                    clf.features.len(),
                    clf.meta.converged,
                ));
            }
            print!("{summary}");
            Ok(())
        }
        MeCommand::Classify {
            models,
            corpus,
            stoplist,
        } => {
            let dir = settings.required_path(models.as_ref(), "models")?;
            let examples = load_corpus(&settings.required_path(corpus.as_ref(), "corpus")?)?;
            let stops = load_stops(settings, stoplist.as_ref())?;
            let mut classifiers: BTreeMap<(String, Pos), Classifier> = BTreeMap::new();
            for entry in std::fs::read_dir(&dir)
                .map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?
            {
                let path = entry?.path();
                if path.extension().is_some_and(|e| e == "memodel") {
                    let file = std::fs::File::open(&path)?;
                    let clf = maxent::read_classifier(BufReader::new(file))
                        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                    classifiers.insert((clf.word.clone(), clf.pos), clf);
                }
            }
            let results: Result<Vec<(String, Option<String>)>, CliError> = examples
                .par_iter()
                .map(|ex| {
                    let answer = match classifiers.get(&(ex.target_lemma.clone(), ex.target_pos)) {
                        Some(clf) => Some(clf.classify(ex, &stops)?.sense),
                        None => None,
                    };
                    Ok((ex.id.clone(), answer))
                })
                .collect();
            let mut set = AnswerSet::new("ME");
            for (id, answer) in results? {
                set.insert(id, answer);
            }
            let mut buf = Vec::new();
            eval::write_answer_file(&set, &mut buf)?;
            write_output(out, &String::from_utf8(buf).unwrap())
        }
        MeCommand::Cv {
            corpus,
            selection,
            folds,
            stoplist,
            max_iters,
            tol,
        } => {
            let examples = load_corpus(&settings.required_path(corpus.as_ref(), "corpus")?)?;
            let sel = FeatureSelection::parse(
                &settings.required_string(selection.as_ref(), "selection")?,
            )?;
            let folds = settings.parse_or(folds, "folds", 3usize)?;
            let stops = load_stops(settings, stoplist.as_ref())?;
            let params = train_params(settings, max_iters, tol)?;
            let mut report = format!("{:<16} {:>6} {:>10}  per-fold\n", "word", "kept", "accuracy");
            let mut block = String::new();
            let mut total = 0.0;
            let mut words = 0usize;
            for ((lemma, pos), group) in group_by_word(&examples) {
                let cv = maxent::cross_validate(&group, &sel, folds, seed, &params, &stops)?;
                let per_fold: Vec<String> =
                    cv.fold_accuracy.iter().map(|a| format!("{a:.4}")).collect();
                report.push_str(&format!(
                    "{:<16} {:>6} {:>10.4}  {}\n",
                    format!("{lemma},{}", pos.tag()),
                    cv.senses_kept,
                    cv.mean_accuracy,
                    per_fold.join(" ")
                ));
                block.push_str(&format!(
                    "accuracy.{lemma},{}={:.6}\n",
                    pos.tag(),
                    cv.mean_accuracy
                ));
                total += cv.mean_accuracy;
                words += 1;
            }
            report.push('\n');
            report.push_str(&block);
            report.push_str(&format!("selection={}\n", sel.render()));
            report.push_str(&format!("folds={folds}\nseed={seed}\n"));
            report.push_str(&format!(
                "mean_accuracy={:.6}\n",
                total / words.max(1) as f64
            ));
            write_output(out, &report)
        }
        MeCommand::Select {
            corpus,
            candidates,
            mode,
            folds,
            stoplist,
            max_iters,
            tol,
        } => {
            let examples = load_corpus(&settings.required_path(corpus.as_ref(), "corpus")?)?;
            let candidates =
                parse_candidates(&settings.required_string(candidates.as_ref(), "candidates")?)?;
            let mode = match settings.string(mode.as_ref(), "select_mode").as_deref() {
                None | Some("word") => SelectMode::PerWord,
                Some("pos") => SelectMode::PerPos,
                Some(other) => {
                    return Err(CliError::usage(format!(
                        "--mode must be word or pos, not {other:?}"
                    )))
                }
            };
            let folds = settings.parse_or(folds, "folds", 3usize)?;
            let stops = load_stops(settings, stoplist.as_ref())?;
            let params = train_params(settings, max_iters, tol)?;
            let report =
                maxent::select_best(&examples, &candidates, mode, folds, seed, &params, &stops)?;
            let mut text = format!("{:<16} {:<12} {:>10}\n", "key", "selection", "accuracy");
            for (key, (sel, acc)) in &report.entries {
                text.push_str(&format!("{key:<16} {:<12} {acc:>10.4}\n", sel.render()));
            }
            text.push('\n');
            for (key, (sel, acc)) in &report.entries {
                text.push_str(&format!(
                    "selection.{key}={}\naccuracy.{key}={acc:.6}\n",
                    sel.render()
                ));
            }
            for warning in &report.warnings {
                eprintln!("wsd: warning: {warning}");
            }
            write_output(out, &text)
        }
    }
}

fn parse_candidates(raw: &str) -> Result<Vec<FeatureSelection>, CliError> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|code| FeatureSelection::parse(code).map_err(CliError::from))
        .collect()
}

fn cmd_hybrid(
    settings: &Settings,
    args: HybridArgs,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    match args.command {
        HybridCommand::Prelabel {
            lexicon,
            train_corpus,
            test_corpus,
            selection,
            threshold,
            window,
            folds,
            stoplist,
        } => {
            let db = load_lexicon(&settings.required_path(lexicon.as_ref(), "lexicon")?)?;
            let train_set =
                load_corpus(&settings.required_path(train_corpus.as_ref(), "train_corpus")?)?;
            let test_set =
                load_corpus(&settings.required_path(test_corpus.as_ref(), "test_corpus")?)?;
            let sel = FeatureSelection::parse(
                &settings.required_string(selection.as_ref(), "selection")?,
            )?;
            let threshold = settings.parse_or(threshold, "threshold", 0.9f64)?;
            let window = parse_window(settings, window.as_ref())?;
            let folds = settings.parse_or(folds, "folds", 3usize)?;
            let stops = load_stops(settings, stoplist.as_ref())?;
            let params = train_params(settings, None, None)?;

            // context-noun classifiers with cross-validated precision
            let mut classifiers: BTreeMap<String, Classifier> = BTreeMap::new();
            for ((lemma, pos), group) in group_by_word(&train_set) {
                if pos != Pos::Noun {
                    continue;
                }
                let cv = match maxent::cross_validate(&group, &sel, folds, seed, &params, &stops) {
                    Ok(cv) => Some(cv.mean_accuracy),
                    Err(MaxentError::NoSenseSurvives { .. }) => None,
                    Err(e) => return Err(e.into()),
                };
                let mut clf = maxent::train(&group, &sel, &params, &stops)?;
                clf.meta.cv_precision = cv;
                classifiers.insert(lemma, clf);
            }

            let mut set = AnswerSet::new("SM-prelabel");
            for ex in &test_set {
                let answer = match noun_context(ex, window) {
                    None => None,
                    Some(ctx) => {
                        let fc =
                            hybrid::prelabel_with_me(&ctx, &classifiers, threshold, &db, &stops)?;
                        assignment_answer(&hybrid::sm_with_fixed(&fc, &db)?)
                    }
                };
                set.insert(ex.id.clone(), answer);
            }
            let mut buf = Vec::new();
            eval::write_answer_file(&set, &mut buf)?;
            write_output(out, &String::from_utf8(buf).unwrap())
        }
        HybridCommand::Domainfeat {
            lexicon,
            domain_lexicon,
            train_corpus,
            test_corpus,
            selection,
            stoplist,
        } => {
            let db = load_lexicon(&settings.required_path(lexicon.as_ref(), "lexicon")?)?;
            let train_set =
                load_corpus(&settings.required_path(train_corpus.as_ref(), "train_corpus")?)?;
            let test_set =
                load_corpus(&settings.required_path(test_corpus.as_ref(), "test_corpus")?)?;
            let sel = FeatureSelection::parse(
                &settings.required_string(selection.as_ref(), "selection")?,
            )?;
            let stops = load_stops(settings, stoplist.as_ref())?;
            let params = train_params(settings, None, None)?;
            let dparams = domain_params(settings)?;
            let lex = match settings.path(domain_lexicon.as_ref(), "domain_lexicon") {
                Some(path) => load_domain_lexicon(&path)?,
                None => {
                    let (lex, warnings) = domains::build_relevant_domains(&db, &stops);
                    for warning in warnings {
                        eprintln!("wsd: warning: {warning}");
                    }
                    lex
                }
            };

            let mut classifiers: BTreeMap<(String, Pos), Classifier> = BTreeMap::new();
            for ((lemma, pos), group) in group_by_word(&train_set) {
                let clf = hybrid::me_with_domain_features(
                    &group, &sel, &db, &lex, &dparams, &params, &stops,
                )?;
                classifiers.insert((lemma, pos), clf);
            }
            let mut set = AnswerSet::new("ME-domains");
            for ex in &test_set {
                let answer = match classifiers.get(&(ex.target_lemma.clone(), ex.target_pos)) {
                    Some(clf) => Some(
                        hybrid::classify_with_domain_features(
                            clf, ex, &db, &lex, &dparams, &stops,
                        )?
                        .sense,
                    ),
                    None => None,
                };
                set.insert(ex.id.clone(), answer);
            }
            let mut buf = Vec::new();
            eval::write_answer_file(&set, &mut buf)?;
            write_output(out, &String::from_utf8(buf).unwrap())
        }
        HybridCommand::Vmesm {
            lexicon,
            train_corpus,
            test_corpus,
            candidates,
            fixed_selection,
            window,
            folds,
            stoplist,
        } => {
            let db = load_lexicon(&settings.required_path(lexicon.as_ref(), "lexicon")?)?;
            let train_set =
                load_corpus(&settings.required_path(train_corpus.as_ref(), "train_corpus")?)?;
            let test_set =
                load_corpus(&settings.required_path(test_corpus.as_ref(), "test_corpus")?)?;
            let candidates =
                parse_candidates(&settings.required_string(candidates.as_ref(), "candidates")?)?;
            let fixed = FeatureSelection::parse(
                &settings.required_string(fixed_selection.as_ref(), "fixed_selection")?,
            )?;
            let window = parse_window(settings, window.as_ref())?;
            let folds = settings.parse_or(folds, "folds", 3usize)?;
            let stops = load_stops(settings, stoplist.as_ref())?;
            let params = train_params(settings, None, None)?;

            let me_answers = maxent::run_me_systems(
                &train_set, &test_set, &candidates, &fixed, folds, seed, &params, &stops,
            )?;
            let by_instance: BTreeMap<&str, &maxent::MeSystemsAnswer> = me_answers
                .iter()
                .map(|a| (a.instance.as_str(), a))
                .collect();

            let mut set = AnswerSet::new("vME+SM");
            for ex in &test_set {
                let me = by_instance.get(ex.id.as_str());
                // the knowledge-based voter covers nouns only
                let sm = match noun_context(ex, window) {
                    Some(ctx) => specmarks::specification_marks(&ctx, &db)?,
                    None => SenseAssignment {
                        word: ex.target_lemma.clone(),
                        outcome: Outcome::Unassigned,
                        source: "not-a-noun".into(),
                        score: 0.0,
                    },
                };
                let answer = match me {
                    Some(me) => hybrid::vme_sm(&me.answers, &sm, None).or_else(|| me.voted.clone()),
                    None => assignment_answer(&sm),
                };
                set.insert(ex.id.clone(), answer);
            }
            let mut buf = Vec::new();
            eval::write_answer_file(&set, &mut buf)?;
            write_output(out, &String::from_utf8(buf).unwrap())
        }
    }
}

fn load_gold(path: &Path) -> Result<eval::Gold, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(eval::parse_gold_file(BufReader::new(file))?)
}

fn load_answers(path: &Path) -> Result<Vec<AnswerSet>, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(eval::parse_answer_file(BufReader::new(file))?)
}

fn cmd_score(settings: &Settings, args: ScoreArgs, out: Option<&Path>) -> Result<(), CliError> {
    let answers = load_answers(&settings.required_path(args.answers.as_ref(), "answers")?)?;
    let gold = load_gold(&settings.required_path(args.gold.as_ref(), "gold")?)?;
    let system = settings.string(args.system.as_ref(), "system");
    let mut text = String::new();
    let mut matched = false;
    for set in &answers {
        if system.as_deref().is_some_and(|s| s != set.system) {
            continue;
        }
        matched = true;
        text.push_str(&eval::render_score_report(&eval::score(set, &gold)?));
        text.push('\n');
    }
    if !matched {
        return Err(CliError::input(match system {
            Some(s) => format!("no answers for system {s:?}"),
            None => "answer file is empty".to_string(),
        }));
    }
    write_output(out, &text)
}

fn cmd_compare(settings: &Settings, args: CompareArgs, out: Option<&Path>) -> Result<(), CliError> {
    let a = load_answers(&settings.required_path(args.answers_a.as_ref(), "answers_a")?)?;
    let b = load_answers(&settings.required_path(args.answers_b.as_ref(), "answers_b")?)?;
    let gold = load_gold(&settings.required_path(args.gold.as_ref(), "gold")?)?;
    let mode = match settings
        .string(args.kappa_mode.as_ref(), "kappa_mode")
        .as_deref()
    {
        None | Some("keep") => KappaMode::AbstainAsCategory,
        Some("drop") => KappaMode::DropAbstentions,
        Some(other) => {
            return Err(CliError::usage(format!(
                "--kappa-mode must be keep or drop, not {other:?}"
            )))
        }
    };
    let first = |sets: Vec<AnswerSet>, which: &str| -> Result<AnswerSet, CliError> {
        sets.into_iter()
            .next()
            .ok_or_else(|| CliError::input(format!("{which} answer file is empty")))
    };
    let a = first(a, "--answers-a")?;
    let b = first(b, "--answers-b")?;
    let comparison = eval::compare(&a, &b, &gold, mode)?;
    write_output(out, &eval::render_comparison(&comparison))
}
