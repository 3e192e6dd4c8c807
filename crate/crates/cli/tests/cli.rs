//! End-to-end runs of the wsd binary over the bundled fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn wsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn validate_lexicon_accepts_all_fixtures() {
    let paths: Vec<String> = ["plant.lex", "sister.lex", "plane.lex", "calendar.lex", "domains.lex"]
        .iter()
        .map(|n| fixture(n).to_string_lossy().into_owned())
        .collect();
    let mut args = vec!["validate-lexicon"];
    args.extend(paths.iter().map(String::as_str));
    let out = wsd(&args);
    let text = stdout_of(&out);
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().all(|l| l.contains(": ok (")));
}

#[test]
fn validate_lexicon_rejects_cycles_with_exit_2() {
    let dir = std::env::temp_dir().join("wsd-cycle-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cycle.lex");
    std::fs::write(
        &path,
        "SYNSET\tN\ta\ta\t\nSYNSET\tN\tb\tb\t\nREL\thypernym\tN:a\tN:b\nREL\thypernym\tN:b\tN:a\n",
    )
    .unwrap();
    let out = wsd(&["validate-lexicon", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cycle"));
}

#[test]
fn missing_required_flag_exits_1() {
    let out = wsd(&["sm"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sm_reproduces_the_plant_outcome() {
    let lexicon = fixture("plant.lex");
    let corpus = fixture("plant.corpus");
    let out = wsd(&[
        "sm",
        "--lexicon",
        lexicon.to_str().unwrap(),
        "--corpus",
        corpus.to_str().unwrap(),
    ]);
    assert_eq!(
        stdout_of(&out),
        "ANSWER\tSM\tp.1\tN:plant2\n\
         ANSWER\tSM\tp.2\tN:tree1\n\
         ANSWER\tSM\tp.3\tN:perennial1\n\
         ANSWER\tSM\tp.4\t-\n"
    );
}

#[test]
fn sm_output_pipes_into_score_unchanged() {
    let dir = std::env::temp_dir().join("wsd-pipe-test");
    std::fs::create_dir_all(&dir).unwrap();
    let answers = dir.join("sm.ans");
    let out = wsd(&[
        "sm",
        "--lexicon",
        fixture("plant.lex").to_str().unwrap(),
        "--corpus",
        fixture("plant.corpus").to_str().unwrap(),
        "--out",
        answers.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = wsd(&[
        "score",
        "--answers",
        answers.to_str().unwrap(),
        "--gold",
        fixture("plant.gold").to_str().unwrap(),
    ]);
    let text = stdout_of(&out);
    assert!(text.contains("precision=1.000000"));
    assert!(text.contains("recall=0.750000"));
    assert!(text.contains("coverage=0.750000"));
}

#[test]
fn perfect_answers_score_all_ones() {
    let out = wsd(&[
        "score",
        "--answers",
        fixture("plant.gold").to_str().unwrap(),
        "--gold",
        fixture("plant.gold").to_str().unwrap(),
    ]);
    let text = stdout_of(&out);
    assert!(text.contains("precision=1.000000"));
    assert!(text.contains("recall=1.000000"));
    assert!(text.contains("coverage=1.000000"));
}

#[test]
fn cascade_recovers_leaf() {
    let out = wsd(&[
        "sm",
        "--lexicon",
        fixture("plant.lex").to_str().unwrap(),
        "--corpus",
        fixture("plant.corpus").to_str().unwrap(),
        "--mode",
        "cascade",
    ]);
    let text = stdout_of(&out);
    assert!(text.contains("ANSWER\tSM-cascade\tp.4\tN:leaf1"));
}

#[test]
fn vote_mode_has_full_coverage() {
    let out = wsd(&[
        "sm",
        "--lexicon",
        fixture("plant.lex").to_str().unwrap(),
        "--corpus",
        fixture("plant.corpus").to_str().unwrap(),
        "--mode",
        "vote",
    ]);
    let text = stdout_of(&out);
    assert_eq!(text.lines().count(), 4);
    assert!(!text.contains("\t-"), "voting always answers: {text}");
}

#[test]
fn me_cv_is_byte_identical_under_a_fixed_seed() {
    let corpus = fixture("bass.corpus");
    let args = [
        "me",
        "cv",
        "--corpus",
        corpus.to_str().unwrap(),
        "--selection",
        "s",
        "--seed",
        "42",
    ];
    let first = stdout_of(&wsd(&args));
    let second = stdout_of(&wsd(&args));
    assert_eq!(first, second);
    assert!(first.contains("seed=42"));
}

#[test]
fn me_cv_without_surviving_senses_exits_3() {
    let out = wsd(&[
        "me",
        "cv",
        "--corpus",
        fixture("interest.corpus").to_str().unwrap(),
        "--selection",
        "p",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn me_train_then_classify_round_trips_through_model_files() {
    let dir = std::env::temp_dir().join("wsd-models-test");
    let _ = std::fs::remove_dir_all(&dir);
    let out = wsd(&[
        "me",
        "train",
        "--corpus",
        fixture("bass.corpus").to_str().unwrap(),
        "--selection",
        "s",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(dir.join("bass.N.memodel").exists());
    let out = wsd(&[
        "me",
        "classify",
        "--models",
        dir.to_str().unwrap(),
        "--corpus",
        fixture("bass.corpus").to_str().unwrap(),
    ]);
    let text = stdout_of(&out);
    // the training set is separable: every instance classifies correctly
    for i in 1..=6 {
        assert!(text.contains(&format!("ANSWER\tME\tb.{i}\tbass#1\n")), "{text}");
    }
    for i in 7..=12 {
        assert!(text.contains(&format!("ANSWER\tME\tb.{i}\tbass#2\n")), "{text}");
    }
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = std::env::temp_dir().join("wsd-config-test");
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("run.conf");
    std::fs::write(
        &config,
        format!(
            "lexicon={}\ncorpus={}\nmode=cascade\n",
            fixture("plant.lex").display(),
            fixture("plant.corpus").display()
        ),
    )
    .unwrap();
    let out = wsd(&["--config", config.to_str().unwrap(), "sm"]);
    let text = stdout_of(&out);
    assert!(text.contains("SM-cascade"));
    // flag wins over the config key
    let out = wsd(&["--config", config.to_str().unwrap(), "sm", "--mode", "sm"]);
    let text = stdout_of(&out);
    assert!(text.contains("ANSWER\tSM\t"));
}

#[test]
fn compare_emits_agreement_and_contest_blocks() {
    let dir = std::env::temp_dir().join("wsd-compare-test");
    std::fs::create_dir_all(&dir).unwrap();
    let sm = dir.join("sm.ans");
    let cascade = dir.join("cascade.ans");
    for (mode, path) in [("sm", &sm), ("cascade", &cascade)] {
        let out = wsd(&[
            "sm",
            "--lexicon",
            fixture("plant.lex").to_str().unwrap(),
            "--corpus",
            fixture("plant.corpus").to_str().unwrap(),
            "--mode",
            mode,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let out = wsd(&[
        "compare",
        "--answers-a",
        sm.to_str().unwrap(),
        "--answers-b",
        cascade.to_str().unwrap(),
        "--gold",
        fixture("plant.gold").to_str().unwrap(),
    ]);
    let text = stdout_of(&out);
    assert!(text.contains("both_ok=0.750000"));
    assert!(text.contains("zero_ok=0.000000"));
    assert!(text.contains("optimal_combination=1.000000"));
    assert!(text.contains("wins=0"));
    assert!(text.contains("loses=1"));
}

#[test]
fn jobs_flag_does_not_change_output() {
    let base = stdout_of(&wsd(&[
        "sm",
        "--lexicon",
        fixture("plant.lex").to_str().unwrap(),
        "--corpus",
        fixture("plant.corpus").to_str().unwrap(),
    ]));
    let jobs = stdout_of(&wsd(&[
        "--jobs",
        "4",
        "sm",
        "--lexicon",
        fixture("plant.lex").to_str().unwrap(),
        "--corpus",
        fixture("plant.corpus").to_str().unwrap(),
    ]));
    assert_eq!(base, jobs);
}

#[test]
fn domains_build_emits_sorted_entries() {
    let out = wsd(&[
        "domains-build",
        "--lexicon",
        fixture("domains.lex").to_str().unwrap(),
    ]);
    let text = stdout_of(&out);
    assert!(text.lines().all(|l| l.starts_with("DOM\t")));
    let lemmas: Vec<&str> = text.lines().map(|l| l.split('\t').nth(1).unwrap()).collect();
    let mut sorted = lemmas.clone();
    sorted.sort();
    assert_eq!(lemmas, sorted);
}
