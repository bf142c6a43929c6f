mod common;

use std::path::PathBuf;

use advmt::metrics::{bleu, chrf, corpus_bleu, corpus_chrf, Level};
use advmt::text::SentenceTokens;
use advmt::{tokenize, RngState};
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize)]
struct Fixture {
    name: String,
    metric: String,
    level: String,
    pairs: Vec<(String, String)>,
    expected: f64,
}

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/metrics.jsonl")
}

fn case(name: &str, metric: &str, level: &str, pairs: &[(&str, &str)]) -> Fixture {
    let borrowed: Vec<(&str, &str)> = pairs.to_vec();
    let expected = match (metric, level) {
        ("chrf", "sentence") => common::chrf(pairs[0].0, pairs[0].1, 6, 2.0),
        ("chrf", "corpus") => common::corpus_chrf(&borrowed, 6, 2.0),
        ("bleu", "sentence") => common::sentence_bleu(pairs[0].0, pairs[0].1, 4),
        ("bleu", "corpus") => common::corpus_bleu(&borrowed, 4),
        _ => unreachable!(),
    };
    Fixture {
        name: name.into(),
        metric: metric.into(),
        level: level.into(),
        pairs: pairs.iter().map(|(h, r)| (h.to_string(), r.to_string())).collect(),
        expected,
    }
}

fn build_fixtures() -> Vec<Fixture> {
    let mut out = vec![
        case("chrf_small", "chrf", "sentence", &[("abcd", "abce")]),
        case("chrf_identity", "chrf", "sentence", &[("le chat", "le chat")]),
        case("chrf_disjoint", "chrf", "sentence", &[("zzzz", "abcd")]),
        case("chrf_spacing", "chrf", "sentence", &[("le  chat noir", "lechat noir")]),
        case("chrf_accents", "chrf", "sentence", &[("été chaud", "ete chaud")]),
        case("chrf_short_hyp", "chrf", "sentence", &[("ab", "abcdefgh")]),
        case("bleu_clip", "bleu", "sentence", &[("the the the", "the cat sat")]),
        case(
            "bleu_identity",
            "bleu",
            "sentence",
            &[("the cat sat on the mat", "the cat sat on the mat")],
        ),
        case(
            "bleu_brevity",
            "bleu",
            "sentence",
            &[("the cat", "the cat sat on the mat")],
        ),
        case("bleu_no_match", "bleu", "sentence", &[("a b c d", "e f g h")]),
        case(
            "bleu_partial",
            "bleu",
            "sentence",
            &[("the cat sat on a mat", "the cat sat on the mat")],
        ),
        case(
            "chrf_corpus",
            "chrf",
            "corpus",
            &[("the cat sat", "the cat sat on the mat"), ("un chien", "le chien")],
        ),
        case(
            "bleu_corpus",
            "bleu",
            "corpus",
            &[
                ("the cat sat on the mat", "the cat sat on the mat"),
                ("a dog ran", "the dog ran home"),
            ],
        ),
    ];
    let mut rng = RngState::new(2024);
    for i in 0..30 {
        let h = common::random_text(&mut rng, 8);
        let r = common::random_text(&mut rng, 8);
        out.push(case(&format!("chrf_random_{i}"), "chrf", "sentence", &[(&h, &r)]));
        out.push(case(&format!("bleu_random_{i}"), "bleu", "sentence", &[(&h, &r)]));
    }
    for i in 0..5 {
        let pairs: Vec<(String, String)> = (0..4)
            .map(|_| (common::random_text(&mut rng, 6), common::random_text(&mut rng, 6)))
            .collect();
        let borrowed: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        out.push(case(&format!("chrf_corpus_random_{i}"), "chrf", "corpus", &borrowed));
        out.push(case(&format!("bleu_corpus_random_{i}"), "bleu", "corpus", &borrowed));
    }
    out
}

fn load() -> Vec<Fixture> {
    std::fs::read_to_string(fixture_path())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn library_score(f: &Fixture) -> f64 {
    let hyps: Vec<SentenceTokens> = f.pairs.iter().map(|(h, _)| tokenize(h)).collect();
    let refs: Vec<SentenceTokens> = f.pairs.iter().map(|(_, r)| tokenize(r)).collect();
    match (f.metric.as_str(), f.level.as_str()) {
        ("chrf", "sentence") => chrf(&hyps[0], &refs[0], 6, 2.0).unwrap().value,
        ("chrf", "corpus") => corpus_chrf(&hyps, &refs, 6, 2.0).unwrap().value,
        ("bleu", "sentence") => bleu(&hyps[0], &refs[0], 4, Level::Sentence).unwrap().value,
        ("bleu", "corpus") => corpus_bleu(&hyps, &refs, 4).unwrap().value,
        other => panic!("unknown fixture kind {other:?}"),
    }
}

#[test]
#[ignore = "rewrites the fixture file"]
fn regenerate_fixtures() {
    let text: String = build_fixtures()
        .iter()
        .map(|f| serde_json::to_string(f).unwrap() + "\n")
        .collect();
    std::fs::write(fixture_path(), text).unwrap();
}

#[test]
fn fixture_file_has_enough_cases() {
    let fixtures = load();
    assert!(fixtures.len() >= 50);
    for name in ["chrf_small", "bleu_clip", "chrf_corpus"] {
        assert!(fixtures.iter().any(|f| f.name == name), "{name}");
    }
}

#[test]
fn oracle_reproduces_frozen_values() {
    let frozen = load();
    let fresh = build_fixtures();
    assert_eq!(frozen.len(), fresh.len());
    for (a, b) in frozen.iter().zip(&fresh) {
        assert_eq!(a.name, b.name);
        assert!((a.expected - b.expected).abs() < 1e-9, "{}", a.name);
    }
}

#[test]
fn library_matches_fixtures() {
    for f in load() {
        let got = library_score(&f);
        assert!((got - f.expected).abs() < 1e-6, "{}: {got} vs {}", f.name, f.expected);
    }
}

#[test]
fn known_fixture_values() {
    let fixtures = load();
    let get = |n: &str| fixtures.iter().find(|f| f.name == n).unwrap().expected;
    assert_eq!(get("chrf_identity"), 100.0);
    assert_eq!(get("chrf_disjoint"), 0.0);
    assert_eq!(get("bleu_identity"), 100.0);
}

#[test]
fn library_matches_oracle_on_random_pairs() {
    let mut rng = RngState::new(7);
    for _ in 0..300 {
        let h = common::random_text(&mut rng, 10);
        let r = common::random_text(&mut rng, 10);
        let (th, tr) = (tokenize(&h), tokenize(&r));
        let c = chrf(&th, &tr, 6, 2.0).unwrap().value;
        assert!((c - common::chrf(&h, &r, 6, 2.0)).abs() < 1e-6, "{h:?} {r:?}");
        let b = bleu(&th, &tr, 4, Level::Sentence).unwrap().value;
        assert!((b - common::sentence_bleu(&h, &r, 4)).abs() < 1e-6, "{h:?} {r:?}");
    }
}

#[test]
fn identity_scores_exactly_100() {
    let mut rng = RngState::new(11);
    for _ in 0..100 {
        let t = tokenize(&common::random_text(&mut rng, 10));
        assert_eq!(chrf(&t, &t, 6, 2.0).unwrap().value, 100.0);
        assert_eq!(bleu(&t, &t, 4, Level::Sentence).unwrap().value, 100.0);
        assert_eq!(
            corpus_bleu(std::slice::from_ref(&t), std::slice::from_ref(&t), 4)
                .unwrap()
                .value,
            100.0
        );
    }
}
