mod common;

use advmt::framework::AttackRecord;
use advmt::study::{
    adjudicate, correlation_report, paired_bootstrap_correlation_test, pearson, sample_annotation_batch,
    AnnotationItem, AttackOutput, ItemConstraint, Provenance, Rating, SIGNIFICANCE,
};
use advmt::text::{Side, Token};
use advmt::{tokenize, RngState};
use proptest::prelude::*;

fn random_column(rng: &mut RngState, n: usize) -> Vec<f64> {
    (0..n).map(|_| 100.0 * rng.uniform()).collect()
}

fn ratings(rng: &mut RngState, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.int_inclusive(0, 5) as f64).collect()
}

#[test]
fn pearson_matches_direct_formula() {
    for seed in 0..20 {
        let mut rng = RngState::new(seed);
        let h = ratings(&mut rng, 50);
        let m: Vec<f64> = h.iter().map(|v| 10.0 * v + 30.0 * rng.normal()).collect();
        let got = pearson(&h, &m).unwrap();
        let want = common::pearson(&h, &m);
        assert!((got - want).abs() < 1e-12, "seed {seed}: {got} vs {want}");
        let noise = random_column(&mut rng, 50);
        assert!((pearson(&h, &noise).unwrap() - common::pearson(&h, &noise)).abs() < 1e-12);
    }
}

#[test]
fn bootstrap_separates_perfect_from_noise() {
    for seed in 0..10 {
        let mut rng = RngState::new(100 + seed);
        let h = ratings(&mut rng, 60);
        let noise = random_column(&mut rng, 60);
        let test = paired_bootstrap_correlation_test(&h, &h, &noise, 1000, &RngState::new(seed)).unwrap();
        assert!(test.a_better);
        assert!(test.p_value < SIGNIFICANCE, "seed {seed}: p = {}", test.p_value);
    }
}

#[test]
fn bootstrap_declines_identical_metrics() {
    for seed in 0..10 {
        let mut rng = RngState::new(200 + seed);
        let h = ratings(&mut rng, 60);
        let m: Vec<f64> = h.iter().map(|v| v + 2.0 * rng.normal()).collect();
        let test = paired_bootstrap_correlation_test(&h, &m, &m, 1000, &RngState::new(seed)).unwrap();
        assert!(test.p_value > 0.1, "seed {seed}: p = {}", test.p_value);
        assert!(!test.significant(SIGNIFICANCE));
    }
}

fn study_item(i: usize, rng: &mut RngState) -> AnnotationItem {
    let side = if i.is_multiple_of(2) {
        Side::Source
    } else {
        Side::Target
    };
    let (constraint, n_edits) = if side == Side::Target && i % 7 == 1 {
        (ItemConstraint::None, 0)
    } else {
        (*rng.choose(&ItemConstraint::ATTACKS), rng.int_inclusive(1, 3) as u8)
    };
    AnnotationItem {
        id: format!("item-{i}"),
        sentence_a: tokenize("a b"),
        sentence_b: tokenize("a c"),
        provenance: Provenance {
            constraint,
            n_edits,
            side,
        },
    }
}

#[test]
fn report_coefficients_match_oracle_per_stratum() {
    let mut rng = RngState::new(31);
    let items: Vec<(AnnotationItem, Rating)> = (0..400)
        .map(|i| {
            (
                study_item(i, &mut rng),
                Rating::new(rng.int_inclusive(0, 5) as i64).unwrap(),
            )
        })
        .collect();
    let human: Vec<f64> = items.iter().map(|(_, r)| r.value() as f64).collect();
    let good: Vec<f64> = human.iter().map(|h| 15.0 * h + 10.0 * rng.normal()).collect();
    let bad: Vec<f64> = human.iter().map(|h| 5.0 * h + 30.0 * rng.normal()).collect();
    let scores = vec![("good".to_string(), good.clone()), ("bad".to_string(), bad.clone())];
    let report = correlation_report(&items, &scores, 200, &RngState::new(1)).unwrap();

    let member = |label: &str, it: &AnnotationItem| {
        let p = &it.provenance;
        let (side, rest) = label.split_once(':').unwrap();
        let side_ok = (side == "source") == (p.side == Side::Source);
        side_ok
            && match rest {
                "all" => true,
                r if r.starts_with("edits=") => p.n_edits.to_string() == r["edits=".len()..],
                r => p.constraint.name() == r,
            }
    };
    assert!(report.rows.len() >= 10);
    for row in &report.rows {
        let idx: Vec<usize> = (0..items.len()).filter(|&i| member(&row.label, &items[i].0)).collect();
        assert_eq!(idx.len(), row.n, "{}", row.label);
        let h: Vec<f64> = idx.iter().map(|&i| human[i]).collect();
        for (col, cell) in [&good, &bad].iter().zip(&row.cells) {
            let m: Vec<f64> = idx.iter().map(|&i| col[i]).collect();
            let want = common::pearson(&h, &m);
            assert!((cell.value().unwrap() - want).abs() < 1e-12, "{}", row.label);
        }
    }
    let overall = report.rows.iter().find(|r| r.label == "source:all").unwrap();
    assert!(matches!(
        overall.cells[0],
        advmt::study::Cell::Value { better: true, .. }
    ));
}

fn fake_output(c: ItemConstraint, edits: usize, tag: usize) -> AttackOutput {
    let x = tokenize(&format!("s{tag} a b c"));
    let mut x_adv = x.clone();
    for e in 0..edits {
        x_adv = x_adv.with_replacement(e + 1, Token::new(format!("z{e}")).unwrap());
    }
    AttackOutput {
        constraint: c,
        record: AttackRecord {
            x,
            x_adv,
            y: tokenize(&format!("r{tag} u v")),
            y_base: tokenize(&format!("r{tag} u w")),
            y_adv: tokenize("q u w"),
            swaps: vec![],
        },
    }
}

fn population(per_cell: usize) -> Vec<AttackOutput> {
    let mut out = Vec::new();
    let mut tag = 0;
    for c in ItemConstraint::ATTACKS {
        for edits in 1..=3 {
            for _ in 0..per_cell {
                out.push(fake_output(c, edits, tag));
                tag += 1;
            }
        }
    }
    out
}

#[test]
fn paper_scale_batch_sizes() {
    let outputs = population(120);
    let items = sample_annotation_batch(&outputs, 300, [1, 1, 1], &mut RngState::new(4)).unwrap();
    let source = items.iter().filter(|i| i.provenance.side == Side::Source).count();
    let target = items.iter().filter(|i| i.provenance.side == Side::Target).count();
    assert_eq!((source, target), (900, 1200));
    for c in ItemConstraint::ATTACKS {
        for e in 1..=3u8 {
            let cell = items
                .iter()
                .filter(|i| {
                    i.provenance.side == Side::Source && i.provenance.constraint == c && i.provenance.n_edits == e
                })
                .count();
            assert_eq!(cell, 100);
        }
    }
    for it in &items {
        it.provenance.validate().unwrap();
    }
}

#[test]
fn shortfall_is_reported() {
    let outputs = population(2);
    let err = sample_annotation_batch(&outputs, 9, [1, 1, 1], &mut RngState::new(0)).unwrap_err();
    assert!(err.to_string().contains("need 3, have 2"), "{err}");
    assert!(sample_annotation_batch(&[], 3, [1, 1, 1], &mut RngState::new(0)).is_err());
}

proptest! {
    #[test]
    fn pearson_symmetric_and_affine_invariant(
        pairs in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 3..40),
        scale in 0.1f64..10.0,
        shift in -100.0f64..100.0,
    ) {
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        if let Ok(r) = pearson(&xs, &ys) {
            prop_assert!((-1.0..=1.0).contains(&r));
            prop_assert!((r - pearson(&ys, &xs).unwrap()).abs() < 1e-12);
            let moved: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
            prop_assert!((r - pearson(&moved, &ys).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn adjudication_picks_a_given_rating(r1 in 0i64..6, r2 in 0i64..6, a in 0i64..6) {
        let (r1, r2, a) = (Rating::new(r1).unwrap(), Rating::new(r2).unwrap(), Rating::new(a).unwrap());
        let auditor = if r1 == r2 { None } else { Some(a) };
        let out = adjudicate(r1, r2, auditor).unwrap();
        prop_assert!(out == r1 || out == r2 || Some(out) == auditor);
    }

    #[test]
    fn bootstrap_p_value_is_a_probability(seed in 0u64..1000, n in 10usize..30) {
        let mut rng = RngState::new(seed);
        let h = ratings(&mut rng, n);
        let a = random_column(&mut rng, n);
        let b = random_column(&mut rng, n);
        if let Ok(t) = paired_bootstrap_correlation_test(&h, &a, &b, 50, &rng) {
            prop_assert!((0.0..=1.0).contains(&t.p_value));
        }
        if let Ok(t) = paired_bootstrap_correlation_test(&h, &a, &a, 50, &rng) {
            prop_assert!(!t.significant(SIGNIFICANCE));
        }
    }

    #[test]
    fn stratified_counts_are_exact(unit in 1usize..4, mix in prop::array::uniform3(0usize..3), seed in 0u64..100) {
        prop_assume!(mix.iter().sum::<usize>() > 0);
        let per_constraint = unit * mix.iter().sum::<usize>();
        let outputs = population(12);
        let items = sample_annotation_batch(&outputs, per_constraint, mix, &mut RngState::new(seed)).unwrap();
        for c in ItemConstraint::ATTACKS {
            for (k, &share) in mix.iter().enumerate() {
                let cell = items
                    .iter()
                    .filter(|i| i.provenance.side == Side::Source
                        && i.provenance.constraint == c
                        && i.provenance.n_edits as usize == k + 1)
                    .count();
                prop_assert_eq!(cell, share * unit);
            }
        }
        let baseline = items.iter().filter(|i| i.provenance.constraint == ItemConstraint::None).count();
        prop_assert_eq!(baseline, per_constraint);
    }
}
