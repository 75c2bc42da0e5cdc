mod common;

use std::sync::Arc;

use common::{ambiguous_items, annotated as ann, fd_rel_error, two_reading_items, TWO_READING_LEXICON};
use exptree::ccg::{
    chart_parse, parser_objective, prepare, score_candidates, train_parser, Lexicon, ParserModel, NUM_FEATURES,
};
use exptree::logic::{exec_strict, Instance};
use exptree::Error;
use proptest::prelude::*;

const SENTENCES: &[&str] = &[
    "the word 'fair' precedes OBJECT",
    "the word price is directly preceded by fair",
    "'x' appears before OBJECT or follows SUBJECT",
    "'x' is between SUBJECT and OBJECT and SUBJECT contains 'a'",
    "there are at most three words between SUBJECT and OBJECT",
    "SUBJECT contains 'univ'",
];

#[test]
fn candidates_are_unique_and_sorted() {
    let lex = Lexicon::default();
    for s in SENTENCES {
        let c = chart_parse(s, &lex).unwrap();
        assert!(c.windows(2).all(|w| w[0].sexpr < w[1].sexpr), "{s}");
    }
}

#[test]
fn empty_or_unknown_input_has_no_parse() {
    let lex = Lexicon::default();
    assert!(matches!(chart_parse("", &lex), Err(Error::NoParse)));
    assert!(matches!(chart_parse("zorp blick quux", &lex), Err(Error::NoParse)));
}

#[test]
fn precedes_object_has_a_matching_reading() {
    let lex = Lexicon::default();
    let x = Instance::from_text("s", "the fair price of OBJ-PRODUCT").unwrap();
    let c = chart_parse("the word 'fair' precedes OBJECT", &lex).unwrap();
    assert!(c.iter().any(|c| exec_strict(&c.form, &x).unwrap()));
}

#[test]
fn best_parse_of_directly_preceded_matches_its_sentence() {
    let m = ParserModel::new(Arc::new(Lexicon::default()));
    let (best, _) = m.best_parse("the word price is directly preceded by fair").unwrap();
    let x = Instance::from_text("s", "Decent sushi at a fair price").unwrap();
    assert!(exec_strict(&best.form, &x).unwrap(), "{}", best.sexpr);
    let all = m.parse("the word price is directly preceded by fair").unwrap();
    let p = score_candidates(&m.theta, &all);
    // ties resolve to the first candidate in serialized order
    let top = p.iter().copied().fold(0.0, f64::max);
    let first = all.iter().zip(&p).find(|(_, &q)| q == top).unwrap().0;
    assert_eq!(first.sexpr, best.sexpr);
}

#[test]
fn stored_features_equal_recount() {
    let lex = Lexicon::default();
    for s in SENTENCES {
        for c in chart_parse(s, &lex).unwrap() {
            assert_eq!(c.features, c.derivation.features(), "{s}: {}", c.sexpr);
        }
    }
}

proptest! {
    #[test]
    fn probabilities_sum_to_one(theta in proptest::collection::vec(-5.0..5.0f64, NUM_FEATURES), k in 0..SENTENCES.len()) {
        let c = chart_parse(SENTENCES[k], &Lexicon::default()).unwrap();
        let p = score_candidates(&theta, &c);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(p.iter().all(|&v| v > 0.0));
    }
}

#[test]
fn toy_training_prefers_consistent_parse() {
    let model = ParserModel::new(Arc::new(Lexicon::parse(TWO_READING_LEXICON).unwrap()));
    let items = two_reading_items();
    for it in &items {
        let c = model.parse(&it.text).unwrap();
        assert_eq!(c.len(), 2, "{:?}", c.iter().map(|c| &c.sexpr).collect::<Vec<_>>());
        assert_eq!(c.iter().filter(|c| exec_strict(&c.form, &it.source).unwrap()).count(), 1);
        assert_ne!(c[0].features, c[1].features);
    }
    let (trained, report) = train_parser(&model, &items, 50, 0.1).unwrap();
    assert!(report.skipped.is_empty());
    for it in &items {
        let c = trained.parse(&it.text).unwrap();
        let p = score_candidates(&trained.theta, &c);
        let good = c.iter().position(|c| exec_strict(&c.form, &it.source).unwrap()).unwrap();
        assert!(p[good] > 0.9, "{}", p[good]);
    }
}

#[test]
fn best_objective_never_decreases() {
    let model = ParserModel::new(Arc::new(Lexicon::parse(TWO_READING_LEXICON).unwrap()));
    let (_, report) = train_parser(&model, &two_reading_items(), 30, 2.0).unwrap();
    let mut best = f64::NEG_INFINITY;
    for &o in &report.objective {
        let next = best.max(o);
        assert!(next >= best);
        best = next;
    }
    assert_eq!(report.best_objective, best);
    assert!(report.best_objective >= report.objective[0]);
}

#[test]
fn inconsistent_items_are_skipped_and_reported() {
    let model = ParserModel::new(Arc::new(Lexicon::default()));
    let items = vec![
        ann("ok", "the word 'fair' appears", "a fair price"),
        ann("bad", "the word 'cheap' appears", "a fair price"),
        ann("noparse", "zorp blick", "a fair price"),
    ];
    let (_, report) = train_parser(&model, &items, 5, 0.1).unwrap();
    let ids: Vec<&str> = report.skipped.iter().map(|s| s.id.as_str()).collect();
    assert_eq!(ids, vec!["bad", "noparse"]);
}

#[test]
fn single_candidate_items_are_at_the_optimum() {
    let model = ParserModel::new(Arc::new(Lexicon::default()));
    let items = vec![ann("one", "the word 'fair' appears", "a fair price")];
    let (data, _) = prepare(&model, &items);
    assert_eq!(data[0].features.len(), 1);
    let (trained, report) = train_parser(&model, &items, 10, 0.5).unwrap();
    assert_eq!(report.best_objective, 0.0);
    assert_eq!(trained.theta, model.theta);
}

#[test]
fn objective_gradient_matches_finite_differences() {
    let model = ParserModel::new(Arc::new(Lexicon::default()));
    let items = ambiguous_items();
    let (data, skipped) = prepare(&model, &items);
    assert!(skipped.is_empty(), "{skipped:?}");
    for theta in [[0.0; NUM_FEATURES], [0.3, -0.7, 1.1, 0.2, -0.4, 0.9]] {
        let (_, g) = parser_objective(&theta, &data);
        let err = fd_rel_error(|t| parser_objective(t, &data).0, &theta, &g, 1e-5);
        assert!(err < 1e-4, "{err}");
    }
}
