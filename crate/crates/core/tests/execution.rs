mod common;

use common::{random_form, random_instance, TableMatcher};
use exptree::exec::{luk_and, luk_not, luk_or, soft_score, ExactMatcher, SoftConfig};
use exptree::logic::{exec_strict, sexpr, Instance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

fn unit() -> impl Strategy<Value = f64> {
    0.0..=1.0f64
}

proptest! {
    #[test]
    fn conjunction_and_disjunction_commute(a in unit(), b in unit()) {
        prop_assert!((luk_and(a, b).unwrap() - luk_and(b, a).unwrap()).abs() <= TOL);
        prop_assert!((luk_or(a, b).unwrap() - luk_or(b, a).unwrap()).abs() <= TOL);
    }

    #[test]
    fn identities_hold(a in unit()) {
        prop_assert!((luk_and(a, 1.0).unwrap() - a).abs() <= TOL);
        prop_assert!((luk_or(a, 0.0).unwrap() - a).abs() <= TOL);
        prop_assert!((luk_not(luk_not(a).unwrap()).unwrap() - a).abs() <= TOL);
    }

    #[test]
    fn de_morgan(a in unit(), b in unit()) {
        let lhs = luk_not(luk_and(a, b).unwrap()).unwrap();
        let rhs = luk_or(luk_not(a).unwrap(), luk_not(b).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= TOL);
    }

    #[test]
    fn connectives_are_monotone(a in unit(), b in unit(), d in unit()) {
        let a2 = (a + d).min(1.0);
        prop_assert!(luk_and(a2, b).unwrap() >= luk_and(a, b).unwrap());
        prop_assert!(luk_or(a2, b).unwrap() >= luk_or(a, b).unwrap());
    }

    #[test]
    fn soft_execution_degenerates_to_strict(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let form = random_form(&mut rng, 3, true);
        let x = random_instance(&mut rng, "x");
        let cfg = SoftConfig { mu: 0.5, slack_width: 0 };
        let strict = exec_strict(&form, &x).unwrap();
        let soft = soft_score(&form, &x, &ExactMatcher, &cfg).unwrap();
        prop_assert_eq!(soft, if strict { 1.0 } else { 0.0 }, "{}", sexpr::print(&form));
    }

    #[test]
    fn raising_matcher_scores_never_lowers_negation_free_forms(seed in any::<u64>(), floor in 0.0..1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let form = random_form(&mut rng, 3, false);
        let x = random_instance(&mut rng, "x");
        let cfg = SoftConfig::default();
        let low = soft_score(&form, &x, &TableMatcher { seed, floor: 0.0 }, &cfg).unwrap();
        let high = soft_score(&form, &x, &TableMatcher { seed, floor }, &cfg).unwrap();
        prop_assert!(high >= low - TOL, "{} {} < {}", sexpr::print(&form), high, low);
    }

    #[test]
    fn soft_scores_stay_in_unit_interval(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let form = random_form(&mut rng, 3, true);
        let x = random_instance(&mut rng, "x");
        let s = soft_score(&form, &x, &TableMatcher { seed, floor: 0.0 }, &SoftConfig::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&s));
    }
}

#[test]
fn fuzzy_operands_out_of_range_are_rejected() {
    assert!(luk_and(1.5, 0.2).is_err());
    assert!(luk_not(-0.1).is_err());
}

#[test]
fn fair_price_examples() {
    let f = sexpr::parse(r#"(Is (Word "fair") (Direct (Left "price")))"#).unwrap();
    let yes = Instance::from_text("a", "Decent sushi at a fair price").unwrap();
    let no = Instance::from_text("b", "The price was not fair").unwrap();
    assert!(exec_strict(&f, &yes).unwrap());
    assert!(!exec_strict(&f, &no).unwrap());
    let cfg = SoftConfig::default();
    assert_eq!(soft_score(&f, &yes, &ExactMatcher, &cfg).unwrap(), 1.0);
    let slack = Instance::from_text("c", "Decent sushi at a fair enough price").unwrap();
    assert_eq!(soft_score(&f, &slack, &ExactMatcher, &SoftConfig { mu: 0.5, slack_width: 1 }).unwrap(), 0.5);
    let none = Instance::from_text("d", "Nothing to see here").unwrap();
    assert_eq!(soft_score(&f, &none, &ExactMatcher, &cfg).unwrap(), 0.0);
}

#[test]
fn thousand_random_pairs_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = SoftConfig { mu: 0.5, slack_width: 0 };
    let mut positives = 0;
    for i in 0..1000 {
        let form = random_form(&mut rng, 3, true);
        let x = random_instance(&mut rng, &i.to_string());
        let strict = exec_strict(&form, &x).unwrap();
        positives += strict as usize;
        assert_eq!(soft_score(&form, &x, &ExactMatcher, &cfg).unwrap(), strict as u8 as f64, "{}", sexpr::print(&form));
    }
    // both outcomes are exercised
    assert!(positives > 100 && positives < 900, "{positives}");
}
