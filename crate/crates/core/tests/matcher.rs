mod common;

use std::sync::Arc;

use common::{fd_rel_error, matcher_fixture, random_matcher_params};
use exptree::exec::StringMatcher;
use exptree::io::{generate_synthetic, SyntheticSpec};
use exptree::logic::{phrase_occurrences, Instance};
use exptree::matcher::{
    class_sets, l_find, l_sim_mean, l_string, num_windows, pretrain, synthesize_find_examples, windows, EmbeddingTable,
    MatcherModel, PretrainConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

fn unit(dim: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = 1.0;
    v
}

/// One orthonormal direction per word.
fn basis_table(vocab: &[&str]) -> Arc<EmbeddingTable> {
    let mut t = EmbeddingTable::new(vocab.len());
    for (i, w) in vocab.iter().enumerate() {
        t.insert(w, &unit(vocab.len(), i)).unwrap();
    }
    Arc::new(t)
}

#[test]
fn window_layout() {
    assert_eq!(num_windows(1), 1);
    assert_eq!(num_windows(2), 3);
    assert_eq!(num_windows(3), 6);
    assert_eq!(windows(5, 2, 2), vec![(2, 3), (1, 3), (2, 4)]);
    // truncated at both edges
    assert_eq!(windows(5, 0, 2), vec![(0, 1), (0, 1), (0, 2)]);
    assert_eq!(windows(5, 4, 2), vec![(4, 5), (3, 5), (4, 5)]);
    assert_eq!(windows(1, 0, 3).len(), 6);
}

#[test]
fn unigram_weight_gives_exact_matching() {
    let mut m = MatcherModel::new(basis_table(&["a", "fair", "price", "for", "sushi"]), 2);
    m.v = vec![1.0, 0.0, 0.0];
    let x = Instance::from_text("x", "a fair price for sushi").unwrap();
    let s = m.string_match_scores(&x, &words("fair")).unwrap().0;
    assert_eq!(s.len(), 5);
    for (i, v) in s.iter().enumerate() {
        let want = if i == 1 { 1.0 } else { 0.0 };
        assert!((v - want).abs() < 1e-12, "{i}: {v}");
    }
}

#[test]
fn unknown_tokens_score_zero() {
    let m = MatcherModel::new(basis_table(&["fair", "price"]), 2);
    let x = Instance::from_text("x", "zorp blick").unwrap();
    assert!(m.string_match_scores(&x, &words("fair")).unwrap().0.iter().all(|&v| v == 0.0));
}

#[test]
fn scores_are_invariant_to_scaling_d() {
    let fx = matcher_fixture(3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut m = fx.model.clone();
    m.set_params(&random_matcher_params(&mut rng, m.dim(), m.num_windows()));
    let mut scaled = m.clone();
    scaled.d.iter_mut().for_each(|d| *d *= 7.5);
    for ex in fx.find.iter().take(10) {
        let a = m.string_match_scores(&ex.x, &ex.query).unwrap().0;
        let b = scaled.string_match_scores(&ex.x, &ex.query).unwrap().0;
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-9);
        }
    }
}

#[test]
fn find_examples_are_reproducible_and_marked() {
    let data = generate_synthetic(&SyntheticSpec { size: 30, ..Default::default() }).unwrap();
    let a = synthesize_find_examples(&data.corpus, 2, &mut ChaCha8Rng::seed_from_u64(4));
    let b = synthesize_find_examples(&data.corpus, 2, &mut ChaCha8Rng::seed_from_u64(4));
    assert_eq!(a, b);
    assert!(a.len() >= data.corpus.len());
    for ex in &a {
        let marked: usize = phrase_occurrences(&ex.x, &ex.query).iter().map(|s| s.len()).sum();
        let ones = ex.target.iter().filter(|&&t| t == 1.0).count();
        assert!(ones <= marked && (ones > 0) == (marked > 0));
    }
}

#[test]
fn loss_gradients_match_finite_differences() {
    let fx = matcher_fixture(1, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let mut m = fx.model.clone();
        let p0 = random_matcher_params(&mut rng, m.dim(), m.num_windows());
        m.set_params(&p0);
        let at = |p: &[f64]| {
            let mut m = fx.model.clone();
            m.set_params(p);
            m
        };
        let (_, g) = l_find(&fx.find, &m).unwrap();
        assert!(fd_rel_error(|p| l_find(&fx.find, &at(p)).unwrap().0, &p0, &g.flat(), 1e-6) < 1e-4);
        let (_, g) = l_sim_mean(&fx.sims, &m, 0.8);
        assert!(fd_rel_error(|p| l_sim_mean(&fx.sims, &at(p), 0.8).0, &p0, &g.flat(), 1e-6) < 1e-4);
        let (_, g) = l_string(&fx.find, &fx.sims, &m, 2.5, 0.8).unwrap();
        let err = fd_rel_error(|p| l_string(&fx.find, &fx.sims, &at(p), 2.5, 0.8).unwrap().0, &p0, &g.flat(), 1e-6);
        assert!(err < 1e-4, "{err}");
    }
}

#[test]
fn l_find_of_a_perfect_matcher_is_near_zero() {
    let mut m = MatcherModel::new(basis_table(&["a", "b", "c"]), 1);
    m.v = vec![1.0];
    let x = Instance::from_text("x", "a b c").unwrap();
    let ex = exptree::matcher::FindExample { x, query: words("b"), target: vec![0.0, 1.0, 0.0] };
    let (l, _) = l_find(&[ex], &m).unwrap();
    assert!(l < 1e-6, "{l}");
}

#[test]
fn zero_epochs_leave_the_model_unchanged() {
    let fx = matcher_fixture(5, 2);
    let mut m = fx.model.clone();
    let corpus: Vec<Instance> = fx.find.iter().map(|e| e.x.clone()).collect();
    let report = pretrain(&mut m, &corpus, &fx.sims, &PretrainConfig { epochs: 0, ..Default::default() }).unwrap();
    assert!(report.epoch_losses.is_empty());
    assert_eq!(m.params(), fx.model.params());
}

#[test]
fn pretraining_finds_extraction_sites_and_groups_classes() {
    let data = generate_synthetic(&SyntheticSpec { seed: 2, size: 300, ..Default::default() }).unwrap();
    let mut m = MatcherModel::new(Arc::new(data.embeddings.clone()), 2);
    let queries: Vec<(Vec<String>, String)> =
        data.queries.iter().map(|q| (vec![q.query.clone()], q.class.clone())).collect();
    let sims = class_sets(&queries);
    let report = pretrain(&mut m, &data.corpus, &sims, &PretrainConfig { seed: 2, ..Default::default() }).unwrap();
    assert!(report.epoch_losses.last() < report.epoch_losses.first());

    let held = generate_synthetic(&SyntheticSpec { seed: 77, size: 200, ..Default::default() }).unwrap();
    let examples = synthesize_find_examples(&held.corpus, 2, &mut ChaCha8Rng::seed_from_u64(1));
    let mut hits = 0;
    let mut total = 0;
    for ex in examples.iter().filter(|e| e.target.contains(&1.0)) {
        let s = m.string_match_scores(&ex.x, &ex.query).unwrap().0;
        let top = (0..s.len()).fold(0, |b, i| if s[i] > s[b] { i } else { b });
        hits += (ex.target[top] == 1.0) as usize;
        total += 1;
    }
    let rate = hits as f64 / total as f64;
    assert!(rate >= 0.9, "extraction-site accuracy {rate}");

    let (mut same, mut ns, mut cross, mut nc) = (0.0, 0, 0.0, 0);
    for (i, (a, ca)) in queries.iter().enumerate() {
        for (b, cb) in &queries[i + 1..] {
            let c = m.query_cosine(a, b);
            if ca == cb {
                same += c;
                ns += 1;
            } else {
                cross += c;
                nc += 1;
            }
        }
    }
    assert!(same / ns as f64 > cross / nc as f64);
}

#[test]
fn synonymous_phrases_align() {
    // "chief" and "director" share one direction and differ in another
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut t = EmbeddingTable::new(6);
    t.insert("chief", &[r, r, 0.0, 0.0, 0.0, 0.0]).unwrap();
    t.insert("director", &[r, 0.0, r, 0.0, 0.0, 0.0]).unwrap();
    t.insert("executive", &unit(6, 3)).unwrap();
    t.insert("of", &unit(6, 4)).unwrap();
    t.insert("lives", &unit(6, 5)).unwrap();
    let mut m = MatcherModel::new(Arc::new(t), 3);
    // only the trigram window centred on the token
    m.v = vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
    let query = words("chief executive of");
    let x = Instance::from_text("x", "SUBJ-A is executive director of OBJ-B").unwrap();
    assert!(phrase_occurrences(&x, &query).is_empty());
    let s = m.string_match_scores(&x, &query).unwrap().0;
    assert!(s[3] > 0.8, "{s:?}");
    let y = Instance::from_text("y", "SUBJ-A lives near OBJ-B").unwrap();
    assert!(m.string_match_scores(&y, &query).unwrap().0.iter().all(|&v| v < 0.1));
}
