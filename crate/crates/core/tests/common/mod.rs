//! Random forms, instances and scorers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use exptree::exec::{ScoreSequence, StringMatcher};
use exptree::logic::{check_form, AnchorRole, Expr, Instance, Predicate as P, Span};
use exptree::Result;
use rand::Rng;

pub const VOCAB: &[&str] = &["a", "b", "c", "d"];

fn phrase(rng: &mut impl Rng) -> Expr {
    let n = if rng.gen_bool(0.8) { 1 } else { 2 };
    let words: Vec<&str> = (0..n).map(|_| VOCAB[rng.gen_range(0..VOCAB.len())]).collect();
    Expr::str(words.join(" "))
}

fn anchor(rng: &mut impl Rng) -> Expr {
    Expr::leaf(if rng.gen_bool(0.5) { P::ArgX } else { P::ArgY })
}

fn loc(rng: &mut impl Rng) -> Expr {
    if rng.gen_bool(0.6) {
        anchor(rng)
    } else {
        phrase(rng)
    }
}

fn int(rng: &mut impl Rng) -> Expr {
    Expr::Int(rng.gen_range(0..5))
}

fn seq(rng: &mut impl Rng) -> Expr {
    match rng.gen_range(0..4) {
        0 | 1 => Expr::node(P::Word, vec![phrase(rng)]),
        2 => Expr::node(P::Contains, vec![anchor(rng), phrase(rng)]),
        _ => Expr::node(P::Link, vec![phrase(rng), loc(rng), loc(rng)]),
    }
}

fn dir_mask(rng: &mut impl Rng) -> Expr {
    Expr::node(if rng.gen_bool(0.5) { P::Left } else { P::Right }, vec![loc(rng)])
}

const COUNTS: [P; 5] = [P::AtMost, P::AtLeast, P::MoreThan, P::LessThan, P::Equals];

fn mask(rng: &mut impl Rng) -> Expr {
    match rng.gen_range(0..5) {
        0 => dir_mask(rng),
        1 => Expr::node(P::Between, vec![loc(rng), loc(rng)]),
        2 => Expr::node(P::Within, vec![loc(rng), int(rng)]),
        3 => Expr::node(P::Direct, vec![dir_mask(rng)]),
        _ => Expr::node(COUNTS[rng.gen_range(0..5)], vec![dir_mask(rng), int(rng)]),
    }
}

fn clause(rng: &mut impl Rng) -> Expr {
    match rng.gen_range(0..6) {
        0..=2 => {
            let target = if rng.gen_bool(0.8) { seq(rng) } else { anchor(rng) };
            Expr::node(P::Is, vec![target, mask(rng)])
        }
        3 | 4 => Expr::node(P::Occur, vec![seq(rng)]),
        _ => {
            let m = if rng.gen_bool(0.5) { dir_mask(rng) } else { Expr::node(P::Between, vec![loc(rng), loc(rng)]) };
            Expr::node(COUNTS[rng.gen_range(0..5)], vec![Expr::node(P::NumberOf, vec![m]), int(rng)])
        }
    }
}

fn bool_expr(rng: &mut impl Rng, depth: usize, negation: bool) -> Expr {
    if depth == 0 || rng.gen_bool(0.4) {
        return clause(rng);
    }
    let ops: &[P] = if negation {
        &[P::And, P::Or, P::Not, P::Because, P::Separator]
    } else {
        &[P::And, P::Or, P::Because, P::Separator]
    };
    match ops[rng.gen_range(0..ops.len())] {
        P::Not => Expr::node(P::Not, vec![bool_expr(rng, depth - 1, negation)]),
        P::Because => Expr::node(P::Because, vec![bool_expr(rng, depth - 1, negation)]),
        op => Expr::node(op, vec![bool_expr(rng, depth - 1, negation), bool_expr(rng, depth - 1, negation)]),
    }
}

/// A random form that passes validation.
pub fn random_form(rng: &mut impl Rng, depth: usize, negation: bool) -> Expr {
    loop {
        let e = bool_expr(rng, depth, negation);
        if check_form(&e).is_ok() {
            return e;
        }
    }
}

/// A short sentence over [`VOCAB`] with one-token subject and object anchors.
pub fn random_instance(rng: &mut impl Rng, id: &str) -> Instance {
    let n = rng.gen_range(2..10);
    let mut tokens: Vec<String> = (0..n).map(|_| VOCAB[rng.gen_range(0..VOCAB.len())].to_string()).collect();
    let s = rng.gen_range(0..=tokens.len());
    tokens.insert(s, "SUBJ-A".into());
    let o = rng.gen_range(0..=tokens.len());
    tokens.insert(o, "OBJ-B".into());
    let s = if o <= s { s + 1 } else { s };
    let anchors =
        BTreeMap::from([(AnchorRole::Subject, Span::new(s, s + 1)), (AnchorRole::Object, Span::new(o, o + 1))]);
    Instance::new(id, tokens, anchors).unwrap()
}

/// Scores every token with a fixed pseudo-random value per (query, token),
/// raised to at least `floor`.
#[derive(Debug, Clone)]
pub struct TableMatcher {
    pub seed: u64,
    pub floor: f64,
}

impl TableMatcher {
    fn value(&self, query: &[String], token: &str) -> f64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        (self.seed, query, token).hash(&mut h);
        let v = (h.finish() % 1_000_000) as f64 / 1_000_000.0;
        v.max(self.floor)
    }
}

impl StringMatcher for TableMatcher {
    fn string_match_scores(&self, x: &Instance, query: &[String]) -> Result<ScoreSequence> {
        Ok(ScoreSequence(x.lower().iter().map(|t| self.value(query, t)).collect()))
    }
}

/// Central-difference gradient of `f` at `x`.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], eps: f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            p[i] = x[i] + eps;
            let up = f(&p);
            p[i] = x[i] - eps;
            let down = f(&p);
            p[i] = x[i];
            (up - down) / (2.0 * eps)
        })
        .collect()
}

/// `|g - fd| / max(|g|, |fd|)` in the Euclidean norm; 0 when both vanish.
pub fn rel_error(g: &[f64], fd: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = g.iter().zip(fd).map(|(a, b)| a - b).collect();
    let scale = norm(g).max(norm(fd));
    if scale == 0.0 {
        0.0
    } else {
        norm(&diff) / scale
    }
}

pub fn fd_rel_error(f: impl Fn(&[f64]) -> f64, x: &[f64], grad: &[f64], eps: f64) -> f64 {
    rel_error(grad, &fd_gradient(f, x, eps))
}

/// A small synthetic corpus with a matcher, find examples and query class
/// sets for gradient checks.
pub struct MatcherFixture {
    pub model: exptree::matcher::MatcherModel,
    pub find: Vec<exptree::matcher::FindExample>,
    pub sims: Vec<exptree::matcher::QueryClassSets>,
}

pub fn matcher_fixture(seed: u64, max_window: usize) -> MatcherFixture {
    use exptree::io::{generate_synthetic, SyntheticSpec};
    use exptree::matcher::{class_sets, synthesize_find_examples, MatcherModel};
    use rand::SeedableRng;

    let spec = SyntheticSpec { seed, size: 12, dim: 8, ..Default::default() };
    let data = generate_synthetic(&spec).unwrap();
    let model = MatcherModel::new(std::sync::Arc::new(data.embeddings), max_window);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let find = synthesize_find_examples(&data.corpus, max_window, &mut rng);
    let queries: Vec<(Vec<String>, String)> =
        data.queries.iter().map(|q| (vec![q.query.clone()], q.class.clone())).collect();
    MatcherFixture { model, find, sims: class_sets(&queries) }
}

/// Random matcher parameters: `d` in `[0.5, 1.5]`, `v` in `[0.05, 0.4]`.
pub fn random_matcher_params(rng: &mut impl Rng, dim: usize, windows: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.5..1.5)).collect();
    p.extend((0..windows).map(|_| rng.gen_range(0.05..0.4)));
    p
}

/// Smallest distance of any raw token score to the clamp bounds 0 and 1.
/// Finite differences are only meaningful when this exceeds the step.
pub fn clamp_margin(model: &exptree::matcher::MatcherModel, find: &[exptree::matcher::FindExample]) -> f64 {
    find.iter()
        .flat_map(|ex| model.forward(&ex.x, &ex.query).unwrap().raw)
        .map(|r| r.abs().min((r - 1.0).abs()))
        .fold(f64::INFINITY, f64::min)
}

/// A lexicon where "p q" reads either as forward application (left of the
/// object) or, through a backward-applying `q`, as right of the object.
pub const TWO_READING_LEXICON: &str = "object\tNP\tArgY
p\t(S\\NP)/M\t\\m.\\x.(Is x m)
q\tM/NP\t\\y.(Left y)
q\t((S\\NP)\\((S\\NP)/M))/NP\t\\y.\\v.\\x.(v (Right y) x)
";

pub fn annotated(id: &str, text: &str, source: &str) -> exptree::ccg::AnnotatedExplanation {
    exptree::ccg::AnnotatedExplanation {
        id: id.into(),
        text: text.into(),
        label: "l".into(),
        source: Instance::from_text(format!("{id}-src"), source).unwrap(),
    }
}

/// `'w' p q object` over `w OBJ-X`: only the left-of-object reading holds.
pub fn two_reading_items() -> Vec<exptree::ccg::AnnotatedExplanation> {
    ["a", "b", "c", "d"]
        .iter()
        .enumerate()
        .map(|(i, w)| annotated(&format!("t{i}"), &format!("'{w}' p q object"), &format!("{w} OBJ-X")))
        .collect()
}

/// Default-lexicon explanations with both consistent and inconsistent parses.
pub fn ambiguous_items() -> Vec<exptree::ccg::AnnotatedExplanation> {
    vec![
        annotated("a", "'x' is between SUBJECT and OBJECT and SUBJECT contains 'a'", "SUBJ-A x OBJ-B a"),
        annotated("b", "SUBJECT contains 'univ'", "SUBJ-A univ"),
        annotated("c", "OBJECT contains 'inc'", "SUBJ-A works at OBJ-B inc"),
        annotated("d", "'x' appears before OBJECT or follows SUBJECT", "x OBJ-B SUBJ-A"),
    ]
}
