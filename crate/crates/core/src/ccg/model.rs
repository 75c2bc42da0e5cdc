use std::sync::Arc;

use super::chart::{chart_parse, ParseCandidate, NUM_FEATURES};
use super::Lexicon;
use crate::error::{Error, Result};
use crate::logic::{exec_strict, Instance, LogicalForm};

/// An explanation paired with its label and the sentence it explains.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedExplanation {
    pub id: String,
    pub text: String,
    pub label: String,
    pub source: Instance,
}

/// Log-linear ranker `P(f | e) ∝ exp(theta · phi(f))` over chart parses.
#[derive(Debug, Clone)]
pub struct ParserModel {
    pub theta: Vec<f64>,
    lexicon: Arc<Lexicon>,
}

/// `softmax(theta · phi)` over candidates.
pub fn score_candidates(theta: &[f64], candidates: &[ParseCandidate]) -> Vec<f64> {
    let feats: Vec<Vec<f64>> = candidates.iter().map(ParseCandidate::phi).collect();
    softmax_scores(theta, &feats)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn softmax_scores(theta: &[f64], feats: &[Vec<f64>]) -> Vec<f64> {
    let s: Vec<f64> = feats.iter().map(|f| dot(theta, f)).collect();
    let m = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = s.iter().map(|v| (v - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

impl ParserModel {
    pub fn new(lexicon: Arc<Lexicon>) -> ParserModel {
        ParserModel { theta: vec![0.0; NUM_FEATURES], lexicon }
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn parse(&self, text: &str) -> Result<Vec<ParseCandidate>> {
        chart_parse(text, &self.lexicon)
    }

    /// Most probable parse with its probability. Candidates arrive sorted by
    /// serialized form and only a strictly larger probability displaces the
    /// current best, so ties go to the lexicographically first form.
    pub fn best_parse(&self, text: &str) -> Result<(ParseCandidate, f64)> {
        let cands = self.parse(text)?;
        let p = score_candidates(&self.theta, &cands);
        let mut best = 0;
        for i in 1..p.len() {
            if p[i] > p[best] {
                best = i;
            }
        }
        let prob = p[best];
        Ok((cands.into_iter().nth(best).expect("non-empty"), prob))
    }

    /// Compiles an explanation into a labeling function named `id`.
    pub fn compile(&self, id: &str, text: &str, label: &str) -> Result<LogicalForm> {
        let (c, _) = self.best_parse(text)?;
        LogicalForm::new(id, c.form, label)
    }
}

/// Candidate features of one training explanation and which candidates
/// strict-match its source sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedExample {
    pub id: String,
    pub features: Vec<Vec<f64>>,
    pub consistent: Vec<bool>,
}

/// Why an explanation was left out of parser training.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub id: String,
    pub reason: String,
}

/// Parses every explanation and marks consistent candidates. All candidates
/// of an explanation carry its label, so consistency reduces to a strict
/// match against the source. Items with no parse or no consistent parse are
/// reported and skipped.
pub fn prepare(model: &ParserModel, items: &[AnnotatedExplanation]) -> (Vec<PreparedExample>, Vec<Skipped>) {
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    for it in items {
        let cands = match model.parse(&it.text) {
            Ok(c) => c,
            Err(e) => {
                skipped.push(Skipped { id: it.id.clone(), reason: e.to_string() });
                continue;
            }
        };
        let mut consistent = Vec::with_capacity(cands.len());
        let mut failure = None;
        for c in &cands {
            match exec_strict(&c.form, &it.source) {
                Ok(b) => consistent.push(b),
                Err(e) => {
                    consistent.push(false);
                    failure.get_or_insert(e.to_string());
                }
            }
        }
        if !consistent.iter().any(|&b| b) {
            let reason = match failure {
                Some(f) => format!("no consistent parse ({f})"),
                None => "no consistent parse".to_string(),
            };
            skipped.push(Skipped { id: it.id.clone(), reason });
            continue;
        }
        out.push(PreparedExample {
            id: it.id.clone(),
            features: cands.iter().map(ParseCandidate::phi).collect(),
            consistent,
        });
    }
    (out, skipped)
}

/// Marginal log-likelihood of the consistent parses, `Σ_i log Σ_{f ok} P(f|e_i)`,
/// and its gradient `Σ_i (E_{P | ok}[phi] - E_P[phi])`.
pub fn parser_objective(theta: &[f64], data: &[PreparedExample]) -> (f64, Vec<f64>) {
    let mut value = 0.0;
    let mut grad = vec![0.0; theta.len()];
    for ex in data {
        let p = softmax_scores(theta, &ex.features);
        let mass: f64 = p.iter().zip(&ex.consistent).filter(|(_, &ok)| ok).map(|(p, _)| p).sum();
        value += mass.ln();
        for ((pk, f), &ok) in p.iter().zip(&ex.features).zip(&ex.consistent) {
            let w = if ok { pk / mass } else { 0.0 } - pk;
            for (g, x) in grad.iter_mut().zip(f) {
                *g += w * x;
            }
        }
    }
    (value, grad)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParserTrainReport {
    pub skipped: Vec<Skipped>,
    /// Objective before each update, then after the last one.
    pub objective: Vec<f64>,
    pub best_objective: f64,
}

/// Full-batch gradient ascent on [`parser_objective`]. Returns the best
/// parameters seen, so the reported best objective never decreases.
pub fn train_parser(
    model: &ParserModel,
    items: &[AnnotatedExplanation],
    epochs: usize,
    lr: f64,
) -> Result<(ParserModel, ParserTrainReport)> {
    if lr.is_nan() || lr <= 0.0 {
        return Err(Error::Config(format!("parser learning rate must be positive, got {lr}")));
    }
    let (data, skipped) = prepare(model, items);
    for s in &skipped {
        log::info!("parser training skips {}: {}", s.id, s.reason);
    }
    let mut theta = model.theta.clone();
    let (mut value, mut grad) = parser_objective(&theta, &data);
    let mut best = (value, theta.clone());
    let mut objective = vec![value];
    for _ in 0..epochs {
        if data.is_empty() {
            break;
        }
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t += lr * g;
        }
        (value, grad) = parser_objective(&theta, &data);
        objective.push(value);
        if value > best.0 {
            best = (value, theta.clone());
        }
    }
    let trained = ParserModel { theta: best.1, lexicon: model.lexicon.clone() };
    Ok((trained, ParserTrainReport { skipped, objective, best_objective: best.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cands(n: usize) -> Vec<ParseCandidate> {
        let lex = Lexicon::default();
        let mut c = chart_parse("the word 'a' appears", &lex).unwrap();
        c.truncate(1);
        (0..n).map(|_| c[0].clone()).collect()
    }

    #[test]
    fn softmax_examples() {
        assert_eq!(score_candidates(&[0.3; 6], &cands(1)), vec![1.0]);
        let p = score_candidates(&[0.0; 6], &cands(4));
        assert!(p.iter().all(|&x| (x - 0.25).abs() < 1e-15));
        let theta = [std::f64::consts::LN_2, 0.0, 0.0, 0.0, 0.0, 0.0];
        let p = softmax_scores(&theta, &[vec![1.0, 0., 0., 0., 0., 0.], vec![0.0; 6]]);
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-12 && (p[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_dataset_leaves_model() {
        let m = ParserModel::new(Arc::new(Lexicon::default()));
        let (t, r) = train_parser(&m, &[], 10, 0.1).unwrap();
        assert_eq!(t.theta, m.theta);
        assert_eq!(r.objective, vec![0.0]);
    }
}
