//! Browser bindings for the explanation parser and soft executor.
//!
//! Every function returns a JSON string; failures come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use exptree::ccg::{score_candidates, Lexicon, ParserModel};
use exptree::exec::{soft_trace, ExactMatcher, SoftConfig};
use exptree::logic::{exec_strict, sexpr, Instance};
use exptree::pipeline::normalize_scores;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn error(msg: impl ToString) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

/// Candidate parses of an explanation with their probabilities under an
/// untrained ranker, in serialized-form order.
#[wasm_bindgen]
pub fn parse_explanation(text: &str) -> String {
    let model = ParserModel::new(std::sync::Arc::new(Lexicon::default()));
    match model.parse(text) {
        Ok(cands) => {
            let p = score_candidates(&model.theta, &cands);
            let list: Vec<Value> = cands
                .iter()
                .zip(p)
                .map(|(c, p)| json!({ "sexpr": c.sexpr, "prob": p, "derivation": c.derivation.to_string() }))
                .collect();
            json!({ "candidates": list }).to_string()
        }
        Err(e) => error(e),
    }
}

/// Soft and strict execution of a form on a sentence with exact keyword
/// matching, plus the per-node trace.
#[wasm_bindgen]
pub fn soft_execute(form: &str, sentence: &str, mu: f64, slack: usize) -> String {
    let run = || -> exptree::Result<String> {
        let e = sexpr::parse(form)?;
        exptree::logic::check_form(&e)?;
        let x = Instance::from_text("demo", sentence)?;
        let cfg = SoftConfig { mu, slack_width: slack };
        cfg.validate()?;
        let strict = exec_strict(&e, &x)?;
        let (score, trace) = soft_trace(&e, &x, &ExactMatcher, &cfg)?;
        let nodes: Vec<Value> = trace
            .iter()
            .map(|n| json!({ "path": n.path, "expr": n.expr, "score": n.score, "per_token": n.per_token }))
            .collect();
        Ok(json!({ "tokens": x.tokens(), "score": score, "strict": strict, "trace": nodes }).to_string())
    };
    run().unwrap_or_else(error)
}

/// Temperature softmax over comma- or space-separated scores.
#[wasm_bindgen]
pub fn normalize_weights(scores: &str, theta_t: f64) -> String {
    let parsed: Result<Vec<f64>, _> = scores
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::parse::<f64>)
        .collect();
    match parsed {
        Ok(u) if u.is_empty() => error("no scores given"),
        Ok(u) if theta_t.is_nan() || theta_t < 0.0 => {
            error(format!("theta_t must be non-negative, got {theta_t} for {} scores", u.len()))
        }
        Ok(u) => json!({ "omega": normalize_scores(&u, theta_t) }).to_string(),
        Err(e) => error(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_returns_candidates() {
        let v: Value = serde_json::from_str(&parse_explanation("the word 'fair' precedes OBJECT")).unwrap();
        assert!(!v["candidates"].as_array().unwrap().is_empty());
        let v: Value = serde_json::from_str(&parse_explanation("")).unwrap();
        assert!(v["error"].is_string());
    }

    #[test]
    fn soft_execute_scores_slack() {
        let f = r#"(Is (Word "fair") (Direct (Left "price")))"#;
        let v: Value = serde_json::from_str(&soft_execute(f, "a fair enough price", 0.5, 1)).unwrap();
        assert_eq!(v["score"].as_f64(), Some(0.5));
        assert_eq!(v["strict"].as_bool(), Some(false));
    }

    #[test]
    fn weights_sum_to_one() {
        let v: Value = serde_json::from_str(&normalize_weights("0.6931471805599453, 0", 1.0)).unwrap();
        let w: Vec<f64> = v["omega"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-12 && (w[1] - 1.0 / 3.0).abs() < 1e-12);
    }
}
