use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Prf {
    /// Precision and recall with a zero denominator count as 0, except that
    /// nothing predicted and nothing to find counts as perfect.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Prf {
        if tp + fp + fn_ == 0 {
            return Prf { precision: 1.0, recall: 1.0, f1: 1.0, tp, fp, fn_ };
        }
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        Prf { precision, recall, f1, tp, fp, fn_ }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    /// Micro-averaged over every class except the none label.
    pub micro: Prf,
    pub per_class: BTreeMap<String, Prf>,
    pub accuracy: f64,
    pub n: usize,
}

/// Scores id-aligned predictions against gold labels, treating `none_label`
/// as the negative class.
pub fn evaluate(
    pred: &BTreeMap<String, String>,
    gold: &BTreeMap<String, String>,
    none_label: &str,
) -> Result<Evaluation> {
    if let Some(id) = gold.keys().find(|k| !pred.contains_key(*k)) {
        return Err(Error::Config(format!("no prediction for gold id {id}")));
    }
    if let Some(id) = pred.keys().find(|k| !gold.contains_key(*k)) {
        return Err(Error::Config(format!("prediction for unknown id {id}")));
    }
    let classes: BTreeSet<&str> =
        gold.values().chain(pred.values()).map(String::as_str).filter(|&c| c != none_label).collect();
    let mut counts: BTreeMap<&str, (usize, usize, usize)> = classes.iter().map(|&c| (c, (0, 0, 0))).collect();
    let mut correct = 0;
    for (id, g) in gold {
        let p = &pred[id];
        if p == g {
            correct += 1;
            if g != none_label {
                counts.get_mut(g.as_str()).unwrap().0 += 1;
            }
            continue;
        }
        if p != none_label {
            counts.get_mut(p.as_str()).unwrap().1 += 1;
        }
        if g != none_label {
            counts.get_mut(g.as_str()).unwrap().2 += 1;
        }
    }
    let (tp, fp, fn_) = counts.values().fold((0, 0, 0), |a, c| (a.0 + c.0, a.1 + c.1, a.2 + c.2));
    Ok(Evaluation {
        micro: Prf::from_counts(tp, fp, fn_),
        per_class: counts.iter().map(|(c, &(a, b, d))| (c.to_string(), Prf::from_counts(a, b, d))).collect(),
        accuracy: if gold.is_empty() { 1.0 } else { correct as f64 / gold.len() as f64 },
        n: gold.len(),
    })
}
