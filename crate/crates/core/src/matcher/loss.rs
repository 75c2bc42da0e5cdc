use std::collections::BTreeMap;

use super::model::{scaled_cosine, MatcherGrad, MatcherModel};
use crate::error::Result;
use crate::logic::Instance;

/// Probabilities are clamped to `[EPS, 1 - EPS]` inside the cross-entropy.
pub const BCE_EPS: f64 = 1e-7;

/// A keyword-finding example: which tokens of `x` the query was taken from.
#[derive(Debug, Clone, PartialEq)]
pub struct FindExample {
    pub x: Instance,
    pub query: Vec<String>,
    pub target: Vec<f64>,
}

/// A query with same-class and other-class queries for the contrastive term.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryClassSets {
    pub query: Vec<String>,
    pub positives: Vec<Vec<String>>,
    pub negatives: Vec<Vec<String>>,
}

/// Builds contrastive sets from `(query, class)` pairs. Duplicate queries of
/// one class are merged; a query's positives are the other queries of its class.
pub fn class_sets(queries: &[(Vec<String>, String)]) -> Vec<QueryClassSets> {
    let mut by_class: BTreeMap<&str, Vec<&Vec<String>>> = BTreeMap::new();
    for (q, c) in queries {
        let v = by_class.entry(c.as_str()).or_default();
        if !v.contains(&q) {
            v.push(q);
        }
    }
    let mut out = Vec::new();
    for (class, qs) in &by_class {
        for q in qs {
            let positives = qs.iter().filter(|p| p != &q).map(|p| (*p).clone()).collect();
            let negatives = by_class
                .iter()
                .filter(|(c, _)| c != &class)
                .flat_map(|(_, v)| v.iter().filter(|n| n != &q).map(|n| (*n).clone()))
                .collect();
            out.push(QueryClassSets { query: (*q).clone(), positives, negatives });
        }
    }
    out
}

/// Mean binary cross-entropy of clamped predictions.
pub fn bce_mean(pred: &[f64], target: &[f64]) -> f64 {
    assert_eq!(pred.len(), target.len());
    if pred.is_empty() {
        return 0.0;
    }
    let s: f64 = pred
        .iter()
        .zip(target)
        .map(|(&p, &k)| {
            let p = p.clamp(BCE_EPS, 1.0 - BCE_EPS);
            -(k * p.ln() + (1.0 - k) * (1.0 - p).ln())
        })
        .sum();
    s / pred.len() as f64
}

fn bce_grad(s: f64, k: f64) -> f64 {
    if s <= BCE_EPS || s >= 1.0 - BCE_EPS {
        return 0.0;
    }
    -k / s + (1.0 - k) / (1.0 - s)
}

/// Find loss: mean over examples of the per-token mean cross-entropy.
pub fn l_find(batch: &[FindExample], model: &MatcherModel) -> Result<(f64, MatcherGrad)> {
    let mut grad = MatcherGrad::zeros(model.dim(), model.num_windows());
    if batch.is_empty() {
        return Ok((0.0, grad));
    }
    let mut total = 0.0;
    let scale = 1.0 / batch.len() as f64;
    for ex in batch {
        let cache = model.forward(&ex.x, &ex.query)?;
        let s = cache.scores();
        total += bce_mean(&s, &ex.target);
        let n = s.len().max(1) as f64;
        let dl: Vec<f64> = s.iter().zip(&ex.target).map(|(&s, &k)| scale * bce_grad(s, k) / n).collect();
        model.backward(&cache, &dl, &mut grad);
    }
    Ok((total * scale, grad))
}

/// Contrastive value from precomputed cosines: the hardest same-class query
/// must reach `tau`, the most similar other-class query must fall to 0.
pub fn sim_hinge(pos_cos: &[f64], neg_cos: &[f64], tau: f64) -> f64 {
    let p = pos_cos.iter().map(|c| (tau - c).max(0.0).powi(2)).fold(0.0, f64::max);
    let n = neg_cos.iter().map(|c| c.max(0.0).powi(2)).fold(0.0, f64::max);
    p + n
}

/// Contrastive loss for one query, with a subgradient through both maxima.
pub fn l_sim(item: &QueryClassSets, model: &MatcherModel, tau: f64) -> (f64, MatcherGrad) {
    let mut grad = MatcherGrad::zeros(model.dim(), model.num_windows());
    let zq = model.encode_query(&item.query);
    let mut loss = 0.0;

    let mut hardest: Option<(f64, Vec<f64>)> = None;
    for p in &item.positives {
        let (c, dc) = scaled_cosine(&zq, &model.encode_query(p), &model.d);
        let h = (tau - c).max(0.0);
        if h > 0.0 && hardest.as_ref().is_none_or(|(best, _)| h > *best) {
            hardest = Some((h, dc));
        }
    }
    if let Some((h, dc)) = hardest {
        loss += h * h;
        grad.d.iter_mut().zip(&dc).for_each(|(g, d)| *g += -2.0 * h * d);
    }

    let mut closest: Option<(f64, Vec<f64>)> = None;
    for q in &item.negatives {
        let (c, dc) = scaled_cosine(&zq, &model.encode_query(q), &model.d);
        if c > 0.0 && closest.as_ref().is_none_or(|(best, _)| c > *best) {
            closest = Some((c, dc));
        }
    }
    if let Some((c, dc)) = closest {
        loss += c * c;
        grad.d.iter_mut().zip(&dc).for_each(|(g, d)| *g += 2.0 * c * d);
    }
    (loss, grad)
}

/// Mean contrastive loss over query items.
pub fn l_sim_mean(items: &[QueryClassSets], model: &MatcherModel, tau: f64) -> (f64, MatcherGrad) {
    let mut grad = MatcherGrad::zeros(model.dim(), model.num_windows());
    if items.is_empty() {
        return (0.0, grad);
    }
    let k = 1.0 / items.len() as f64;
    let mut total = 0.0;
    for it in items {
        let (l, g) = l_sim(it, model, tau);
        total += l;
        grad.add_scaled(&g, k);
    }
    (total * k, grad)
}

/// `L_find + gamma * L_sim`.
pub fn l_string(
    find: &[FindExample],
    sims: &[QueryClassSets],
    model: &MatcherModel,
    gamma: f64,
    tau: f64,
) -> Result<(f64, MatcherGrad)> {
    let (lf, mut g) = l_find(find, model)?;
    if gamma == 0.0 {
        return Ok((lf, g));
    }
    let (ls, gs) = l_sim_mean(sims, model, tau);
    g.add_scaled(&gs, gamma);
    Ok((lf + gamma * ls, g))
}
