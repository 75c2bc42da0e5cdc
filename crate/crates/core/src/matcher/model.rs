use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::encoder::{num_windows, windows, ContextEncoder, MeanEncoder};
use super::EmbeddingTable;
use crate::error::{Error, Result};
use crate::exec::{ScoreSequence, StringMatcher};
use crate::logic::Instance;

/// Gradient of a loss with respect to the matcher's trainable parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MatcherGrad {
    pub d: Vec<f64>,
    pub v: Vec<f64>,
}

impl MatcherGrad {
    pub fn zeros(dim: usize, nc: usize) -> MatcherGrad {
        MatcherGrad { d: vec![0.0; dim], v: vec![0.0; nc] }
    }

    pub fn add_scaled(&mut self, other: &MatcherGrad, k: f64) {
        self.d.iter_mut().zip(&other.d).for_each(|(a, b)| *a += k * b);
        self.v.iter_mut().zip(&other.v).for_each(|(a, b)| *a += k * b);
    }

    pub fn scale(&mut self, k: f64) {
        self.d.iter_mut().chain(self.v.iter_mut()).for_each(|a| *a *= k);
    }

    /// `d` followed by `v`, the layout used by [`MatcherModel::params`].
    pub fn flat(&self) -> Vec<f64> {
        self.d.iter().chain(&self.v).copied().collect()
    }
}

/// Cosine of `a ⊙ d` and `b ⊙ d`, and its gradient with respect to `d`.
/// Zero when either side vanishes.
pub fn scaled_cosine(a: &[f64], b: &[f64], d: &[f64]) -> (f64, Vec<f64>) {
    let (mut n, mut na, mut nb) = (0.0, 0.0, 0.0);
    for k in 0..d.len() {
        let d2 = d[k] * d[k];
        n += a[k] * b[k] * d2;
        na += a[k] * a[k] * d2;
        nb += b[k] * b[k] * d2;
    }
    if na <= 0.0 || nb <= 0.0 {
        return (0.0, vec![0.0; d.len()]);
    }
    let r = (na * nb).sqrt();
    let c = n / r;
    let g = (0..d.len())
        .map(|k| 2.0 * d[k] * (a[k] * b[k] / r - 0.5 * c * (a[k] * a[k] / na + b[k] * b[k] / nb)))
        .collect();
    (c, g)
}

/// Value-only form of [`scaled_cosine`].
pub fn scaled_cosine_value(a: &[f64], b: &[f64], d: &[f64]) -> f64 {
    let (mut n, mut na, mut nb) = (0.0, 0.0, 0.0);
    for k in 0..d.len() {
        let d2 = d[k] * d[k];
        n += a[k] * b[k] * d2;
        na += a[k] * a[k] * d2;
        nb += b[k] * b[k] * d2;
    }
    if na <= 0.0 || nb <= 0.0 {
        0.0
    } else {
        n / (na * nb).sqrt()
    }
}

/// Forward state of one `(sentence, query)` scoring, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ScoreCache {
    contexts: Vec<Vec<Vec<f64>>>,
    query: Vec<f64>,
    /// Unclamped `M v` per token.
    pub raw: Vec<f64>,
}

impl ScoreCache {
    pub fn scores(&self) -> Vec<f64> {
        self.raw.iter().map(|r| r.clamp(0.0, 1.0)).collect()
    }
}

/// Trainable string matcher: sliding-window contexts compared to the query by
/// cosine under a learned diagonal rescaling `d`, mixed by window weights `v`.
#[derive(Debug, Clone)]
pub struct MatcherModel {
    emb: Arc<EmbeddingTable>,
    encoder: Arc<dyn ContextEncoder>,
    max_window: usize,
    pub d: Vec<f64>,
    pub v: Vec<f64>,
}

impl MatcherModel {
    /// Mean encoder, `d = 1`, `v` uniform on the simplex.
    pub fn new(emb: Arc<EmbeddingTable>, max_window: usize) -> MatcherModel {
        MatcherModel::with_encoder(emb, Arc::new(MeanEncoder), max_window)
    }

    pub fn with_encoder(emb: Arc<EmbeddingTable>, encoder: Arc<dyn ContextEncoder>, max_window: usize) -> MatcherModel {
        assert!(max_window >= 1, "max_window must be at least 1");
        let nc = num_windows(max_window);
        let dim = emb.dim();
        MatcherModel { emb, encoder, max_window, d: vec![1.0; dim], v: vec![1.0 / nc as f64; nc] }
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn num_windows(&self) -> usize {
        self.v.len()
    }

    pub fn max_window(&self) -> usize {
        self.max_window
    }

    pub fn embeddings(&self) -> &Arc<EmbeddingTable> {
        &self.emb
    }

    pub fn encoder(&self) -> &dyn ContextEncoder {
        self.encoder.as_ref()
    }

    /// `d` followed by `v`.
    pub fn params(&self) -> Vec<f64> {
        self.d.iter().chain(&self.v).copied().collect()
    }

    pub fn set_params(&mut self, p: &[f64]) {
        let dim = self.dim();
        assert_eq!(p.len(), dim + self.v.len());
        self.d.copy_from_slice(&p[..dim]);
        self.v.copy_from_slice(&p[dim..]);
    }

    /// One context vector per `(token, window)`.
    pub fn encode_contexts(&self, tokens: &[String]) -> Vec<Vec<Vec<f64>>> {
        let n = tokens.len();
        (0..n)
            .map(|i| {
                windows(n, i, self.max_window)
                    .into_iter()
                    .map(|(s, e)| self.encoder.encode(&self.emb, &tokens[s..e]))
                    .collect()
            })
            .collect()
    }

    pub fn encode_query(&self, query: &[String]) -> Vec<f64> {
        self.encoder.encode(&self.emb, query)
    }

    /// Cosine between two query phrases under the current `d`.
    pub fn query_cosine(&self, a: &[String], b: &[String]) -> f64 {
        scaled_cosine_value(&self.encode_query(a), &self.encode_query(b), &self.d)
    }

    pub fn forward(&self, x: &Instance, query: &[String]) -> Result<ScoreCache> {
        if query.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let q = self.encode_query(query);
        if q.iter().all(|&c| c == 0.0) {
            log::warn!("every token of query {:?} is out of vocabulary; scoring zeros", query.join(" "));
        }
        let contexts = self.encode_contexts(x.lower());
        let raw = contexts
            .iter()
            .map(|ctx| ctx.iter().zip(&self.v).map(|(z, v)| v * scaled_cosine_value(z, &q, &self.d)).sum())
            .collect();
        Ok(ScoreCache { contexts, query: q, raw })
    }

    /// Accumulates `dL/d(params)` given `dL/ds` for the clamped scores of `cache`.
    pub fn backward(&self, cache: &ScoreCache, dl_ds: &[f64], grad: &mut MatcherGrad) {
        for (i, ctx) in cache.contexts.iter().enumerate() {
            let g = dl_ds[i];
            if g == 0.0 || !(0.0..=1.0).contains(&cache.raw[i]) {
                continue;
            }
            for (j, z) in ctx.iter().enumerate() {
                let (c, dc) = scaled_cosine(z, &cache.query, &self.d);
                grad.v[j] += g * c;
                let vj = self.v[j];
                grad.d.iter_mut().zip(&dc).for_each(|(a, b)| *a += g * vj * b);
            }
        }
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint {
            version: Checkpoint::VERSION,
            encoder: self.encoder.id().to_string(),
            max_window: self.max_window,
            d: self.d.clone(),
            v: self.v.clone(),
        }
    }

    /// Restores a checkpoint written with the mean encoder.
    pub fn from_checkpoint(emb: Arc<EmbeddingTable>, ck: &Checkpoint) -> Result<MatcherModel> {
        if ck.version != Checkpoint::VERSION {
            return Err(Error::Config(format!("unsupported checkpoint version {}", ck.version)));
        }
        if ck.encoder != MeanEncoder.id() {
            return Err(Error::Config(format!("unknown encoder {:?}", ck.encoder)));
        }
        let mut m = MatcherModel::new(emb, ck.max_window);
        if ck.d.len() != m.dim() || ck.v.len() != m.num_windows() {
            return Err(Error::Config(format!(
                "checkpoint shapes d={} v={} do not fit dim={} windows={}",
                ck.d.len(),
                ck.v.len(),
                m.dim(),
                m.num_windows()
            )));
        }
        m.d.clone_from(&ck.d);
        m.v.clone_from(&ck.v);
        Ok(m)
    }
}

impl StringMatcher for MatcherModel {
    fn string_match_scores(&self, x: &Instance, query: &[String]) -> Result<ScoreSequence> {
        Ok(ScoreSequence(self.forward(x, query)?.scores()))
    }
}

/// Serialized matcher parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub encoder: String,
    pub max_window: usize,
    pub d: Vec<f64>,
    pub v: Vec<f64>,
}

impl Checkpoint {
    pub const VERSION: u32 = 1;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emb() -> Arc<EmbeddingTable> {
        let mut e = EmbeddingTable::new(3);
        e.insert("fair", &[1.0, 0.0, 0.0]).unwrap();
        e.insert("price", &[0.0, 1.0, 0.0]).unwrap();
        e.insert("good", &[0.0, 0.0, 1.0]).unwrap();
        Arc::new(e)
    }

    fn q(s: &str) -> Vec<String> {
        s.split(' ').map(String::from).collect()
    }

    #[test]
    fn identical_token_scores_one_with_unigram_weight() {
        let mut m = MatcherModel::new(emb(), 2);
        m.v = vec![1.0, 0.0, 0.0];
        let x = Instance::from_text("x", "a fair price").unwrap();
        let s = m.string_match_scores(&x, &q("fair")).unwrap().0;
        assert_eq!(s, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn orthogonal_query_scores_zero() {
        let m = MatcherModel::new(emb(), 2);
        let x = Instance::from_text("x", "fair price").unwrap();
        assert_eq!(m.string_match_scores(&x, &q("good")).unwrap().0, vec![0.0, 0.0]);
    }

    #[test]
    fn empty_and_oov_queries() {
        let m = MatcherModel::new(emb(), 2);
        let x = Instance::from_text("x", "fair price").unwrap();
        assert!(matches!(m.string_match_scores(&x, &[]), Err(Error::EmptyQuery)));
        assert_eq!(m.string_match_scores(&x, &q("zzz")).unwrap().0, vec![0.0, 0.0]);
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut m = MatcherModel::new(emb(), 2);
        m.d = vec![0.5, 2.0, 1.0];
        let ck = m.to_checkpoint();
        let json = serde_json::to_string(&ck).unwrap();
        let back: Checkpoint = serde_json::from_str(&json).unwrap();
        let m2 = MatcherModel::from_checkpoint(emb(), &back).unwrap();
        assert_eq!(m2.params(), m.params());
        let mut bad = back.clone();
        bad.encoder = "bilstm".into();
        assert!(MatcherModel::from_checkpoint(emb(), &bad).is_err());
    }
}
