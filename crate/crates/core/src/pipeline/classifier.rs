use std::sync::Arc;

use crate::logic::{AnchorRole, Instance};
use crate::matcher::EmbeddingTable;
use crate::optim::Adagrad;

/// Probability floor mixed into every prediction.
pub const PROB_SMOOTHING: f64 = 1e-12;

/// A downstream classifier trained on weighted examples.
pub trait Classifier: Send + Sync {
    fn num_labels(&self) -> usize;

    /// Smoothed class distribution; sums to one and is strictly positive.
    fn predict_proba(&self, x: &Instance) -> Vec<f64>;

    /// `Σ_i w_i · -log p(y_i | x_i)` and its gradient. The log-probabilities
    /// are the unsmoothed ones, so the gradient is exact.
    fn weighted_nll(&self, batch: &[(&Instance, usize, f64)]) -> (f64, Vec<f64>);

    fn params(&self) -> &[f64];
    fn set_params(&mut self, p: &[f64]);

    fn predict(&self, x: &Instance) -> usize {
        let p = self.predict_proba(x);
        let mut best = 0;
        for (k, &v) in p.iter().enumerate() {
            if v > p[best] {
                best = k;
            }
        }
        best
    }
}

/// Multinomial logistic regression over
/// `[sentence mean embedding; subject, object and term span means; 1]`.
/// Missing anchors contribute zeros.
#[derive(Debug, Clone)]
pub struct LogisticRegression {
    emb: Arc<EmbeddingTable>,
    k: usize,
    f: usize,
    w: Vec<f64>,
}

fn log_softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
    z.iter().map(|v| v - lse).collect()
}

impl LogisticRegression {
    pub fn new(emb: Arc<EmbeddingTable>, num_labels: usize) -> LogisticRegression {
        let f = 4 * emb.dim() + 1;
        LogisticRegression { emb, k: num_labels, f, w: vec![0.0; num_labels * f] }
    }

    pub fn num_features(&self) -> usize {
        self.f
    }

    fn mean_into(&self, toks: &[String], out: &mut [f64]) {
        let mut n = 0usize;
        for t in toks {
            n += 1;
            if let Some(v) = self.emb.get(t) {
                out.iter_mut().zip(v).for_each(|(o, x)| *o += x);
            }
        }
        if n > 0 {
            out.iter_mut().for_each(|o| *o /= n as f64);
        }
    }

    pub fn features(&self, x: &Instance) -> Vec<f64> {
        let d = self.emb.dim();
        let mut out = vec![0.0; self.f];
        self.mean_into(x.lower(), &mut out[..d]);
        for (slot, role) in [AnchorRole::Subject, AnchorRole::Object, AnchorRole::Term].into_iter().enumerate() {
            if let Ok(s) = x.anchor(role) {
                let base = (slot + 1) * d;
                self.mean_into(&x.lower()[s.start..s.end], &mut out[base..base + d]);
            }
        }
        out[self.f - 1] = 1.0;
        out
    }

    fn logits(&self, feats: &[f64]) -> Vec<f64> {
        (0..self.k).map(|c| self.w[c * self.f..(c + 1) * self.f].iter().zip(feats).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn log_proba(&self, x: &Instance) -> Vec<f64> {
        log_softmax(&self.logits(&self.features(x)))
    }
}

impl Classifier for LogisticRegression {
    fn num_labels(&self) -> usize {
        self.k
    }

    fn predict_proba(&self, x: &Instance) -> Vec<f64> {
        let k = self.k as f64;
        self.log_proba(x).into_iter().map(|l| (l.exp() + PROB_SMOOTHING) / (1.0 + k * PROB_SMOOTHING)).collect()
    }

    fn weighted_nll(&self, batch: &[(&Instance, usize, f64)]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.w.len()];
        let mut loss = 0.0;
        for &(x, y, wt) in batch {
            if wt == 0.0 {
                continue;
            }
            let feats = self.features(x);
            let lp = log_softmax(&self.logits(&feats));
            loss -= wt * lp[y];
            for (c, l) in lp.iter().enumerate() {
                let g = wt * (l.exp() - if c == y { 1.0 } else { 0.0 });
                if g != 0.0 {
                    grad[c * self.f..(c + 1) * self.f].iter_mut().zip(&feats).for_each(|(a, b)| *a += g * b);
                }
            }
        }
        (loss, grad)
    }

    fn params(&self) -> &[f64] {
        &self.w
    }

    fn set_params(&mut self, p: &[f64]) {
        self.w.copy_from_slice(p);
    }
}

/// Full-batch weighted training with Adagrad. Examples are `(x, label)`;
/// the loss is `Σ w_i nll_i`.
pub fn fit_classifier<C: Classifier + ?Sized>(
    clf: &mut C,
    data: &[(&Instance, usize)],
    weights: &[f64],
    epochs: usize,
    lr: f64,
) -> Vec<f64> {
    assert_eq!(data.len(), weights.len());
    let batch: Vec<(&Instance, usize, f64)> = data.iter().zip(weights).map(|(&(x, y), &w)| (x, y, w)).collect();
    let mut opt = Adagrad::new(lr, clf.params().len());
    let mut losses = Vec::with_capacity(epochs);
    for _ in 0..epochs {
        let (l, g) = clf.weighted_nll(&batch);
        let mut p = clf.params().to_vec();
        opt.step(&mut p, &g);
        clf.set_params(&p);
        losses.push(l);
    }
    losses
}
