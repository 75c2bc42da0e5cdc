use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::loss::{l_string, FindExample, QueryClassSets};
use super::MatcherModel;
use crate::error::{Error, Result};
use crate::logic::{phrase_occurrences, Instance};
use crate::optim::Adagrad;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PretrainConfig {
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub gamma: f64,
    pub tau: f64,
    pub seed: u64,
}

impl Default for PretrainConfig {
    fn default() -> Self {
        PretrainConfig { epochs: 10, lr: 0.1, batch_size: 100, gamma: 2.5, tau: 0.8, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PretrainReport {
    /// Mean batch `L_string` per epoch.
    pub epoch_losses: Vec<f64>,
}

impl PretrainReport {
    pub fn best(&self) -> Option<f64> {
        self.epoch_losses.iter().copied().reduce(f64::min)
    }
}

fn target_for(x: &Instance, query: &[String]) -> Vec<f64> {
    let mut t = vec![0.0; x.len()];
    for s in phrase_occurrences(x, query) {
        t[s.start..s.end].iter_mut().for_each(|v| *v = 1.0);
    }
    t
}

/// One positive per sentence (a random span of `1..=max_span` tokens, every
/// exact occurrence marked) and, when one can be found, one negative: the same
/// query against a different sentence that does not contain it.
pub fn synthesize_find_examples(corpus: &[Instance], max_span: usize, rng: &mut impl Rng) -> Vec<FindExample> {
    let mut out = Vec::with_capacity(corpus.len() * 2);
    for (i, x) in corpus.iter().enumerate() {
        if x.is_empty() {
            continue;
        }
        let len = rng.gen_range(1..=max_span.min(x.len()));
        let start = rng.gen_range(0..=x.len() - len);
        let query = x.lower()[start..start + len].to_vec();
        out.push(FindExample { x: x.clone(), target: target_for(x, &query), query: query.clone() });
        if corpus.len() < 2 {
            continue;
        }
        for _ in 0..10 {
            let j = rng.gen_range(0..corpus.len());
            if j != i && phrase_occurrences(&corpus[j], &query).is_empty() && !corpus[j].is_empty() {
                let x2 = &corpus[j];
                out.push(FindExample { x: x2.clone(), target: vec![0.0; x2.len()], query });
                break;
            }
        }
    }
    out
}

/// Pretrains `d` and `v` on synthesized find examples plus the contrastive
/// term over labeling-function queries, with Adagrad.
pub fn pretrain(
    model: &mut MatcherModel,
    corpus: &[Instance],
    sims: &[QueryClassSets],
    cfg: &PretrainConfig,
) -> Result<PretrainReport> {
    if corpus.is_empty() {
        return Err(Error::Config("pretraining needs a non-empty corpus".into()));
    }
    if cfg.batch_size == 0 {
        return Err(Error::Config("batch_size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut opt = Adagrad::new(cfg.lr, model.dim() + model.num_windows());
    let mut report = PretrainReport::default();
    for epoch in 0..cfg.epochs {
        let mut examples = synthesize_find_examples(corpus, model.max_window(), &mut rng);
        examples.shuffle(&mut rng);
        let mut sum = 0.0;
        let mut batches = 0;
        for batch in examples.chunks(cfg.batch_size) {
            let (loss, grad) = l_string(batch, sims, model, cfg.gamma, cfg.tau)?;
            let mut p = model.params();
            opt.step(&mut p, &grad.flat());
            model.set_params(&p);
            sum += loss;
            batches += 1;
        }
        let mean = sum / batches.max(1) as f64;
        log::debug!("pretrain epoch {epoch}: L_string {mean:.6}");
        report.epoch_losses.push(mean);
    }
    Ok(report)
}
