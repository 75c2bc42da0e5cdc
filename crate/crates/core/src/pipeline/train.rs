use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::label::{normalize_scores, pseudo_label, PseudoLabel};
use super::loss::{labeled_loss, total_loss, unlabeled_loss};
use super::{Classifier, Partition};
use crate::error::{Error, Result};
use crate::exec::SoftConfig;
use crate::logic::{Instance, LabelSet, LogicalForm};
use crate::matcher::{l_string, synthesize_find_examples, MatcherModel, QueryClassSets};
use crate::optim::Adagrad;

/// Joint training settings. Missing keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub tau: f64,
    pub theta_t: f64,
    /// None-label gate in nats; unset means `0.4 ln K`.
    pub entropy_threshold: Option<f64>,
    /// Labeled batch size.
    pub n: usize,
    /// Unlabeled batch size.
    pub m: usize,
    /// Sentences drawn per iteration to synthesize find examples.
    pub find_batch: usize,
    pub lr: f64,
    pub matcher_lr: f64,
    pub iterations: usize,
    pub eval_every: usize,
    pub seed: u64,
    pub soft: SoftConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            alpha: 0.7,
            beta: 0.2,
            gamma: 2.5,
            tau: 0.8,
            theta_t: 1.0,
            entropy_threshold: None,
            n: 50,
            m: 100,
            find_batch: 50,
            lr: 0.5,
            matcher_lr: 0.1,
            iterations: 200,
            eval_every: 10,
            seed: 0,
            soft: SoftConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.alpha >= 0.0 && self.beta >= 0.0 && self.gamma >= 0.0) {
            return bad(format!(
                "loss weights must be non-negative (alpha {}, beta {}, gamma {})",
                self.alpha, self.beta, self.gamma
            ));
        }
        if self.theta_t.is_nan() || self.theta_t < 0.0 {
            return bad(format!("theta_t must be non-negative, got {}", self.theta_t));
        }
        if self.n == 0 || self.m == 0 {
            return bad("batch sizes n and m must be at least 1".into());
        }
        if [self.lr, self.matcher_lr].iter().any(|r| r.is_nan() || *r <= 0.0) {
            return bad("learning rates must be positive".into());
        }
        if !self.tau.is_finite() {
            return bad(format!("tau must be finite, got {}", self.tau));
        }
        if let Some(t) = self.entropy_threshold {
            if t.is_nan() || t < 0.0 {
                return bad(format!("entropy_threshold must be non-negative, got {t}"));
            }
        }
        if self.eval_every == 0 {
            return bad("eval_every must be at least 1".into());
        }
        self.soft.validate()
    }

    pub fn threshold_for(&self, num_labels: usize) -> f64 {
        self.entropy_threshold.unwrap_or(0.4 * (num_labels as f64).ln())
    }
}

/// One row of the training log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub iteration: usize,
    pub l_a: f64,
    pub l_u: f64,
    pub l_string: f64,
    pub l_total: f64,
    pub dev_acc: Option<f64>,
}

/// Everything the joint loop reads besides the models.
#[derive(Debug, Clone, Copy)]
pub struct JointData<'a> {
    pub partition: &'a Partition,
    pub forms: &'a [LogicalForm],
    pub labels: &'a LabelSet,
    pub sims: &'a [QueryClassSets],
    /// Held-out `(instance, label index)` pairs for the accuracy column.
    pub dev: &'a [(Instance, usize)],
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<C> {
    pub classifier: C,
    pub matcher: MatcherModel,
    pub metrics: Vec<MetricsRow>,
}

/// Fraction of `data` the classifier gets right; 0 for an empty set.
pub fn accuracy<C: Classifier + ?Sized>(clf: &C, data: &[(Instance, usize)]) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    data.iter().filter(|(x, y)| clf.predict(x) == *y).count() as f64 / data.len() as f64
}

fn draw(len: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if k >= len {
        (0..len).collect()
    } else {
        sample(rng, len, k).into_vec()
    }
}

fn label_batch(
    xs: &[&Instance],
    data: &JointData,
    matcher: &MatcherModel,
    clf: &dyn Classifier,
    cfg: &TrainConfig,
    threshold: f64,
) -> Result<Vec<PseudoLabel>> {
    let one = |x: &&Instance| pseudo_label(x, data.forms, data.labels, matcher, Some(clf), &cfg.soft, threshold);
    #[cfg(feature = "parallel")]
    let out = xs.par_iter().map(one).collect();
    #[cfg(not(feature = "parallel"))]
    let out = xs.iter().map(one).collect();
    out
}

/// Runs the joint loop for `cfg.iterations` steps.
///
/// Each step samples a labeled batch, an unlabeled batch and a set of
/// sentences for find examples from three independent seeded streams,
/// pseudo-labels the unlabeled batch with the current models, and takes one
/// Adagrad step on the classifier (`L_a + alpha L_u`) and one on the matcher
/// (`beta L_string`). Terms with zero weight are skipped and logged as 0.
pub fn train_joint<C: Classifier + Clone>(
    data: &JointData,
    mut matcher: MatcherModel,
    mut classifier: C,
    cfg: &TrainConfig,
) -> Result<TrainOutcome<C>> {
    cfg.validate()?;
    let part = data.partition;
    if part.labeled.is_empty() {
        return Err(Error::DegeneratePartition);
    }
    let labeled: Vec<(&Instance, usize)> = part
        .labeled
        .iter()
        .map(|li| {
            data.labels.index(&li.label).map(|y| (&li.instance, y)).ok_or_else(|| {
                Error::InvalidLabels(format!("label {} of {} is not in the label set", li.label, li.instance.id))
            })
        })
        .collect::<Result<_>>()?;
    let all: Vec<Instance> =
        part.labeled.iter().map(|l| l.instance.clone()).chain(part.unlabeled.iter().cloned()).collect();
    let threshold = cfg.threshold_for(data.labels.len());

    let mut rng_a = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rng_u = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut rng_f = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(2));
    let mut opt_c = Adagrad::new(cfg.lr, classifier.params().len());
    let mut opt_m = Adagrad::new(cfg.matcher_lr, matcher.dim() + matcher.num_windows());
    let mut metrics = Vec::with_capacity(cfg.iterations);

    for it in 0..cfg.iterations {
        let ba: Vec<(&Instance, usize)> =
            draw(labeled.len(), cfg.n, &mut rng_a).into_iter().map(|i| labeled[i]).collect();
        let (l_a, mut grad) = labeled_loss(&ba, &classifier);

        let mut l_u = 0.0;
        if cfg.alpha > 0.0 && !part.unlabeled.is_empty() {
            let bu: Vec<&Instance> =
                draw(part.unlabeled.len(), cfg.m, &mut rng_u).into_iter().map(|i| &part.unlabeled[i]).collect();
            let pl = label_batch(&bu, data, &matcher, &classifier, cfg, threshold)?;
            let u: Vec<f64> = pl.iter().map(|p| p.u).collect();
            let omega = normalize_scores(&u, cfg.theta_t);
            let batch: Vec<(&Instance, usize, f64)> =
                bu.iter().zip(&pl).zip(&omega).map(|((x, p), &w)| (*x, p.label, w)).collect();
            let (l, g) = unlabeled_loss(&batch, &classifier);
            l_u = l;
            grad.iter_mut().zip(&g).for_each(|(a, b)| *a += cfg.alpha * b);
        }

        let mut l_s = 0.0;
        if cfg.beta > 0.0 {
            let pick: Vec<Instance> =
                draw(all.len(), cfg.find_batch, &mut rng_f).into_iter().map(|i| all[i].clone()).collect();
            let find = synthesize_find_examples(&pick, matcher.max_window(), &mut rng_f);
            let (l, mut g) = l_string(&find, data.sims, &matcher, cfg.gamma, cfg.tau)?;
            l_s = l;
            g.scale(cfg.beta);
            let mut p = matcher.params();
            opt_m.step(&mut p, &g.flat());
            matcher.set_params(&p);
        }

        let mut p = classifier.params().to_vec();
        opt_c.step(&mut p, &grad);
        classifier.set_params(&p);

        let eval = !data.dev.is_empty() && ((it + 1) % cfg.eval_every == 0 || it + 1 == cfg.iterations);
        let row = MetricsRow {
            iteration: it + 1,
            l_a,
            l_u,
            l_string: l_s,
            l_total: total_loss(l_a, l_u, l_s, cfg.alpha, cfg.beta),
            dev_acc: eval.then(|| accuracy(&classifier, data.dev)),
        };
        log::debug!("iteration {}: L_a {:.6} L_u {:.6} L_string {:.6}", row.iteration, l_a, l_u, l_s);
        metrics.push(row);
    }
    Ok(TrainOutcome { classifier, matcher, metrics })
}
