use super::Classifier;
use crate::error::{Error, Result};
use crate::exec::{soft_score, SoftConfig, StringMatcher};
use crate::logic::{Instance, LabelSet, LogicalForm};

/// Pseudo-label of one unlabeled instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoLabel {
    /// Index into the label set.
    pub label: usize,
    pub u: f64,
    /// Form that produced the label; `None` when the entropy gate fired.
    pub form_id: Option<String>,
}

/// Pseudo-labeled instances with their normalized weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoLabeledBatch {
    pub items: Vec<(Instance, PseudoLabel, f64)>,
}

/// Shannon entropy in nats.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>()
}

/// Soft score of one form, with a missing anchor scoring 0.
pub fn soft_match<M: StringMatcher + ?Sized>(
    form: &LogicalForm,
    x: &Instance,
    matcher: &M,
    cfg: &SoftConfig,
) -> Result<f64> {
    match soft_score(form.root(), x, matcher, cfg) {
        Ok(s) => Ok(s),
        Err(Error::AnchorMissing(_)) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Labels `x` with the best-scoring form; the first form in `forms` wins
/// ties. A classifier whose prediction entropy is below `entropy_threshold`
/// overrides this with the None label at its max probability.
pub fn pseudo_label<M: StringMatcher + ?Sized>(
    x: &Instance,
    forms: &[LogicalForm],
    labels: &LabelSet,
    matcher: &M,
    classifier: Option<&dyn Classifier>,
    cfg: &SoftConfig,
    entropy_threshold: f64,
) -> Result<PseudoLabel> {
    if forms.is_empty() {
        return Err(Error::Config("pseudo-labeling needs at least one form".into()));
    }
    if let Some(c) = classifier {
        let p = c.predict_proba(x);
        if entropy(&p) < entropy_threshold {
            let u = p.iter().copied().fold(0.0, f64::max);
            return Ok(PseudoLabel { label: labels.none_index(), u, form_id: None });
        }
    }
    let mut best: Option<(f64, &LogicalForm)> = None;
    for f in forms {
        let s = soft_match(f, x, matcher, cfg)?;
        if best.is_none_or(|(b, _)| s > b) {
            best = Some((s, f));
        }
    }
    let (u, f) = best.expect("forms is non-empty");
    let label = labels
        .index(f.label())
        .ok_or_else(|| Error::InvalidLabels(format!("form {} has label {} outside the label set", f.id, f.label())))?;
    Ok(PseudoLabel { label, u, form_id: Some(f.id.clone()) })
}

/// `omega_j = exp(theta_t u_j) / Σ_k exp(theta_t u_k)`.
pub fn normalize_scores(u: &[f64], theta_t: f64) -> Vec<f64> {
    let m = u.iter().map(|v| theta_t * v).fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = u.iter().map(|v| (theta_t * v - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

/// Query phrases of every form, tokenized, paired with the form's label.
pub fn form_queries(forms: &[LogicalForm]) -> Vec<(Vec<String>, String)> {
    forms
        .iter()
        .flat_map(|f| {
            f.root().queries().into_iter().map(move |q| (crate::logic::query_tokens(q), f.label().to_string()))
        })
        .filter(|(q, _)| !q.is_empty())
        .collect()
}
