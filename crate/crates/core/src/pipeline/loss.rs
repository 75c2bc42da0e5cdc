use super::Classifier;
use crate::logic::Instance;

/// Mean negative log-likelihood over a labeled batch, with gradient.
pub fn labeled_loss<C: Classifier + ?Sized>(batch: &[(&Instance, usize)], clf: &C) -> (f64, Vec<f64>) {
    if batch.is_empty() {
        return (0.0, vec![0.0; clf.params().len()]);
    }
    let w = 1.0 / batch.len() as f64;
    let b: Vec<_> = batch.iter().map(|&(x, y)| (x, y, w)).collect();
    clf.weighted_nll(&b)
}

/// `-Σ_j omega_j log p(y_j | x_j)` over pseudo-labeled items `(x, y, omega)`.
/// The weights are treated as constants.
pub fn unlabeled_loss<C: Classifier + ?Sized>(batch: &[(&Instance, usize, f64)], clf: &C) -> (f64, Vec<f64>) {
    clf.weighted_nll(batch)
}

/// `L_a + alpha L_u + beta L_string`.
pub fn total_loss(l_a: f64, l_u: f64, l_string: f64, alpha: f64, beta: f64) -> f64 {
    l_a + alpha * l_u + beta * l_string
}
