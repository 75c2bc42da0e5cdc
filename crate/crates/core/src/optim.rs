//! Adagrad.
//!
//! Each parameter keeps a running sum of squared gradients `G`, and a step is
//! `x -= lr * g / (sqrt(G) + eps)` with `G` updated before the step.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adagrad {
    pub lr: f64,
    pub eps: f64,
    accum: Vec<f64>,
}

impl Adagrad {
    pub fn new(lr: f64, len: usize) -> Adagrad {
        Adagrad { lr, eps: 1e-10, accum: vec![0.0; len] }
    }

    /// Descend along `grad`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        assert_eq!(params.len(), self.accum.len(), "parameter length changed");
        assert_eq!(grad.len(), params.len());
        for ((x, g), acc) in params.iter_mut().zip(grad).zip(&mut self.accum) {
            *acc += g * g;
            *x -= self.lr * g / (acc.sqrt() + self.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_is_sign_times_lr() {
        let mut opt = Adagrad::new(0.5, 2);
        let mut x = vec![1.0, 1.0];
        opt.step(&mut x, &[4.0, -0.1]);
        assert!((x[0] - 0.5).abs() < 1e-9);
        assert!((x[1] - 1.5).abs() < 1e-9);
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut opt = Adagrad::new(0.5, 3);
        let mut x = vec![0.1, 0.2, 0.3];
        opt.step(&mut x, &[0.0; 3]);
        assert_eq!(x, vec![0.1, 0.2, 0.3]);
    }

    #[test]
    fn minimizes_a_quadratic() {
        let mut opt = Adagrad::new(0.5, 1);
        let mut x = vec![3.0];
        for _ in 0..500 {
            let g = 2.0 * (x[0] - 1.0);
            opt.step(&mut x, &[g]);
        }
        assert!((x[0] - 1.0).abs() < 1e-3);
    }
}
