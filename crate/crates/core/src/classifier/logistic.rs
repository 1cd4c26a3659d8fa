//! Mean-pooled sequence into an affine layer and softmax.

use serde::{Deserialize, Serialize};

use super::softmax;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub input_dim: usize,
    pub classes: usize,
    /// C × D, row-major.
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl LogisticParams {
    pub fn zeros(input_dim: usize, classes: usize) -> Self {
        Self {
            input_dim,
            classes,
            w: vec![0.0; input_dim * classes],
            b: vec![0.0; classes],
        }
    }

    pub fn forward(&self, pooled: &[f64]) -> Vec<f64> {
        let d = self.input_dim;
        let logits: Vec<f64> = (0..self.classes)
            .map(|c| self.b[c] + self.w[c * d..(c + 1) * d].iter().zip(pooled).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        softmax(&logits)
    }

    pub fn loss_and_grad(&self, pooled: &[f64], label: usize, grad: &mut LogisticParams) -> f64 {
        let d = self.input_dim;
        let mut p = self.forward(pooled);
        let loss = -p[label].max(f64::MIN_POSITIVE).ln();
        p[label] -= 1.0;
        for (c, &g) in p.iter().enumerate() {
            grad.b[c] += g;
            for (w, &x) in grad.w[c * d..(c + 1) * d].iter_mut().zip(pooled) {
                *w += g * x;
            }
        }
        loss
    }
}
