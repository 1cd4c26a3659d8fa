use serde::{Deserialize, Serialize};

/// Per-feature moments of the training steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Deviations below this are treated as a constant feature (scale 1).
const MIN_STD: f64 = 1e-12;

impl Standardizer {
    /// Population moments over the given step vectors, already masked.
    pub fn fit<'a>(steps: impl Iterator<Item = &'a [f64]>, dim: usize) -> Self {
        let mut n = 0.0;
        let mut mean = vec![0.0; dim];
        let mut m2 = vec![0.0; dim];
        for x in steps {
            n += 1.0;
            for k in 0..dim {
                let d = x[k] - mean[k];
                mean[k] += d / n;
                m2[k] += d * (x[k] - mean[k]);
            }
        }
        let std = m2
            .iter()
            .map(|&s| {
                let sd = if n > 0.0 { (s / n).sqrt() } else { 0.0 };
                if sd > MIN_STD { sd } else { 1.0 }
            })
            .collect();
        Self { mean, std }
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            *o = (x[k] - self.mean[k]) / self.std[k];
        }
    }
}
