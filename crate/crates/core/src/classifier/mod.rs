//! Sequence classifiers producing class posteriors: a gated recurrent
//! network and a cheap mean-pooling logistic model.

pub mod logistic;
pub mod lstm;
pub mod standardize;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radar_data::MAX_SEQUENCE_LEN;
use crate::seed;

pub use logistic::LogisticParams;
pub use lstm::LstmParams;
pub use standardize::Standardizer;

pub const MODEL_FORMAT_VERSION: &str = "radarclass-model-1";

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|&z| (z - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Recurrent,
    #[default]
    Logistic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifierConfig {
    pub backend: Backend,
    pub hidden_units: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Weight decay applied with every step.
    pub l2: f64,
    /// Global gradient-norm clip.
    pub clip_norm: f64,
    /// Per epoch, classes above this multiple of the smallest class are
    /// subsampled down to it.
    pub balance_ratio: f64,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            backend: Backend::Logistic,
            hidden_units: 80,
            epochs: 30,
            learning_rate: 0.1,
            batch_size: 32,
            l2: 1e-4,
            clip_norm: 5.0,
            balance_ratio: 3.0,
            seed: 0,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(format!("classifier config: {m}")));
        if self.hidden_units == 0 {
            return bad("hidden_units must be positive");
        }
        if self.batch_size == 0 || self.epochs == 0 {
            return bad("epochs and batch_size must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.l2 >= 0.0 && self.clip_norm > 0.0 && self.balance_ratio >= 1.0) {
            return bad("l2 >= 0, clip_norm > 0 and balance_ratio >= 1 required");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum Weights {
    Logistic(LogisticParams),
    Recurrent(LstmParams),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedClassifier {
    pub format_version: String,
    pub config: ClassifierConfig,
    pub n_classes: usize,
    /// Length of the full step vectors the model is fed.
    pub input_len: usize,
    /// Feature indices the model reads, ascending.
    pub active: Vec<usize>,
    pub standardizer: Standardizer,
    pub weights: Weights,
    /// Mean training loss per epoch.
    pub loss_curve: Vec<f64>,
}

trait Params: Clone {
    fn zeros_like(&self) -> Self;
    fn tensors_mut(&mut self) -> Vec<&mut Vec<f64>>;
}

impl Params for LogisticParams {
    fn zeros_like(&self) -> Self {
        Self::zeros(self.input_dim, self.classes)
    }
    fn tensors_mut(&mut self) -> Vec<&mut Vec<f64>> {
        vec![&mut self.w, &mut self.b]
    }
}

impl Params for LstmParams {
    fn zeros_like(&self) -> Self {
        LstmParams::zeros_like(self)
    }
    fn tensors_mut(&mut self) -> Vec<&mut Vec<f64>> {
        self.groups_mut().into_iter().collect()
    }
}

/// Sample indices for one epoch with oversized classes subsampled.
fn epoch_indices(labels: &[usize], n_classes: usize, ratio: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in labels.iter().enumerate() {
        by_class[c].push(i);
    }
    let smallest = by_class.iter().map(Vec::len).filter(|&n| n > 0).min().unwrap_or(0);
    let cap = (ratio * smallest as f64).ceil() as usize;
    let mut out = Vec::with_capacity(labels.len());
    for mut members in by_class {
        if members.len() > cap {
            members.partial_shuffle(rng, cap);
            members.truncate(cap);
        }
        out.extend(members);
    }
    out.shuffle(rng);
    out
}

fn sgd<P: Params>(
    params: &mut P,
    labels: &[usize],
    n_classes: usize,
    cfg: &ClassifierConfig,
    rng: &mut ChaCha8Rng,
    loss_grad: impl Fn(&P, usize, &mut P) -> f64,
) -> Result<Vec<f64>> {
    let mut curve = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let idx = epoch_indices(labels, n_classes, cfg.balance_ratio, rng);
        let mut total = 0.0;
        for batch in idx.chunks(cfg.batch_size) {
            let mut grad = params.zeros_like();
            for &i in batch {
                total += loss_grad(params, i, &mut grad);
            }
            let scale = 1.0 / batch.len() as f64;
            let mut g_tensors = grad.tensors_mut();
            let norm = g_tensors.iter().flat_map(|t| t.iter()).map(|g| g * g).sum::<f64>().sqrt() * scale;
            if !norm.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, loss: norm });
            }
            let clip = if norm > cfg.clip_norm { cfg.clip_norm / norm } else { 1.0 };
            let step = cfg.learning_rate * scale * clip;
            for (p, g) in params.tensors_mut().into_iter().zip(g_tensors.iter_mut()) {
                for (w, &d) in p.iter_mut().zip(g.iter()) {
                    *w -= step * d + cfg.learning_rate * cfg.l2 * *w;
                }
            }
        }
        let mean = total / idx.len().max(1) as f64;
        if !mean.is_finite() {
            return Err(Error::NonFiniteLoss { epoch, loss: mean });
        }
        curve.push(mean);
    }
    Ok(curve)
}

fn check_sequence(steps: &[&[f64]], input_len: usize) -> Result<()> {
    if steps.is_empty() || steps.len() > MAX_SEQUENCE_LEN {
        return Err(Error::InvalidInput(format!(
            "sequence length {} outside 1..={MAX_SEQUENCE_LEN}",
            steps.len()
        )));
    }
    if let Some(s) = steps.iter().find(|s| s.len() != input_len) {
        return Err(Error::Dimension {
            expected: input_len,
            got: s.len(),
        });
    }
    Ok(())
}

impl TrainedClassifier {
    fn masked_steps(&self, steps: &[&[f64]]) -> Vec<Vec<f64>> {
        let mut buf = vec![0.0; self.active.len()];
        steps
            .iter()
            .map(|s| {
                let raw: Vec<f64> = self.active.iter().map(|&k| s[k]).collect();
                self.standardizer.apply(&raw, &mut buf);
                buf.clone()
            })
            .collect()
    }

    /// Posterior over the model's classes for one sequence of full-length
    /// feature vectors; only the active features are read.
    pub fn predict_posterior(&self, steps: &[&[f64]]) -> Result<Vec<f64>> {
        check_sequence(steps, self.input_len)?;
        let z = self.masked_steps(steps);
        Ok(match &self.weights {
            Weights::Logistic(p) => p.forward(&mean_pool(&z)),
            Weights::Recurrent(p) => p.forward(&z),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::FormatVersion {
                found: m.format_version,
                expected: MODEL_FORMAT_VERSION.into(),
            });
        }
        Ok(m)
    }
}

fn mean_pool(steps: &[Vec<f64>]) -> Vec<f64> {
    let d = steps.first().map_or(0, Vec::len);
    let mut out = vec![0.0; d];
    for s in steps {
        for (o, v) in out.iter_mut().zip(s) {
            *o += v;
        }
    }
    let n = steps.len().max(1) as f64;
    out.iter_mut().for_each(|v| *v /= n);
    out
}

/// Train on sequences of full-length feature vectors restricted to the
/// `active` feature indices. Labels are class indices below `n_classes`.
pub fn train(
    sequences: &[Vec<&[f64]>],
    labels: &[usize],
    n_classes: usize,
    active: &[usize],
    cfg: &ClassifierConfig,
) -> Result<TrainedClassifier> {
    cfg.validate()?;
    if sequences.len() != labels.len() {
        return Err(Error::Dimension {
            expected: sequences.len(),
            got: labels.len(),
        });
    }
    if n_classes < 2 {
        return Err(Error::InvalidInput("at least two output classes required".into()));
    }
    if let Some(&l) = labels.iter().find(|&&l| l >= n_classes) {
        return Err(Error::InvalidInput(format!("label {l} out of range for {n_classes} classes")));
    }
    let mut present = vec![false; n_classes];
    labels.iter().for_each(|&l| present[l] = true);
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(Error::InvalidInput("training data holds a single class".into()));
    }
    let input_len = sequences[0].first().map_or(0, |s| s.len());
    for s in sequences {
        check_sequence(s, input_len)?;
    }
    if active.is_empty() || active.windows(2).any(|w| w[0] >= w[1]) || active.iter().any(|&k| k >= input_len) {
        return Err(Error::InvalidInput("active feature list must be non-empty, ascending and in range".into()));
    }

    let d = active.len();
    let standardizer = Standardizer::fit(
        sequences
            .iter()
            .flat_map(|s| s.iter().map(|step| active.iter().map(|&k| step[k]).collect::<Vec<f64>>()))
            .collect::<Vec<_>>()
            .iter()
            .map(Vec::as_slice),
        d,
    );
    let mut model = TrainedClassifier {
        format_version: MODEL_FORMAT_VERSION.into(),
        config: cfg.clone(),
        n_classes,
        input_len,
        active: active.to_vec(),
        standardizer,
        weights: Weights::Logistic(LogisticParams::zeros(d, n_classes)),
        loss_curve: Vec::new(),
    };
    let prepared: Vec<Vec<Vec<f64>>> = sequences.iter().map(|s| model.masked_steps(s)).collect();
    let mut rng = seed::rng(seed::derive(cfg.seed, "train"));
    match cfg.backend {
        Backend::Logistic => {
            let pooled: Vec<Vec<f64>> = prepared.iter().map(|s| mean_pool(s)).collect();
            let mut p = LogisticParams::zeros(d, n_classes);
            p.w.iter_mut().for_each(|w| *w = rng.random_range(-0.01..0.01));
            model.loss_curve = sgd(&mut p, labels, n_classes, cfg, &mut rng, |p, i, g| {
                p.loss_and_grad(&pooled[i], labels[i], g)
            })?;
            model.weights = Weights::Logistic(p);
        }
        Backend::Recurrent => {
            let mut p = LstmParams::new(d, cfg.hidden_units, n_classes, &mut rng);
            model.loss_curve = sgd(&mut p, labels, n_classes, cfg, &mut rng, |p, i, g| {
                p.loss_and_grad(&prepared[i], labels[i], g)
            })?;
            model.weights = Weights::Recurrent(p);
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (Vec<Vec<Vec<f64>>>, Vec<usize>) {
        let mut seqs = Vec::new();
        let mut labels = Vec::new();
        for i in 0..40 {
            let c = i % 2;
            let sign = if c == 0 { -1.0 } else { 1.0 };
            let len = 1 + i % 3;
            seqs.push((0..len).map(|t| vec![sign * (1.0 + 0.1 * t as f64), (i as f64 * 0.37).sin(), 5.0]).collect());
            labels.push(c);
        }
        (seqs, labels)
    }

    fn views(seqs: &[Vec<Vec<f64>>]) -> Vec<Vec<&[f64]>> {
        seqs.iter().map(|s| s.iter().map(Vec::as_slice).collect()).collect()
    }

    fn accuracy(m: &TrainedClassifier, seqs: &[Vec<&[f64]>], labels: &[usize]) -> f64 {
        let ok = seqs
            .iter()
            .zip(labels)
            .filter(|(s, &l)| {
                let p = m.predict_posterior(s).unwrap();
                (p[1] > p[0]) == (l == 1)
            })
            .count();
        ok as f64 / labels.len() as f64
    }

    #[test]
    fn separable_toy_both_backends() {
        let (seqs, labels) = toy();
        let v = views(&seqs);
        for backend in [Backend::Logistic, Backend::Recurrent] {
            let cfg = ClassifierConfig { backend, hidden_units: 4, epochs: 60, ..Default::default() };
            let m = train(&v, &labels, 2, &[0, 1, 2], &cfg).unwrap();
            assert_eq!(accuracy(&m, &v, &labels), 1.0, "{backend:?}");
            assert_eq!(m.loss_curve.len(), 60);
        }
    }

    #[test]
    fn deterministic_and_round_trips() {
        let (seqs, labels) = toy();
        let v = views(&seqs);
        for backend in [Backend::Logistic, Backend::Recurrent] {
            let cfg = ClassifierConfig { backend, hidden_units: 3, epochs: 3, ..Default::default() };
            let a = train(&v, &labels, 2, &[0, 2], &cfg).unwrap();
            let b = train(&v, &labels, 2, &[0, 2], &cfg).unwrap();
            assert_eq!(a, b);
            let back = TrainedClassifier::from_json(&a.to_json().unwrap()).unwrap();
            for s in &v {
                let (p, q) = (a.predict_posterior(s).unwrap(), back.predict_posterior(s).unwrap());
                assert_eq!(p, q);
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let (seqs, labels) = toy();
        let v = views(&seqs);
        let cfg = ClassifierConfig { epochs: 1, ..Default::default() };
        assert!(train(&v, &vec![0; labels.len()], 2, &[0], &cfg).is_err());
        let m = train(&v, &labels, 2, &[0], &cfg).unwrap();
        assert!(matches!(m.predict_posterior(&[&[1.0, 2.0][..]]), Err(Error::Dimension { .. })));
        assert!(m.predict_posterior(&[]).is_err());
    }

    #[test]
    fn inactive_features_are_ignored() {
        let (seqs, labels) = toy();
        let v = views(&seqs);
        let m = train(&v, &labels, 2, &[0], &ClassifierConfig { epochs: 2, ..Default::default() }).unwrap();
        let a = m.predict_posterior(&[&[0.5, 1.0, 5.0][..]]).unwrap();
        let b = m.predict_posterior(&[&[0.5, -1e9, f64::NAN][..]]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn standardizer_reproduces_training_moments() {
        let (seqs, labels) = toy();
        let v = views(&seqs);
        let m = train(&v, &labels, 2, &[0, 1], &ClassifierConfig { epochs: 1, ..Default::default() }).unwrap();
        let z: Vec<Vec<f64>> = v.iter().flat_map(|s| m.masked_steps(s)).collect();
        for k in 0..2 {
            let mean = z.iter().map(|r| r[k]).sum::<f64>() / z.len() as f64;
            let var = z.iter().map(|r| (r[k] - mean).powi(2)).sum::<f64>() / z.len() as f64;
            assert!(mean.abs() < 1e-6 && (var - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn balancing_caps_majority() {
        let labels: Vec<usize> = (0..100).map(|i| usize::from(i >= 10)).collect();
        let mut rng = seed::rng(1);
        let idx = epoch_indices(&labels, 2, 3.0, &mut rng);
        assert_eq!(idx.len(), 40);
        assert_eq!(idx.iter().filter(|&&i| labels[i] == 0).count(), 10);
    }
}
