//! One-vs-one plus one-vs-all ensemble with score aggregation and
//! hidden-class detection.

pub mod aggregate;
pub mod sweep;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{train, ClassifierConfig, TrainedClassifier};
use crate::error::{Error, Result};
use crate::radar_data::ClassLabel;
use crate::seed;
use crate::selection::{FeatureMask, TaskId};

pub use aggregate::{
    argmax, decide, detect_hidden_ova, detect_hidden_ovoova, detect_hidden_voting, normalized_scores, score_classes, votes,
    HiddenConfig, HiddenMethod, PosteriorBundle,
};
pub use sweep::{choose_threshold, read_sweep_csv, sweep_bundles, write_sweep_csv, SweepGrid, SweepPoint, ThresholdRule};

pub const ENSEMBLE_FORMAT_VERSION: &str = "radarclass-ensemble-1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub task: TaskId,
    pub mask: FeatureMask,
    pub classifier: TrainedClassifier,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub format_version: String,
    pub k: usize,
    /// In `TaskId::all(k)` order.
    pub members: Vec<Member>,
    pub hidden: HiddenConfig,
}

impl EnsembleModel {
    pub fn validate(&self) -> Result<()> {
        let tasks = TaskId::all(self.k);
        if self.members.len() != tasks.len() {
            return Err(Error::MissingMember(format!("expected {} members, found {}", tasks.len(), self.members.len())));
        }
        for (m, t) in self.members.iter().zip(&tasks) {
            if m.task != *t {
                return Err(Error::MissingMember(format!("expected member {t}, found {}", m.task)));
            }
            if m.mask.owner != m.task || m.mask.active_indices() != m.classifier.active {
                return Err(Error::InvalidInput(format!("mask of member {t} does not match its classifier")));
            }
        }
        Ok(())
    }

    /// Posteriors of every member; each member reads only its own mask.
    pub fn bundle(&self, steps: &[&[f64]]) -> Result<PosteriorBundle> {
        let mut upper = Vec::with_capacity(self.k * (self.k - 1) / 2);
        let mut ova = vec![0.0; self.k];
        for m in &self.members {
            let p = m.classifier.predict_posterior(steps)?[0];
            match m.task {
                TaskId::Ovo(..) => upper.push(p),
                TaskId::Ova(c) => ova[c.index()] = p,
            }
        }
        PosteriorBundle::from_upper(self.k, &upper, &ova)
    }

    pub fn bundles(&self, sequences: &[Vec<&[f64]>]) -> Result<Vec<PosteriorBundle>> {
        sequences.par_iter().map(|s| self.bundle(s)).collect()
    }

    pub fn classify(&self, steps: &[&[f64]]) -> Result<ClassLabel> {
        Ok(decide(&self.bundle(steps)?, &self.hidden))
    }

    /// Sweep all detectors on labelled tuning sequences.
    pub fn sweep_thresholds(&self, sequences: &[Vec<&[f64]>], truth: &[ClassLabel], grid: &SweepGrid) -> Result<Vec<SweepPoint>> {
        sweep_bundles(&self.bundles(sequences)?, truth, grid)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        if m.format_version != ENSEMBLE_FORMAT_VERSION {
            return Err(Error::FormatVersion {
                found: m.format_version,
                expected: ENSEMBLE_FORMAT_VERSION.into(),
            });
        }
        m.validate()?;
        Ok(m)
    }
}

/// Train all members on the trained-class sequences, each on its own mask.
/// Hidden-class sequences are ignored. Members train in parallel.
pub fn train_ensemble(
    sequences: &[Vec<&[f64]>],
    labels: &[ClassLabel],
    masks: &BTreeMap<TaskId, FeatureMask>,
    cfg: &ClassifierConfig,
    seed: u64,
) -> Result<EnsembleModel> {
    if sequences.len() != labels.len() {
        return Err(Error::Dimension {
            expected: sequences.len(),
            got: labels.len(),
        });
    }
    let tasks = TaskId::all(ClassLabel::K);
    let members: Vec<Result<Member>> = tasks
        .par_iter()
        .map(|&task| {
            let mask = masks.get(&task).ok_or_else(|| Error::MissingMember(format!("no feature mask for {task}")))?.clone();
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for (s, l) in sequences.iter().zip(labels) {
                if let Some(t) = task.target(*l) {
                    xs.push(s.clone());
                    ys.push(t);
                }
            }
            let cfg = ClassifierConfig {
                seed: seed::derive(seed, &format!("member-{task}")),
                ..cfg.clone()
            };
            let classifier = train(&xs, &ys, 2, &mask.active_indices(), &cfg)?;
            Ok(Member { task, mask, classifier })
        })
        .collect();
    let model = EnsembleModel {
        format_version: ENSEMBLE_FORMAT_VERSION.into(),
        k: ClassLabel::K,
        members: members.into_iter().collect::<Result<_>>()?,
        hidden: HiddenConfig::default(),
    };
    model.validate()?;
    Ok(model)
}
