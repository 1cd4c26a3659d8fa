use std::collections::BTreeMap;

use crate::classifier::{train, ClassifierConfig};
use crate::dataset::SequenceSet;
use crate::error::{Error, Result};
use crate::eval::macro_f1;
use crate::radar_data::InstanceId;
use crate::seed;

use super::TaskId;

/// Scores a feature subset; higher is better.
pub trait Scorer: Sync {
    fn score(&self, active: &[usize]) -> Result<f64>;
}

/// The sequences of one binary task with their fold assignment.
pub struct TaskData<'a> {
    pub task: TaskId,
    pub set: &'a SequenceSet,
    pub sequences: Vec<usize>,
    pub targets: Vec<usize>,
    pub folds: Vec<usize>,
    pub augmented: Vec<bool>,
}

impl<'a> TaskData<'a> {
    pub fn new(task: TaskId, set: &'a SequenceSet, folds: &BTreeMap<InstanceId, usize>) -> Result<Self> {
        let mut d = TaskData {
            task,
            set,
            sequences: Vec::new(),
            targets: Vec::new(),
            folds: Vec::new(),
            augmented: Vec::new(),
        };
        for (i, s) in set.sequences.iter().enumerate() {
            let (Some(t), Some(&f)) = (task.target(s.label), folds.get(&s.instance_id)) else {
                continue;
            };
            d.sequences.push(i);
            d.targets.push(t);
            d.folds.push(f);
            d.augmented.push(s.is_augmented());
        }
        for side in 0..2 {
            if !d.targets.contains(&side) {
                return Err(Error::InvalidInput(format!("task {task} has an empty class")));
            }
        }
        Ok(d)
    }
}

/// Mean binary macro F1 over instance-grouped folds. Augmented sequences
/// are only ever used for training.
pub struct CvScorer<'a> {
    data: &'a TaskData<'a>,
    folds: usize,
    cfg: ClassifierConfig,
    seed: u64,
}

impl<'a> CvScorer<'a> {
    pub fn new(data: &'a TaskData<'a>, folds: usize, cfg: ClassifierConfig, seed: u64) -> Self {
        Self { data, folds, cfg, seed }
    }

    fn fold_score(&self, fold: usize, active: &[usize]) -> Result<f64> {
        let d = self.data;
        let (mut train_x, mut train_y) = (Vec::new(), Vec::new());
        let mut test = Vec::new();
        for k in 0..d.sequences.len() {
            if d.folds[k] != fold {
                train_x.push(d.set.steps(d.sequences[k]));
                train_y.push(d.targets[k]);
            } else if !d.augmented[k] {
                test.push(k);
            }
        }
        let cfg = ClassifierConfig {
            seed: seed::derive_indexed(self.seed, "fold", fold as u64),
            ..self.cfg.clone()
        };
        let model = train(&train_x, &train_y, 2, active, &cfg)?;
        let mut cm = vec![vec![0u64; 2]; 2];
        for k in test {
            let p = model.predict_posterior(&d.set.steps(d.sequences[k]))?;
            cm[d.targets[k]][usize::from(p[1] > p[0])] += 1;
        }
        Ok(macro_f1(&cm, 2))
    }
}

impl Scorer for CvScorer<'_> {
    fn score(&self, active: &[usize]) -> Result<f64> {
        let mut total = 0.0;
        for fold in 0..self.folds {
            total += self.fold_score(fold, active).map_err(|e| Error::Scorer {
                fold,
                reason: e.to_string(),
            })?;
        }
        Ok(total / self.folds as f64)
    }
}
