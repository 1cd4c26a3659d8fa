use std::collections::{BTreeMap, BTreeSet};

use crate::classifier::ClassifierConfig;
use crate::dataset::SequenceSet;
use crate::ensemble::{decide, train_ensemble, HiddenConfig, PosteriorBundle};
use crate::error::Result;
use crate::eval::{kfold_split, ConfusionMatrix, FoldMetrics, MethodResult};
use crate::radar_data::{ClassLabel, InstanceId};
use crate::seed;
use crate::selection::{FeatureMask, TaskId};

pub const PROPOSED: &str = "proposed";
pub const PROPOSED_DETECTOR: &str = "proposed_detector";
pub const BASELINE: &str = "shared_full";

/// Sequences of the given instances; augmented copies only if asked.
pub fn gather<'a>(set: &'a SequenceSet, ids: &BTreeSet<InstanceId>, with_aug: bool) -> (Vec<Vec<&'a [f64]>>, Vec<ClassLabel>) {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, s) in set.sequences.iter().enumerate() {
        if ids.contains(&s.instance_id) && (with_aug || !s.is_augmented()) {
            xs.push(set.steps(i));
            ys.push(s.label);
        }
    }
    (xs, ys)
}

pub fn full_masks(n: usize) -> BTreeMap<TaskId, FeatureMask> {
    TaskId::all(ClassLabel::K).into_iter().map(|t| (t, FeatureMask::full(t, n))).collect()
}

struct Accum {
    name: &'static str,
    folds: Vec<FoldMetrics>,
    confusion: ConfusionMatrix,
}

impl Accum {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            folds: Vec::new(),
            confusion: ConfusionMatrix::default(),
        }
    }

    fn add_fold(&mut self, seed: u64, fold: usize, truth: &[ClassLabel], pred: &[ClassLabel]) {
        let cm = ConfusionMatrix::from_predictions(truth, pred);
        self.folds.push(FoldMetrics {
            seed,
            fold,
            n_test: truth.len(),
            macro_f1: cm.macro_f1(),
            micro_f1: cm.micro_f1(),
        });
        self.confusion.merge(&cm);
    }

    fn finish(self) -> MethodResult {
        let tpr_hidden = self.confusion.tpr_hidden();
        MethodResult {
            name: self.name.into(),
            folds: self.folds,
            confusion: self.confusion,
            tpr_hidden,
        }
    }
}

/// Grouped k-fold comparison of per-member masks against the shared full
/// feature set. Every fold model of the proposed ensemble is also run with
/// the hidden detector and scored on the hidden test half.
#[allow(clippy::too_many_arguments)]
pub fn cross_validate(
    set: &SequenceSet,
    masks: &BTreeMap<TaskId, FeatureMask>,
    training: &ClassifierConfig,
    hidden: &HiddenConfig,
    hidden_test: &BTreeSet<InstanceId>,
    k: usize,
    seeds: &[u64],
    base_seed: u64,
) -> Result<Vec<MethodResult>> {
    let known: Vec<(InstanceId, ClassLabel)> = set.instances().into_iter().filter(|(_, l)| !l.is_hidden()).collect();
    let n = set.windows.first().map_or(0, Vec::len);
    let full = full_masks(n);
    let (hx, hy) = gather(set, hidden_test, false);
    let mut proposed = Accum::new(PROPOSED);
    let mut detector = Accum::new(PROPOSED_DETECTOR);
    let mut baseline = Accum::new(BASELINE);
    for &s in seeds {
        let folds = kfold_split(&known, k, seed::derive_indexed(base_seed, "eval-folds", s))?;
        for fold in 0..k {
            let train_ids: BTreeSet<InstanceId> = folds.iter().filter(|(_, &f)| f != fold).map(|(&id, _)| id).collect();
            let test_ids: BTreeSet<InstanceId> = folds.iter().filter(|(_, &f)| f == fold).map(|(&id, _)| id).collect();
            let (tx, ty) = gather(set, &train_ids, true);
            let (vx, vy) = gather(set, &test_ids, false);
            let member_seed = seed::derive_indexed(base_seed, &format!("eval-train-{s}"), fold as u64);

            let model = train_ensemble(&tx, &ty, masks, training, member_seed)?;
            let bundles = model.bundles(&vx)?;
            let off = predict(&bundles, &HiddenConfig::default());
            proposed.add_fold(s, fold, &vy, &off);
            let on = predict(&bundles, hidden);
            detector.add_fold(s, fold, &vy, &on);
            let hp = predict(&model.bundles(&hx)?, hidden);
            detector.confusion.merge(&ConfusionMatrix::from_predictions(&hy, &hp));

            let base = train_ensemble(&tx, &ty, &full, training, member_seed)?;
            baseline.add_fold(s, fold, &vy, &predict(&base.bundles(&vx)?, &HiddenConfig::default()));
        }
    }
    Ok(vec![proposed.finish(), detector.finish(), baseline.finish()])
}

fn predict(bundles: &[PosteriorBundle], hidden: &HiddenConfig) -> Vec<ClassLabel> {
    bundles.iter().map(|b| decide(b, hidden)).collect()
}
