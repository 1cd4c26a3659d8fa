//! Guided backward elimination producing one feature mask per ensemble
//! member.

pub mod scorer;

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::ClassifierConfig;
use crate::dataset::SequenceSet;
use crate::error::{Error, Result};
use crate::eval::kfold_split;
use crate::features::{FeatureCatalog, NUM_FEATURES};
use crate::radar_data::{ClassLabel, InstanceId};
use crate::ranking::{discretize, fuse, jmi_rank, multisurf_rank, FusedRanking, Ranking};
use crate::seed;

pub use scorer::{CvScorer, Scorer, TaskData};

/// One binary member of the ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum TaskId {
    /// `i` against `j`, `i` before `j` in class order.
    Ovo(ClassLabel, ClassLabel),
    /// One class against all other trained classes.
    Ova(ClassLabel),
}

impl TaskId {
    /// All OVO pairs followed by all OVA tasks over the first `k` classes.
    pub fn all(k: usize) -> Vec<TaskId> {
        let classes = &ClassLabel::TRAINED[..k.min(ClassLabel::K)];
        let mut out = Vec::new();
        for (a, &i) in classes.iter().enumerate() {
            for &j in &classes[a + 1..] {
                out.push(TaskId::Ovo(i, j));
            }
        }
        out.extend(classes.iter().map(|&c| TaskId::Ova(c)));
        out
    }

    /// Binary target of a class: 0 for the first (or "one") side, 1 for
    /// the other side, `None` if the class takes no part.
    pub fn target(&self, label: ClassLabel) -> Option<usize> {
        if label.is_hidden() {
            return None;
        }
        match *self {
            TaskId::Ovo(i, _) if label == i => Some(0),
            TaskId::Ovo(_, j) if label == j => Some(1),
            TaskId::Ovo(..) => None,
            TaskId::Ova(i) => Some(usize::from(label != i)),
        }
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaskId::Ovo(i, j) => write!(f, "{}{}", i.letter(), j.letter()),
            TaskId::Ova(i) => write!(f, "{}", i.letter()),
        }
    }
}

impl From<TaskId> for String {
    fn from(t: TaskId) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for TaskId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        let by_letter = |c: char| ClassLabel::TRAINED.iter().copied().find(|l| l.letter() == c);
        let chars: Vec<char> = s.chars().collect();
        let parsed = match chars.as_slice() {
            [a] => by_letter(*a).map(TaskId::Ova),
            [a, b] => by_letter(*a).zip(by_letter(*b)).filter(|(i, j)| i < j).map(|(i, j)| TaskId::Ovo(i, j)),
            _ => None,
        };
        parsed.ok_or_else(|| Error::InvalidInput(format!("unknown classifier name `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Fixed,
    Kept,
    Dropped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureMask {
    pub owner: TaskId,
    pub provenance: Vec<Provenance>,
}

impl FeatureMask {
    pub fn full(owner: TaskId, n: usize) -> Self {
        Self {
            owner,
            provenance: vec![Provenance::Kept; n],
        }
    }

    pub fn active(&self) -> Vec<bool> {
        self.provenance.iter().map(|p| *p != Provenance::Dropped).collect()
    }

    pub fn active_indices(&self) -> Vec<usize> {
        (0..self.provenance.len()).filter(|&i| self.provenance[i] != Provenance::Dropped).collect()
    }

    pub fn count(&self) -> usize {
        self.provenance.iter().filter(|p| **p != Provenance::Dropped).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub pass: usize,
    pub feature: usize,
    pub score_with: f64,
    pub score_without: f64,
    pub dropped: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    /// Score with every feature active.
    pub initial_score: f64,
    pub final_score: f64,
    pub entries: Vec<TraceEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UntilFixpoint {
    #[serde(rename = "until_fixpoint")]
    UntilFixpoint,
}

/// Number of elimination sweeps: a count, or `"until_fixpoint"` to repeat
/// until a sweep drops nothing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Passes {
    Count(usize),
    Mode(UntilFixpoint),
}

impl Passes {
    fn limit(self) -> usize {
        match self {
            Passes::Count(n) => n,
            Passes::Mode(_) => usize::MAX,
        }
    }
}

/// A scorer failure, with the trace recorded up to that point.
#[derive(Debug)]
pub struct SelectionFailure {
    pub error: Error,
    pub trace: SelectionTrace,
}

impl From<SelectionFailure> for Error {
    fn from(f: SelectionFailure) -> Self {
        f.error
    }
}

/// Test one candidate at a time, worst first, and drop it when the score
/// without it is at least the current score minus `tol`. Fixed features are
/// never candidates and the last active feature is never removed.
pub fn guided_backward_elimination<S: Scorer + ?Sized>(
    owner: TaskId,
    n_features: usize,
    fused: &FusedRanking,
    scorer: &S,
    tol: f64,
    passes: Passes,
) -> std::result::Result<(FeatureMask, SelectionTrace), SelectionFailure> {
    let mut mask = FeatureMask::full(owner, n_features);
    for &f in &fused.fixed_set {
        mask.provenance[f] = Provenance::Fixed;
    }
    let mut trace = SelectionTrace::default();
    let mut current = match scorer.score(&mask.active_indices()) {
        Ok(s) => s,
        Err(error) => return Err(SelectionFailure { error, trace }),
    };
    trace.initial_score = current;
    for pass in 0..passes.limit() {
        let mut drops = 0;
        for &f in &fused.elimination_order {
            if mask.provenance[f] != Provenance::Kept || mask.count() <= 1 {
                continue;
            }
            mask.provenance[f] = Provenance::Dropped;
            let without = match scorer.score(&mask.active_indices()) {
                Ok(s) => s,
                Err(error) => {
                    mask.provenance[f] = Provenance::Kept;
                    trace.final_score = current;
                    return Err(SelectionFailure { error, trace });
                }
            };
            let dropped = without >= current - tol;
            trace.entries.push(TraceEntry {
                pass,
                feature: f,
                score_with: current,
                score_without: without,
                dropped,
            });
            if dropped {
                current = without;
                drops += 1;
            } else {
                mask.provenance[f] = Provenance::Kept;
            }
        }
        if drops == 0 {
            break;
        }
    }
    trace.final_score = current;
    Ok((mask, trace))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectionConfig {
    pub folds: usize,
    pub tol: f64,
    pub passes: Passes,
    /// Length of the top lists whose intersection is always kept.
    pub top: usize,
    /// Equal-frequency bins for the JMI estimate.
    pub bins: usize,
    /// Cap on the samples MultiSURF sees per task (it is quadratic).
    pub multisurf_max_samples: usize,
    pub classifier: ClassifierConfig,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            folds: 5,
            tol: 0.0,
            passes: Passes::Count(1),
            top: 50,
            bins: 10,
            multisurf_max_samples: 400,
            classifier: ClassifierConfig::default(),
        }
    }
}

/// Everything selection produced for one member.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSelection {
    pub jmi: Ranking,
    pub multisurf: Ranking,
    pub fused: FusedRanking,
    pub mask: FeatureMask,
    pub trace: SelectionTrace,
}

/// Rankings of one task over its original (non-augmented) windows.
pub fn rank_task(task: TaskId, set: &SequenceSet, cfg: &SelectionConfig, seed: u64) -> Result<(Ranking, Ranking)> {
    let mut rows: Vec<(usize, usize)> = set
        .sequences
        .iter()
        .filter(|s| !s.is_augmented())
        .filter_map(|s| task.target(s.label).map(|t| (*s.steps.last().expect("non-empty sequence"), t)))
        .collect();
    rows.sort_unstable();
    rows.dedup();
    let labels: Vec<usize> = rows.iter().map(|r| r.1).collect();
    let m = set.windows.first().map_or(NUM_FEATURES, Vec::len);
    let columns: Vec<Vec<usize>> = (0..m)
        .map(|f| discretize(&rows.iter().map(|r| set.windows[r.0][f]).collect::<Vec<_>>(), cfg.bins))
        .collect();
    let jmi = jmi_rank(&columns, &labels)?;

    let mut pick: Vec<usize> = (0..rows.len()).collect();
    if pick.len() > cfg.multisurf_max_samples {
        use rand::seq::SliceRandom;
        let mut rng = seed::rng(seed::derive(seed, &format!("multisurf-{task}")));
        pick.shuffle(&mut rng);
        pick.truncate(cfg.multisurf_max_samples);
        pick.sort_unstable();
    }
    let ms_rows: Vec<Vec<f64>> = pick.iter().map(|&i| set.windows[rows[i].0].clone()).collect();
    let ms_labels: Vec<usize> = pick.iter().map(|&i| labels[i]).collect();
    let ms = multisurf_rank(&ms_rows, &ms_labels)?;
    Ok((jmi, ms))
}

/// Guided elimination for one task given its fused ranking.
pub fn eliminate_task(
    task: TaskId,
    set: &SequenceSet,
    folds: &BTreeMap<InstanceId, usize>,
    fused: &FusedRanking,
    cfg: &SelectionConfig,
    seed: u64,
) -> Result<(FeatureMask, SelectionTrace)> {
    let data = TaskData::new(task, set, folds)?;
    let scorer = CvScorer::new(&data, cfg.folds, cfg.classifier.clone(), seed::derive(seed, &format!("score-{task}")));
    let n = set.windows.first().map_or(NUM_FEATURES, Vec::len);
    Ok(guided_backward_elimination(task, n, fused, &scorer, cfg.tol, cfg.passes)?)
}

/// Rank, fuse and select for one task.
pub fn select_task(
    task: TaskId,
    set: &SequenceSet,
    folds: &BTreeMap<InstanceId, usize>,
    cfg: &SelectionConfig,
    seed: u64,
) -> Result<TaskSelection> {
    let (jmi, multisurf) = rank_task(task, set, cfg, seed)?;
    let fused = fuse(&jmi, &multisurf, cfg.top)?;
    let (mask, trace) = eliminate_task(task, set, folds, &fused, cfg, seed)?;
    Ok(TaskSelection {
        jmi,
        multisurf,
        fused,
        mask,
        trace,
    })
}

/// Instance-grouped selection folds over the trained classes of `set`.
pub fn selection_folds(set: &SequenceSet, k: usize, seed: u64) -> Result<BTreeMap<InstanceId, usize>> {
    let known: Vec<_> = set.instances().into_iter().filter(|(_, l)| !l.is_hidden()).collect();
    kfold_split(&known, k, seed::derive(seed, "selection-folds"))
}

/// Run selection for every task; tasks run in parallel and results are
/// keyed by task id.
pub fn select_all(tasks: &[TaskId], set: &SequenceSet, cfg: &SelectionConfig, seed: u64) -> Result<BTreeMap<TaskId, TaskSelection>> {
    let folds = selection_folds(set, cfg.folds, seed)?;
    let results: Vec<Result<TaskSelection>> = tasks.par_iter().map(|&t| select_task(t, set, &folds, cfg, seed)).collect();
    tasks.iter().copied().zip(results).map(|(t, r)| r.map(|s| (t, s))).collect()
}

/// `classifier,index,name,decision` rows followed by the trace as
/// `classifier,pass,index,name,score_with,score_without,dropped`.
pub fn write_masks(selections: &BTreeMap<TaskId, TaskSelection>) -> Result<(String, String)> {
    let catalog = FeatureCatalog::standard();
    let name = |f: usize| if f < catalog.len() { catalog.name(f).to_string() } else { format!("f{f}") };
    let mut masks = csv::Writer::from_writer(Vec::new());
    masks.write_record(["classifier", "index", "name", "decision"])?;
    let mut traces = csv::Writer::from_writer(Vec::new());
    traces.write_record(["classifier", "pass", "index", "name", "score_with", "score_without", "dropped"])?;
    for (task, s) in selections {
        for (i, p) in s.mask.provenance.iter().enumerate() {
            let d = match p {
                Provenance::Fixed => "fixed",
                Provenance::Kept => "kept",
                Provenance::Dropped => "dropped",
            };
            masks.write_record([task.to_string(), i.to_string(), name(i), d.to_string()])?;
        }
        for e in &s.trace.entries {
            traces.write_record([
                task.to_string(),
                e.pass.to_string(),
                e.feature.to_string(),
                name(e.feature),
                e.score_with.to_string(),
                e.score_without.to_string(),
                e.dropped.to_string(),
            ])?;
        }
    }
    let finish = |w: csv::Writer<Vec<u8>>| -> Result<String> {
        let b = w.into_inner().map_err(|e| Error::io("<masks>", e.into_error()))?;
        Ok(String::from_utf8(b).expect("csv output is utf-8"))
    };
    Ok((finish(masks)?, finish(traces)?))
}
