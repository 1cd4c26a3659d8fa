//! Stage-by-stage batch pipeline over an output directory. Each stage
//! reads its upstream artifacts, writes its own and leaves a stamp holding
//! a digest of its config, the seed and the upstream stamps; a stage whose
//! stamp is current is skipped unless forced.

pub mod config;
pub mod evaluate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::SequenceSet;
use crate::ensemble::{choose_threshold, write_sweep_csv, read_sweep_csv, train_ensemble, EnsembleModel, HiddenConfig, HiddenMethod};
use crate::error::{Error, Result};
use crate::eval::{confusion_csv, feature_distribution_report, hidden_split, kfold_split, EvaluationReport, REPORT_FORMAT_VERSION};
use crate::features::{extract_all, read_feature_matrix, write_feature_matrix, FeatureCatalog, FeatureRow};
use crate::radar_data::io::{parse_detection_log, parse_ego_log, parse_labeled_detections, write_detection_log, write_ego_log, write_labeled_detections};
use crate::radar_data::{ClassLabel, ClusterSample, EgoTrack, InstanceId, SensorRig};
use crate::ranking::{fuse, write_rankings, FusedRanking, Ranking};
use crate::seed;
use crate::selection::{eliminate_task, rank_task, selection_folds, write_masks, TaskId, TaskSelection};
use crate::synthgen::annotate::{cluster_samples, cluster_scene, ingest};
use crate::synthgen::{gen_scenario, parse_assoc, parse_truth_table, perturb, write_assoc, write_truth_table};

pub use config::{ClusteringConfig, EvalConfig, HiddenStageConfig, RunConfig, StageToggles};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Gen,
    Cluster,
    Extract,
    Rank,
    Select,
    Train,
    Sweep,
    Eval,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::Gen,
        Stage::Cluster,
        Stage::Extract,
        Stage::Rank,
        Stage::Select,
        Stage::Train,
        Stage::Sweep,
        Stage::Eval,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Gen => "gen",
            Stage::Cluster => "cluster",
            Stage::Extract => "extract",
            Stage::Rank => "rank",
            Stage::Select => "select",
            Stage::Train => "train",
            Stage::Sweep => "sweep",
            Stage::Eval => "eval",
            Stage::Report => "report",
        }
    }

    pub fn upstream(self) -> &'static [Stage] {
        match self {
            Stage::Gen => &[],
            Stage::Cluster => &[Stage::Gen],
            Stage::Extract => &[Stage::Cluster],
            Stage::Rank => &[Stage::Extract],
            Stage::Select => &[Stage::Rank],
            Stage::Train => &[Stage::Select],
            Stage::Sweep => &[Stage::Train],
            Stage::Eval => &[Stage::Sweep],
            Stage::Report => &[Stage::Eval],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown stage `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ran,
    Skipped,
}

const STAMP: &str = ".stamp";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedTask {
    pub jmi: Ranking,
    pub multisurf: Ranking,
    pub fused: FusedRanking,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TunedHidden {
    /// The deployed detector.
    pub chosen: HiddenConfig,
    /// Best threshold of every detector.
    pub per_method: Vec<HiddenConfig>,
}

pub struct Pipeline {
    pub config: RunConfig,
    pub out: PathBuf,
    pub force: bool,
    rig: SensorRig,
}

fn sha_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

impl Pipeline {
    pub fn new(config: RunConfig, out: impl Into<PathBuf>, force: bool) -> Self {
        Self {
            config,
            out: out.into(),
            force,
            rig: SensorRig::front_half(),
        }
    }

    pub fn stage_dir(&self, stage: Stage) -> PathBuf {
        self.out.join(stage.name())
    }

    fn path(&self, stage: Stage, file: &str) -> PathBuf {
        self.stage_dir(stage).join(file)
    }

    fn fingerprint(&self, stage: Stage) -> Result<serde_json::Value> {
        let c = &self.config;
        Ok(match stage {
            Stage::Gen => serde_json::to_value(&c.generator)?,
            Stage::Cluster => serde_json::to_value(c.clustering.dbscan)?,
            Stage::Extract => serde_json::to_value((c.clustering.window_len, &c.generator.augmentation))?,
            Stage::Rank => serde_json::to_value((c.clustering.sequence_len, &c.selection))?,
            Stage::Select => serde_json::to_value(&c.selection)?,
            Stage::Train => serde_json::to_value((&c.training, c.eval.folds))?,
            Stage::Sweep => serde_json::to_value(&c.hidden)?,
            Stage::Eval => serde_json::to_value((&c.eval, &c.training))?,
            Stage::Report => serde_json::Value::String(c.echo()?),
        })
    }

    /// Digest of the stage inputs; fails if an upstream stamp is missing.
    pub fn stamp(&self, stage: Stage) -> Result<String> {
        let mut input = format!("{}\n{}\n{}\n", stage.name(), self.config.seed, self.fingerprint(stage)?);
        for &u in stage.upstream() {
            let s = fs::read_to_string(self.path(u, STAMP)).map_err(|_| Error::StageDependency(u.name().into()))?;
            input.push_str(&s);
            input.push('\n');
        }
        Ok(sha_hex(input.as_bytes()))
    }

    pub fn run(&self, stage: Stage) -> Result<Outcome> {
        let stamp = self.stamp(stage)?;
        let stamp_path = self.path(stage, STAMP);
        if !self.force && fs::read_to_string(&stamp_path).is_ok_and(|s| s == stamp) {
            return Ok(Outcome::Skipped);
        }
        let _ = fs::remove_file(&stamp_path);
        match stage {
            Stage::Gen => self.gen(),
            Stage::Cluster => self.cluster(),
            Stage::Extract => self.extract(),
            Stage::Rank => self.rank(),
            Stage::Select => self.select(),
            Stage::Train => self.train(),
            Stage::Sweep => self.sweep(),
            Stage::Eval => self.eval(),
            Stage::Report => self.report(),
        }?;
        write(&stamp_path, stamp)?;
        Ok(Outcome::Ran)
    }

    /// Every enabled stage in order.
    pub fn run_all(&self) -> Result<Vec<(Stage, Outcome)>> {
        Stage::ALL
            .into_iter()
            .filter(|&s| self.config.stages.enabled(s))
            .map(|s| self.run(s).map(|o| (s, o)))
            .collect()
    }

    fn gen(&self) -> Result<()> {
        let scene = gen_scenario(&self.config.generator, &self.rig)?;
        write(&self.path(Stage::Gen, "detections.txt"), write_detection_log(&scene.detections))?;
        write(&self.path(Stage::Gen, "ego.txt"), write_ego_log(&scene.ego))?;
        write(&self.path(Stage::Gen, "truth.txt"), write_truth_table(&scene.truth))?;
        write(&self.path(Stage::Gen, "assoc.txt"), write_assoc(&scene.assoc))
    }

    fn cluster(&self) -> Result<()> {
        let (raw, rejected) = parse_detection_log(&read(&self.path(Stage::Gen, "detections.txt"))?);
        // The association sidecar is aligned line by line with the log.
        if let Some(r) = rejected.into_iter().next() {
            return Err(r.into());
        }
        let ego = EgoTrack::new(parse_ego_log(&read(&self.path(Stage::Gen, "ego.txt"))?)?)?;
        let truth = parse_truth_table(&read(&self.path(Stage::Gen, "truth.txt"))?)?;
        let assoc = parse_assoc(&read(&self.path(Stage::Gen, "assoc.txt"))?)?;
        let dets = ingest(&raw, &ego, &self.rig)?;
        let labeled = cluster_scene(&dets, &assoc, &truth, &self.config.clustering.dbscan)?;
        write(&self.path(Stage::Cluster, "labeled.txt"), write_labeled_detections(&labeled))
    }

    fn extract(&self) -> Result<()> {
        let labeled = parse_labeled_detections(&read(&self.path(Stage::Cluster, "labeled.txt"))?)?;
        let samples = cluster_samples(&labeled, self.config.clustering.window_len)?;
        let rows = extract_rows(&samples, None)?;
        let mut buf = Vec::new();
        write_feature_matrix(&mut buf, &rows, false)?;
        write(&self.path(Stage::Extract, "features.csv"), buf)?;

        let aug = &self.config.generator.augmentation;
        let mut aug_rows = Vec::new();
        for copy in 1..=aug.copies {
            let s = seed::derive_indexed(self.config.seed, "augment", u64::from(copy));
            aug_rows.extend(extract_rows(&perturb(&samples, aug, &self.rig, s), Some(copy))?);
        }
        let mut buf = Vec::new();
        write_feature_matrix(&mut buf, &aug_rows, true)?;
        write(&self.path(Stage::Extract, "features_aug.csv"), buf)
    }

    /// Original and augmented sequences.
    pub fn load_sequences(&self) -> Result<SequenceSet> {
        let open = |f: &str| {
            let p = self.path(Stage::Extract, f);
            fs::File::open(&p).map_err(|e| Error::io(&p, e))
        };
        let mut rows = read_feature_matrix(open("features.csv")?)?;
        rows.extend(read_feature_matrix(open("features_aug.csv")?)?);
        Ok(SequenceSet::from_rows(&rows, self.config.clustering.sequence_len))
    }

    fn rank(&self) -> Result<()> {
        let set = self.load_sequences()?;
        let cfg = &self.config.selection;
        let tasks = TaskId::all(ClassLabel::K);
        let ranked: Vec<Result<RankedTask>> = tasks
            .par_iter()
            .map(|&t| {
                let (jmi, multisurf) = rank_task(t, &set, cfg, self.config.seed)?;
                let fused = fuse(&jmi, &multisurf, cfg.top)?;
                Ok(RankedTask { jmi, multisurf, fused })
            })
            .collect();
        let ranked: BTreeMap<TaskId, RankedTask> = tasks.iter().copied().zip(ranked).map(|(t, r)| r.map(|r| (t, r))).collect::<Result<_>>()?;
        let mut named = Vec::new();
        for (t, r) in &ranked {
            named.push((format!("{t}/jmi"), &r.jmi));
            named.push((format!("{t}/multisurf"), &r.multisurf));
        }
        write(&self.path(Stage::Rank, "rankings.csv"), write_rankings(&named)?)?;
        write(&self.path(Stage::Rank, "rankings.json"), serde_json::to_string(&ranked)?)
    }

    fn select(&self) -> Result<()> {
        let set = self.load_sequences()?;
        let ranked: BTreeMap<TaskId, RankedTask> = serde_json::from_str(&read(&self.path(Stage::Rank, "rankings.json"))?)?;
        let cfg = &self.config.selection;
        let folds = selection_folds(&set, cfg.folds, self.config.seed)?;
        let tasks: Vec<(TaskId, RankedTask)> = ranked.into_iter().collect();
        let done: Vec<Result<(TaskId, TaskSelection)>> = tasks
            .into_par_iter()
            .map(|(t, r)| {
                let (mask, trace) = eliminate_task(t, &set, &folds, &r.fused, cfg, self.config.seed)?;
                Ok((
                    t,
                    TaskSelection {
                        jmi: r.jmi,
                        multisurf: r.multisurf,
                        fused: r.fused,
                        mask,
                        trace,
                    },
                ))
            })
            .collect();
        let selections: BTreeMap<TaskId, TaskSelection> = done.into_iter().collect::<Result<_>>()?;
        let (masks, trace) = write_masks(&selections)?;
        write(&self.path(Stage::Select, "masks.csv"), masks)?;
        write(&self.path(Stage::Select, "trace.csv"), trace)?;
        write(&self.path(Stage::Select, "selection.json"), serde_json::to_string(&selections)?)
    }

    pub fn load_selection(&self) -> Result<BTreeMap<TaskId, TaskSelection>> {
        Ok(serde_json::from_str(&read(&self.path(Stage::Select, "selection.json"))?)?)
    }

    /// Known instances held out from the deployed model for threshold
    /// tuning, and the hidden-class tuning and test halves.
    pub fn splits(&self, set: &SequenceSet) -> Result<Splits> {
        let instances = set.instances();
        let known: Vec<(InstanceId, ClassLabel)> = instances.iter().copied().filter(|(_, l)| !l.is_hidden()).collect();
        let hidden: Vec<InstanceId> = instances.iter().filter(|(_, l)| l.is_hidden()).map(|(id, _)| *id).collect();
        let folds = kfold_split(&known, self.config.eval.folds, seed::derive(self.config.seed, "holdout"))?;
        let (tuning, test) = hidden_split(&hidden, seed::derive(self.config.seed, "hidden-split"))?;
        Ok(Splits {
            train: folds.iter().filter(|(_, &f)| f != 0).map(|(&id, _)| id).collect(),
            holdout: folds.iter().filter(|(_, &f)| f == 0).map(|(&id, _)| id).collect(),
            hidden_tuning: tuning.into_iter().collect(),
            hidden_test: test.into_iter().collect(),
        })
    }

    fn masks(&self) -> Result<BTreeMap<TaskId, crate::selection::FeatureMask>> {
        Ok(self.load_selection()?.into_iter().map(|(t, s)| (t, s.mask)).collect())
    }

    fn train(&self) -> Result<()> {
        let set = self.load_sequences()?;
        let splits = self.splits(&set)?;
        let (xs, ys) = evaluate::gather(&set, &splits.train, true);
        let model = train_ensemble(&xs, &ys, &self.masks()?, &self.config.training, seed::derive(self.config.seed, "deploy"))?;
        write(&self.path(Stage::Train, "ensemble.json"), model.to_json()?)
    }

    fn sweep(&self) -> Result<()> {
        let set = self.load_sequences()?;
        let splits = self.splits(&set)?;
        let mut model = EnsembleModel::from_json(&read(&self.path(Stage::Train, "ensemble.json"))?)?;
        let ids: BTreeSet<InstanceId> = splits.holdout.union(&splits.hidden_tuning).copied().collect();
        let (xs, ys) = evaluate::gather(&set, &ids, false);
        let series = model.sweep_thresholds(&xs, &ys, &self.config.hidden.grid)?;
        let per_method = HiddenMethod::DETECTORS.into_iter().map(|m| choose_threshold(&series, m, self.config.hidden.rule)).collect::<Result<Vec<_>>>()?;
        let chosen = per_method
            .iter()
            .copied()
            .find(|h| h.method == self.config.hidden.method)
            .unwrap_or_default();
        model.hidden = chosen;
        write(&self.path(Stage::Sweep, "sweep.csv"), write_sweep_csv(&series))?;
        write(&self.path(Stage::Sweep, "hidden.json"), serde_json::to_string(&TunedHidden { chosen, per_method })?)?;
        write(&self.path(Stage::Sweep, "ensemble.json"), model.to_json()?)
    }

    fn eval(&self) -> Result<()> {
        let set = self.load_sequences()?;
        let splits = self.splits(&set)?;
        let tuned: TunedHidden = serde_json::from_str(&read(&self.path(Stage::Sweep, "hidden.json"))?)?;
        let masks = self.masks()?;
        let results = evaluate::cross_validate(
            &set,
            &masks,
            &self.config.training,
            &tuned.chosen,
            &splits.hidden_test,
            self.config.eval.folds,
            &self.config.eval.seeds,
            self.config.seed,
        )?;
        let mask_list: Vec<_> = masks.into_values().collect();
        let report = EvaluationReport {
            format_version: REPORT_FORMAT_VERSION.into(),
            seed: self.config.seed,
            folds: self.config.eval.folds,
            results,
            hidden: tuned.chosen,
            distribution: feature_distribution_report(&mask_list, FeatureCatalog::standard()),
            sweep: read_sweep_csv(&read(&self.path(Stage::Sweep, "sweep.csv"))?)?,
        };
        write(&self.path(Stage::Eval, "evaluation.json"), serde_json::to_string_pretty(&report)?)
    }

    pub fn load_evaluation(&self) -> Result<EvaluationReport> {
        Ok(serde_json::from_str(&read(&self.path(Stage::Eval, "evaluation.json"))?)?)
    }

    fn report(&self) -> Result<()> {
        let report = self.load_evaluation()?;
        write(&self.path(Stage::Report, "report.txt"), report.render(&self.config.echo()?))?;
        for r in &report.results {
            write(&self.path(Stage::Report, &format!("confusion_{}.csv", r.name)), confusion_csv(&r.confusion))?;
        }
        write(&self.path(Stage::Report, "feature_distribution.csv"), report.distribution.to_csv())?;
        write(&self.path(Stage::Report, "sweep.csv"), write_sweep_csv(&report.sweep))
    }
}

pub struct Splits {
    pub train: BTreeSet<InstanceId>,
    pub holdout: BTreeSet<InstanceId>,
    pub hidden_tuning: BTreeSet<InstanceId>,
    pub hidden_test: BTreeSet<InstanceId>,
}

fn extract_rows(samples: &[ClusterSample], copy: Option<u32>) -> Result<Vec<FeatureRow>> {
    samples
        .par_iter()
        .map(|s| extract_all(s).map(|vector| FeatureRow { vector, copy }))
        .collect()
}
