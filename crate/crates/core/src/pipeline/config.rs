use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifier::ClassifierConfig;
use crate::ensemble::{HiddenMethod, SweepGrid, ThresholdRule};
use crate::error::{Error, Result};
use crate::eval::FINAL_FOLDS;
use crate::radar_data::{DbscanParams, DEFAULT_WINDOW_LEN, MAX_SEQUENCE_LEN};
use crate::selection::SelectionConfig;
use crate::synthgen::GeneratorConfig;

use super::Stage;

/// Which stages `all` runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StageToggles {
    pub gen: bool,
    pub cluster: bool,
    pub extract: bool,
    pub rank: bool,
    pub select: bool,
    pub train: bool,
    pub sweep: bool,
    pub eval: bool,
    pub report: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        Self {
            gen: true,
            cluster: true,
            extract: true,
            rank: true,
            select: true,
            train: true,
            sweep: true,
            eval: true,
            report: true,
        }
    }
}

impl StageToggles {
    pub fn enabled(&self, stage: Stage) -> bool {
        match stage {
            Stage::Gen => self.gen,
            Stage::Cluster => self.cluster,
            Stage::Extract => self.extract,
            Stage::Rank => self.rank,
            Stage::Select => self.select,
            Stage::Train => self.train,
            Stage::Sweep => self.sweep,
            Stage::Eval => self.eval,
            Stage::Report => self.report,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusteringConfig {
    pub dbscan: DbscanParams,
    /// Seconds per cluster sample.
    pub window_len: f64,
    /// Maximum windows per sequence.
    pub sequence_len: usize,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        Self {
            dbscan: DbscanParams::default(),
            window_len: DEFAULT_WINDOW_LEN,
            sequence_len: MAX_SEQUENCE_LEN,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HiddenStageConfig {
    /// Detector deployed after the sweep.
    pub method: HiddenMethod,
    pub grid: SweepGrid,
    pub rule: ThresholdRule,
}

impl Default for HiddenStageConfig {
    fn default() -> Self {
        Self {
            method: HiddenMethod::OvaThreshold,
            grid: SweepGrid::default(),
            rule: ThresholdRule::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub folds: usize,
    /// One full cross-validation per entry, each with its own fold split.
    pub seeds: Vec<u64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            folds: FINAL_FOLDS,
            seeds: vec![0],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub stages: StageToggles,
    pub generator: GeneratorConfig,
    pub clustering: ClusteringConfig,
    pub selection: SelectionConfig,
    pub training: ClassifierConfig,
    pub hidden: HiddenStageConfig,
    pub eval: EvalConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| Error::Config {
            path: ".".into(),
            message: e.message().to_string(),
        })?;
        serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.inner().message().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Apply a seed override, push the run seed into every component and
    /// validate.
    pub fn resolve(mut self, seed: Option<u64>) -> Result<Self> {
        if let Some(s) = seed {
            self.seed = s;
        }
        if i64::try_from(self.seed).is_err() {
            return Err(Error::Config {
                path: "seed".into(),
                message: "seed must be at most 2^63 - 1".into(),
            });
        }
        self.generator.seed = self.seed;
        self.selection.classifier.seed = self.seed;
        self.training.seed = self.seed;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |path: &str, message: &str| {
            Err(Error::Config {
                path: path.into(),
                message: message.into(),
            })
        };
        self.generator.validate()?;
        self.clustering.dbscan.validate()?;
        if !(self.clustering.window_len > 0.0 && self.clustering.window_len.is_finite()) {
            return bad("clustering.window_len", "must be positive");
        }
        if !(1..=MAX_SEQUENCE_LEN).contains(&self.clustering.sequence_len) {
            return bad("clustering.sequence_len", "must be between 1 and 8");
        }
        if self.selection.folds < 2 {
            return bad("selection.folds", "at least two folds required");
        }
        if self.selection.top == 0 || self.selection.bins < 2 || self.selection.multisurf_max_samples < 2 {
            return bad("selection", "top >= 1, bins >= 2 and multisurf_max_samples >= 2 required");
        }
        self.selection.classifier.validate()?;
        self.training.validate()?;
        if self.eval.folds < 2 {
            return bad("eval.folds", "at least two folds required");
        }
        if self.eval.seeds.is_empty() {
            return bad("eval.seeds", "at least one seed required");
        }
        Ok(())
    }

    /// The resolved config as TOML, without the output directory.
    pub fn echo(&self) -> Result<String> {
        let mut c = self.clone();
        c.output_dir = None;
        toml::to_string(&c).map_err(|e| Error::Config {
            path: ".".into(),
            message: e.to_string(),
        })
    }
}
