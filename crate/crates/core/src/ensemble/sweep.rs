use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{micro_f1, ConfusionMatrix};
use crate::radar_data::ClassLabel;

use super::aggregate::{decide, HiddenConfig, HiddenMethod, PosteriorBundle};

/// Thresholds tried per method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepGrid {
    /// Used by the two continuous detectors.
    pub continuous: Vec<f64>,
    pub votes: Vec<usize>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            continuous: (0..=100).map(|i| i as f64 / 100.0).collect(),
            votes: (1..=ClassLabel::K).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub method: HiddenMethod,
    pub thr: f64,
    pub tpr_hidden: f64,
    pub micro_f1: f64,
    /// Over the trained classes only.
    pub macro_f1: f64,
}

/// How a threshold is picked from a method's sweep series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", deny_unknown_fields)]
pub enum ThresholdRule {
    /// Best micro F1, ties to the lower threshold.
    MaxMicroF1,
    /// Highest TPR among thresholds whose macro F1 is at most `max_drop`
    /// below the method's least aggressive setting; ties go to the better
    /// micro F1, then the lower threshold.
    BoundedMacroDrop { max_drop: f64 },
}

impl Default for ThresholdRule {
    fn default() -> Self {
        Self::BoundedMacroDrop { max_drop: 0.0 }
    }
}

/// Evaluate every detector over its grid on precomputed bundles.
pub fn sweep_bundles(bundles: &[PosteriorBundle], truth: &[ClassLabel], grid: &SweepGrid) -> Result<Vec<SweepPoint>> {
    if bundles.len() != truth.len() {
        return Err(Error::Dimension {
            expected: bundles.len(),
            got: truth.len(),
        });
    }
    let n_hidden = truth.iter().filter(|t| t.is_hidden()).count();
    if n_hidden == 0 {
        return Err(Error::InvalidInput("threshold sweep needs hidden-class samples".into()));
    }
    let mut out = Vec::new();
    for method in HiddenMethod::DETECTORS {
        let thrs: Vec<f64> = match method {
            HiddenMethod::Voting => grid.votes.iter().map(|&v| v as f64).collect(),
            _ => grid.continuous.clone(),
        };
        for thr in thrs {
            let cfg = HiddenConfig { method, thr };
            let pred: Vec<ClassLabel> = bundles.iter().map(|b| decide(b, &cfg)).collect();
            let hits = truth.iter().zip(&pred).filter(|(t, p)| t.is_hidden() && p.is_hidden()).count();
            out.push(SweepPoint {
                method,
                thr,
                tpr_hidden: hits as f64 / n_hidden as f64,
                micro_f1: micro_f1(truth, &pred),
                macro_f1: ConfusionMatrix::from_predictions(truth, &pred).macro_f1(),
            });
        }
    }
    Ok(out)
}

pub fn choose_threshold(series: &[SweepPoint], method: HiddenMethod, rule: ThresholdRule) -> Result<HiddenConfig> {
    let points: Vec<&SweepPoint> = series.iter().filter(|p| p.method == method).collect();
    let floor = match rule {
        ThresholdRule::MaxMicroF1 => f64::NEG_INFINITY,
        ThresholdRule::BoundedMacroDrop { max_drop } => {
            let mildest = points
                .iter()
                .min_by(|a, b| a.tpr_hidden.total_cmp(&b.tpr_hidden).then(a.thr.total_cmp(&b.thr)))
                .map_or(0.0, |p| p.macro_f1);
            mildest - max_drop
        }
    };
    let key = |p: &SweepPoint| match rule {
        ThresholdRule::MaxMicroF1 => (p.micro_f1, 0.0),
        ThresholdRule::BoundedMacroDrop { .. } => (p.tpr_hidden, p.micro_f1),
    };
    let mut best: Option<&SweepPoint> = None;
    for p in points.into_iter().filter(|p| p.macro_f1 >= floor) {
        let better = match best {
            None => true,
            Some(b) => key(p) > key(b) || (key(p) == key(b) && p.thr < b.thr),
        };
        if better {
            best = Some(p);
        }
    }
    best.map(|p| HiddenConfig { method, thr: p.thr })
        .ok_or_else(|| Error::InvalidInput(format!("no sweep points for {}", method.name())))
}

/// `method,thr,tpr_hidden,micro_f1,macro_f1` rows.
pub fn write_sweep_csv(series: &[SweepPoint]) -> String {
    let mut s = String::from("method,thr,tpr_hidden,micro_f1,macro_f1\n");
    for p in series {
        s.push_str(&format!("{},{},{},{},{}\n", p.method.name(), p.thr, p.tpr_hidden, p.micro_f1, p.macro_f1));
    }
    s
}

pub fn read_sweep_csv(text: &str) -> Result<Vec<SweepPoint>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |reason: String| Error::Record { line: line + 2, reason };
        let method = HiddenMethod::DETECTORS
            .into_iter()
            .chain([HiddenMethod::None])
            .find(|m| m.name() == &rec[0])
            .ok_or_else(|| bad(format!("unknown method `{}`", &rec[0])))?;
        let num = |i: usize| rec[i].parse::<f64>().map_err(|e| bad(e.to_string()));
        out.push(SweepPoint {
            method,
            thr: num(1)?,
            tpr_hidden: num(2)?,
            micro_f1: num(3)?,
            macro_f1: num(4)?,
        });
    }
    Ok(out)
}
