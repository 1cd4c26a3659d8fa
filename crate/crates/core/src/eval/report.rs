use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::ensemble::{HiddenConfig, SweepPoint};
use crate::features::CATALOG_VERSION;
use crate::radar_data::ClassLabel;

use super::distribution::FeatureDistribution;
use super::metrics::ConfusionMatrix;

pub const REPORT_FORMAT_VERSION: &str = "radarclass-report-1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub seed: u64,
    pub fold: usize,
    pub n_test: usize,
    pub macro_f1: f64,
    pub micro_f1: f64,
}

/// Cross-validated results of one model variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub name: String,
    pub folds: Vec<FoldMetrics>,
    /// Pooled over folds; hidden rows come from the hidden test half.
    pub confusion: ConfusionMatrix,
    pub tpr_hidden: Option<f64>,
}

impl MethodResult {
    /// Mean of the per-fold 6-class macro F1.
    pub fn mean_macro_f1(&self) -> f64 {
        mean(self.folds.iter().map(|f| f.macro_f1))
    }

    pub fn mean_micro_f1(&self) -> f64 {
        mean(self.folds.iter().map(|f| f.micro_f1))
    }
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub format_version: String,
    pub seed: u64,
    pub folds: usize,
    pub results: Vec<MethodResult>,
    pub hidden: HiddenConfig,
    pub distribution: FeatureDistribution,
    pub sweep: Vec<SweepPoint>,
}

impl EvaluationReport {
    pub fn result(&self, name: &str) -> Option<&MethodResult> {
        self.results.iter().find(|r| r.name == name)
    }

    /// Plain-text report with the resolved config echoed at the top.
    pub fn render(&self, config_echo: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {REPORT_FORMAT_VERSION}");
        let _ = writeln!(s, "# catalog {CATALOG_VERSION}");
        let _ = writeln!(s, "\n[config]\n{}", config_echo.trim_end());

        let _ = writeln!(s, "\n[folds]\nmethod seed fold n_test macro_f1 micro_f1");
        for r in &self.results {
            for f in &r.folds {
                let _ = writeln!(s, "{} {} {} {} {:.6} {:.6}", r.name, f.seed, f.fold, f.n_test, f.macro_f1, f.micro_f1);
            }
        }

        let _ = writeln!(s, "\n[aggregate]\nmethod macro_f1 micro_f1 tpr_hidden");
        for r in &self.results {
            let tpr = r.tpr_hidden.map_or("-".to_string(), |t| format!("{t:.6}"));
            let _ = writeln!(s, "{} {:.6} {:.6} {}", r.name, r.mean_macro_f1(), r.mean_micro_f1(), tpr);
        }
        let _ = writeln!(s, "hidden_detector {} {}", self.hidden.method.name(), self.hidden.thr);

        let header: String = ClassLabel::ALL.iter().map(|c| format!(" {}", c.letter())).collect();
        for r in &self.results {
            let _ = writeln!(s, "\n[confusion {}]\ntruth\\pred{header}", r.name);
            for (c, row) in ClassLabel::ALL.iter().zip(&r.confusion.counts) {
                let cells: String = row.iter().map(|v| format!(" {v}")).collect();
                let _ = writeln!(s, "{}{cells}", c.letter());
            }
            let _ = writeln!(s, "\n[confusion_percent {}]\ntruth\\pred{header}", r.name);
            for (c, row) in ClassLabel::ALL.iter().zip(r.confusion.row_normalized()) {
                let cells: String = row.iter().map(|v| format!(" {v:.2}")).collect();
                let _ = writeln!(s, "{}{cells}", c.letter());
            }
        }

        let _ = writeln!(s, "\n[feature_distribution]");
        s.push_str(&self.distribution.to_csv().replace(',', " "));
        let _ = writeln!(s, "median_size {}", self.distribution.median_size);

        let _ = writeln!(s, "\n[sweep]\nmethod thr tpr_hidden micro_f1 macro_f1");
        for p in &self.sweep {
            let _ = writeln!(s, "{} {} {:.6} {:.6} {:.6}", p.method.name(), p.thr, p.tpr_hidden, p.micro_f1, p.macro_f1);
        }
        s
    }
}

/// Confusion matrix as `truth,<class names...>` rows.
pub fn confusion_csv(m: &ConfusionMatrix) -> String {
    let mut s = String::from("truth");
    for c in ClassLabel::ALL {
        let _ = write!(s, ",{}", c.name());
    }
    s.push('\n');
    for (c, row) in ClassLabel::ALL.iter().zip(&m.counts) {
        s.push_str(c.name());
        for v in row {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}
