//! Cross-validation folds, classification metrics and report tables.

pub mod distribution;
pub mod folds;
pub mod metrics;
pub mod report;

pub use distribution::{feature_distribution_report, FeatureDistribution};
pub use folds::{hidden_split, kfold_split, FINAL_FOLDS, SELECTION_FOLDS};
pub use metrics::{macro_f1, micro_f1, ConfusionMatrix};
pub use report::{confusion_csv, EvaluationReport, FoldMetrics, MethodResult, REPORT_FORMAT_VERSION};
