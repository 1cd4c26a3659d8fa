//! Deterministic synthetic radar scenes with labelled road users.

pub mod annotate;
pub mod config;
pub mod perturb;
pub mod scenario;

pub use config::{AugmentationConfig, ClassCounts, ClassProfile, ClassProfiles, GeneratorConfig, Jitter};
pub use perturb::perturb;
pub use scenario::{gen_scenario, parse_assoc, parse_truth_table, write_assoc, write_truth_table, Scenario, TruthRecord};
