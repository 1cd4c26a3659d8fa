//! The 98-feature catalog and per-cluster feature extraction.

pub mod catalog;
pub mod covariance;
pub mod extract;
pub mod geometry;
pub mod io;
pub mod microdoppler;
pub mod stats;

pub use catalog::{Category, CatalogEntry, FeatureCatalog, CATALOG_VERSION, NUM_FEATURES};
pub use extract::{extract_all, transforms, FeatureVector};
pub use io::{read_feature_matrix, write_feature_matrix, FeatureRow};
