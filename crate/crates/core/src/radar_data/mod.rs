//! Detection data model, frame transforms, clustering, windowing and
//! sequence building.

pub mod dbscan;
pub mod io;
pub mod transform;
pub mod types;
pub mod window;

pub use dbscan::{dbscan, dbscan_cluster, Clustering, DbscanParams, StPoint};
pub use transform::{compensate_doppler, to_vehicle_frame, EgoTrack, EGO_TOLERANCE};
pub use types::*;
pub use window::{build_sequences, sequence_ranges, window_samples, OrderPolicy, SequenceSample};
