//! Radar road-user classification toolkit.

pub mod classifier;
pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod features;
pub mod pipeline;
pub mod radar_data;
pub mod ranking;
pub mod seed;
pub mod selection;
pub mod synthgen;

pub use error::{Error, Result};
