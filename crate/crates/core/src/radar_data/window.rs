//! Time windowing of instance tracks and sequence construction.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;

use super::types::{ClassLabel, ClusterSample, InstanceId, RadarDetection, MAX_SEQUENCE_LEN};

/// Split one instance's detections into non-overlapping windows of
/// `window_len` seconds starting at the first detection. Empty windows are
/// dropped. `core` carries the DBSCAN core flag of each detection.
pub fn window_samples(
    instance_id: InstanceId,
    label: ClassLabel,
    detections: &[RadarDetection],
    core: &[bool],
    window_len: f64,
) -> Result<Vec<ClusterSample>> {
    if !(window_len.is_finite() && window_len > 0.0) {
        return Err(Error::InvalidInput(format!("window length {window_len} must be positive")));
    }
    if core.len() != detections.len() {
        return Err(Error::Dimension {
            expected: detections.len(),
            got: core.len(),
        });
    }
    if detections.windows(2).any(|w| w[1].t < w[0].t) {
        return Err(Error::InvalidInput(format!(
            "detections of instance {instance_id} are not sorted by time"
        )));
    }
    let Some(first) = detections.first() else {
        return Ok(Vec::new());
    };
    // Window bounds accumulate by repeated addition so that consecutive
    // windows share their boundary exactly and tile without float gaps.
    let mut start = first.t;
    let mut out: Vec<ClusterSample> = Vec::new();
    for (d, &is_core) in detections.iter().zip(core) {
        while d.t >= start + window_len {
            start += window_len;
        }
        match out.last_mut() {
            Some(s) if s.window_start == start => {
                s.detections.push(*d);
                s.core_count += usize::from(is_core);
            }
            _ => out.push(ClusterSample {
                instance_id,
                label,
                window_start: start,
                window_len,
                detections: vec![*d],
                core_count: usize::from(is_core),
            }),
        }
    }
    Ok(out)
}

/// What to do with samples that are not ordered by window start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderPolicy {
    #[default]
    Reject,
    Resort,
}

/// Up to `max_len` consecutive feature vectors of one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSample {
    pub instance_id: InstanceId,
    pub label: ClassLabel,
    pub feature_vectors: Vec<FeatureVector>,
}

impl SequenceSample {
    pub fn len(&self) -> usize {
        self.feature_vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.feature_vectors.is_empty()
    }
}

/// Index ranges of the sequences ending at each of `n` windows: window `i`
/// yields `max(0, i + 1 - max_len)..i + 1`.
pub fn sequence_ranges(n: usize, max_len: usize) -> Vec<Range<usize>> {
    (0..n).map(|i| (i + 1).saturating_sub(max_len)..i + 1).collect()
}

/// Sliding sequences over one instance's per-window feature vectors.
pub fn build_sequences(
    samples: &[FeatureVector],
    max_len: usize,
    policy: OrderPolicy,
) -> Result<Vec<SequenceSample>> {
    if max_len == 0 || max_len > MAX_SEQUENCE_LEN {
        return Err(Error::InvalidInput(format!(
            "sequence length {max_len} outside 1..={MAX_SEQUENCE_LEN}"
        )));
    }
    let Some(first) = samples.first() else {
        return Ok(Vec::new());
    };
    if samples.iter().any(|s| s.instance_id != first.instance_id) {
        return Err(Error::InvalidInput("build_sequences expects samples of a single instance".into()));
    }
    let owned;
    let mut samples = samples;
    if samples.windows(2).any(|w| w[1].window_start <= w[0].window_start) {
        match policy {
            OrderPolicy::Reject => {
                return Err(Error::InvalidInput(format!(
                    "samples of instance {} are not ordered by window start",
                    first.instance_id
                )))
            }
            OrderPolicy::Resort => {
                let mut sorted = samples.to_vec();
                sorted.sort_by(|a, b| a.window_start.total_cmp(&b.window_start));
                owned = sorted;
                samples = &owned;
            }
        }
    }
    Ok(sequence_ranges(samples.len(), max_len)
        .into_iter()
        .map(|r| SequenceSample {
            instance_id: first.instance_id,
            label: first.label,
            feature_vectors: samples[r].to_vec(),
        })
        .collect())
}
