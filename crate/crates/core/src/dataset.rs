//! Feature windows grouped into per-instance sliding sequences.

use std::collections::BTreeMap;

use crate::features::FeatureRow;
use crate::radar_data::{sequence_ranges, ClassLabel, InstanceId, MAX_SEQUENCE_LEN};

/// One sequence as indices into [`SequenceSet::windows`].
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceRef {
    pub instance_id: InstanceId,
    pub label: ClassLabel,
    pub steps: Vec<usize>,
    /// Augmentation copy, 0 for original data.
    pub copy: u32,
}

impl SequenceRef {
    pub fn is_augmented(&self) -> bool {
        self.copy > 0
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SequenceSet {
    pub windows: Vec<Vec<f64>>,
    pub sequences: Vec<SequenceRef>,
}

impl SequenceSet {
    /// Group rows by (instance, copy), order each group by window start and
    /// emit one sequence ending at every window.
    pub fn from_rows(rows: &[FeatureRow], max_len: usize) -> Self {
        let max_len = max_len.clamp(1, MAX_SEQUENCE_LEN);
        let mut groups: BTreeMap<(InstanceId, u32), Vec<&FeatureRow>> = BTreeMap::new();
        for r in rows {
            groups.entry((r.vector.instance_id, r.copy.unwrap_or(0))).or_default().push(r);
        }
        let mut set = SequenceSet::default();
        for ((instance_id, copy), mut g) in groups {
            g.sort_by(|a, b| a.vector.window_start.total_cmp(&b.vector.window_start));
            let base = set.windows.len();
            set.windows.extend(g.iter().map(|r| r.vector.values.clone()));
            for range in sequence_ranges(g.len(), max_len) {
                set.sequences.push(SequenceRef {
                    instance_id,
                    label: g[0].vector.label,
                    steps: range.map(|k| base + k).collect(),
                    copy,
                });
            }
        }
        set
    }

    pub fn steps(&self, i: usize) -> Vec<&[f64]> {
        self.sequences[i].steps.iter().map(|&k| self.windows[k].as_slice()).collect()
    }

    /// Instances with their labels, from original (non-augmented) data.
    pub fn instances(&self) -> Vec<(InstanceId, ClassLabel)> {
        let m: BTreeMap<InstanceId, ClassLabel> = self
            .sequences
            .iter()
            .filter(|s| !s.is_augmented())
            .map(|s| (s.instance_id, s.label))
            .collect();
        m.into_iter().collect()
    }
}
