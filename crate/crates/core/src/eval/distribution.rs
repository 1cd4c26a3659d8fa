use serde::{Deserialize, Serialize};

use crate::features::{Category, FeatureCatalog};
use crate::selection::{FeatureMask, TaskId};

/// Active features per category for each member, plus the median mask size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureDistribution {
    pub rows: Vec<(TaskId, [usize; 6], usize)>,
    pub median_size: f64,
}

pub fn feature_distribution_report(masks: &[FeatureMask], catalog: &FeatureCatalog) -> FeatureDistribution {
    let rows: Vec<(TaskId, [usize; 6], usize)> = masks
        .iter()
        .map(|m| {
            let mut counts = [0; 6];
            for i in m.active_indices() {
                counts[catalog.category(i) as usize] += 1;
            }
            (m.owner, counts, m.count())
        })
        .collect();
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.2).collect();
    sizes.sort_unstable();
    let median_size = match sizes.len() {
        0 => 0.0,
        n if n % 2 == 1 => sizes[n / 2] as f64,
        n => (sizes[n / 2 - 1] + sizes[n / 2]) as f64 / 2.0,
    };
    FeatureDistribution { rows, median_size }
}

impl FeatureDistribution {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("classifier");
        for c in Category::ALL {
            s.push(',');
            s.push(c.letter());
        }
        s.push_str(",total\n");
        for (t, counts, total) in &self.rows {
            s.push_str(&t.to_string());
            for c in counts {
                s.push_str(&format!(",{c}"));
            }
            s.push_str(&format!(",{total}\n"));
        }
        s
    }
}
