//! Filter rankings (JMI, MultiSURF) and their fusion into a fixed feature
//! set plus an elimination order.

pub mod fuse;
pub mod jmi;
pub mod multisurf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureCatalog;

pub use fuse::{fuse, FusedRanking};
pub use jmi::{discretize, jmi_rank, mutual_information};
pub use multisurf::{multisurf_rank, multisurf_weights};

/// Feature indices best first, with `scores[k]` belonging to `order[k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub order: Vec<usize>,
    pub scores: Vec<f64>,
}

impl Ranking {
    /// Order by descending score, ties to the lower index.
    pub fn from_scores(scores: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        Self {
            scores: order.iter().map(|&i| scores[i]).collect(),
            order,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Position of every feature index in the order.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (p, &f) in self.order.iter().enumerate() {
            pos[f] = p;
        }
        pos
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.order.len();
        let mut seen = vec![false; n];
        for &f in &self.order {
            if f >= n || std::mem::replace(&mut seen[f], true) {
                return Err(Error::InvalidInput("ranking is not a permutation".into()));
            }
        }
        if self.scores.len() != n || self.scores.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidInput("ranking scores must be non-increasing".into()));
        }
        Ok(())
    }
}

/// `classifier,position,index,name,score` rows for a set of rankings.
pub fn write_rankings(rankings: &[(String, &Ranking)]) -> Result<String> {
    let catalog = FeatureCatalog::standard();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["classifier", "position", "index", "name", "score"])?;
    for (name, r) in rankings {
        for (p, (&f, s)) in r.order.iter().zip(&r.scores).enumerate() {
            let feature = if f < catalog.len() { catalog.name(f).to_string() } else { format!("f{f}") };
            w.write_record([name.clone(), p.to_string(), f.to_string(), feature, s.to_string()])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::io("<rankings>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
