use serde::{Deserialize, Serialize};

use crate::radar_data::ClassLabel;

/// Rows are truth, columns prediction, both in [`ClassLabel::ALL`] order
/// with the hidden class last.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 7]; 7],
}

impl ConfusionMatrix {
    pub fn from_predictions(truth: &[ClassLabel], pred: &[ClassLabel]) -> Self {
        let mut m = Self::default();
        for (t, p) in truth.iter().zip(pred) {
            m.add(*t, *p);
        }
        m
    }

    pub fn add(&mut self, truth: ClassLabel, pred: ClassLabel) {
        self.counts[truth.index()][pred.index()] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (r, o) in self.counts.iter_mut().zip(&other.counts) {
            for (a, b) in r.iter_mut().zip(o) {
                *a += b;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Rows scaled to percent; empty rows stay zero.
    pub fn row_normalized(&self) -> [[f64; 7]; 7] {
        let mut out = [[0.0; 7]; 7];
        for (r, row) in self.counts.iter().enumerate() {
            let s: u64 = row.iter().sum();
            if s > 0 {
                for c in 0..7 {
                    out[r][c] = 100.0 * row[c] as f64 / s as f64;
                }
            }
        }
        out
    }

    /// Macro F1 over the six trained classes, on samples whose truth is a
    /// trained class. A hidden prediction counts as a miss.
    pub fn macro_f1(&self) -> f64 {
        let rows: Vec<Vec<u64>> = self.counts.iter().map(|r| r.to_vec()).collect();
        macro_f1(&rows, ClassLabel::K)
    }

    /// Overall accuracy, hidden counted as its own label.
    pub fn micro_f1(&self) -> f64 {
        let t = self.total();
        if t == 0 {
            return 0.0;
        }
        (0..7).map(|i| self.counts[i][i]).sum::<u64>() as f64 / t as f64
    }

    /// Fraction of hidden-class samples flagged as hidden.
    pub fn tpr_hidden(&self) -> Option<f64> {
        let h = ClassLabel::Other.index();
        let row: u64 = self.counts[h].iter().sum();
        (row > 0).then(|| self.counts[h][h] as f64 / row as f64)
    }
}

fn f1(tp: u64, fp: u64, fn_: u64) -> f64 {
    let p = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
    let r = if tp + fn_ > 0 { tp as f64 / (tp + fn_) as f64 } else { 0.0 };
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// Mean F1 of the first `k` classes of a square count matrix, using only its
/// first `k` rows. Columns beyond `k` count as misses; 0/0 is 0.
pub fn macro_f1(counts: &[Vec<u64>], k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    (0..k)
        .map(|i| {
            let tp = counts[i][i];
            let fp: u64 = (0..k).filter(|&r| r != i).map(|r| counts[r][i]).sum();
            let fn_: u64 = counts[i].iter().enumerate().filter(|&(c, _)| c != i).map(|(_, &v)| v).sum();
            f1(tp, fp, fn_)
        })
        .sum::<f64>()
        / k as f64
}

/// Micro F1 of a single-label multiclass problem, which is its accuracy.
pub fn micro_f1<T: PartialEq>(truth: &[T], pred: &[T]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    truth.iter().zip(pred).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}
