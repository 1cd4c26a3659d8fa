use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radar_data::ClassLabel;

/// Member posteriors for one sequence: `p_ij` for every ordered pair and
/// `p_i` for every class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorBundle {
    k: usize,
    pair: Vec<f64>,
    one: Vec<f64>,
}

fn check_probability(p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::InvalidInput(format!("posterior {p} outside [0, 1]")))
    }
}

impl PosteriorBundle {
    /// Build from the upper-triangle pair posteriors (`p_ij`, `i < j`, row
    /// by row) and the `k` one-vs-all posteriors; `p_ji` is `1 - p_ij`.
    pub fn from_upper(k: usize, upper: &[f64], ova: &[f64]) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidInput("a bundle needs at least two classes".into()));
        }
        if upper.len() != k * (k - 1) / 2 {
            return Err(Error::MissingMember(format!("expected {} pair posteriors, got {}", k * (k - 1) / 2, upper.len())));
        }
        if ova.len() != k {
            return Err(Error::MissingMember(format!("expected {k} one-vs-all posteriors, got {}", ova.len())));
        }
        let mut pair = vec![0.0; k * k];
        let mut it = upper.iter();
        for i in 0..k {
            for j in i + 1..k {
                let p = check_probability(*it.next().expect("length checked"))?;
                pair[i * k + j] = p;
                pair[j * k + i] = 1.0 - p;
            }
        }
        let one = ova.iter().map(|&p| check_probability(p)).collect::<Result<_>>()?;
        Ok(Self { k, pair, one })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `p_ij`; `i != j`.
    pub fn pair(&self, i: usize, j: usize) -> f64 {
        self.pair[i * self.k + j]
    }

    pub fn one(&self, i: usize) -> f64 {
        self.one[i]
    }
}

/// `s_i = sum_{j != i} p_ij (p_i + p_j)`.
pub fn score_classes(b: &PosteriorBundle) -> Vec<f64> {
    (0..b.k)
        .map(|i| (0..b.k).filter(|&j| j != i).map(|j| b.pair(i, j) * (b.one(i) + b.one(j))).sum())
        .collect()
}

/// Index of the largest score, ties to the lower index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Hidden iff every one-vs-all posterior is below `thr`.
pub fn detect_hidden_ova(b: &PosteriorBundle, thr: f64) -> bool {
    b.one.iter().all(|&p| p < thr)
}

/// Majority votes per class: one from its one-vs-all member and one from
/// each pair member it wins.
pub fn votes(b: &PosteriorBundle) -> Vec<usize> {
    (0..b.k)
        .map(|i| usize::from(b.one(i) > 0.5) + (0..b.k).filter(|&j| j != i && b.pair(i, j) > 0.5).count())
        .collect()
}

/// Hidden iff no class reaches `thr` votes.
pub fn detect_hidden_voting(b: &PosteriorBundle, thr: usize) -> bool {
    votes(b).iter().all(|&v| v < thr)
}

/// Scores divided by their sum; `None` when the sum is zero.
pub fn normalized_scores(b: &PosteriorBundle) -> Option<Vec<f64>> {
    let s = score_classes(b);
    let c: f64 = s.iter().sum();
    (c > 0.0).then(|| s.iter().map(|v| v / c).collect())
}

/// Hidden iff every normalized score is below `thr`; a zero score sum
/// counts as hidden.
pub fn detect_hidden_ovoova(b: &PosteriorBundle, thr: f64) -> bool {
    normalized_scores(b).is_none_or(|s| s.iter().all(|&v| v < thr))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenMethod {
    None,
    OvaThreshold,
    Voting,
    OvoovaThreshold,
}

impl HiddenMethod {
    pub const DETECTORS: [HiddenMethod; 3] = [HiddenMethod::OvaThreshold, HiddenMethod::Voting, HiddenMethod::OvoovaThreshold];

    pub fn name(self) -> &'static str {
        match self {
            HiddenMethod::None => "none",
            HiddenMethod::OvaThreshold => "ova_threshold",
            HiddenMethod::Voting => "voting",
            HiddenMethod::OvoovaThreshold => "ovoova_threshold",
        }
    }
}

/// Detector choice; for voting `thr` is the minimum vote count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HiddenConfig {
    pub method: HiddenMethod,
    pub thr: f64,
}

impl Default for HiddenConfig {
    fn default() -> Self {
        Self {
            method: HiddenMethod::None,
            thr: 0.0,
        }
    }
}

impl HiddenConfig {
    pub fn is_hidden(&self, b: &PosteriorBundle) -> bool {
        match self.method {
            HiddenMethod::None => false,
            HiddenMethod::OvaThreshold => detect_hidden_ova(b, self.thr),
            HiddenMethod::Voting => detect_hidden_voting(b, self.thr.round().max(0.0) as usize),
            HiddenMethod::OvoovaThreshold => detect_hidden_ovoova(b, self.thr),
        }
    }
}

/// Hidden check first, then the arg-max of the aggregated scores.
pub fn decide(b: &PosteriorBundle, hidden: &HiddenConfig) -> ClassLabel {
    if hidden.is_hidden(b) {
        return ClassLabel::Other;
    }
    ClassLabel::TRAINED[argmax(&score_classes(b))]
}
