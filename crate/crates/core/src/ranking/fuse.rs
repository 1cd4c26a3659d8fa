use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Ranking;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusedRanking {
    /// Features in both top lists, ascending.
    pub fixed_set: Vec<usize>,
    /// Remaining features, worst first.
    pub elimination_order: Vec<usize>,
}

/// Fixed set = intersection of both top-`top` lists. The rest is ordered by
/// mean rank position, worst first, ties to the lower index.
pub fn fuse(r1: &Ranking, r2: &Ranking, top: usize) -> Result<FusedRanking> {
    r1.validate()?;
    r2.validate()?;
    if r1.len() != r2.len() {
        return Err(Error::Dimension { expected: r1.len(), got: r2.len() });
    }
    let (p1, p2) = (r1.positions(), r2.positions());
    let n = r1.len();
    let fixed_set: Vec<usize> = (0..n).filter(|&f| p1[f] < top && p2[f] < top).collect();
    let mut rest: Vec<usize> = (0..n).filter(|&f| !(p1[f] < top && p2[f] < top)).collect();
    // Sum of positions orders exactly like their mean.
    rest.sort_by(|&a, &b| (p1[b] + p2[b]).cmp(&(p1[a] + p2[a])).then(a.cmp(&b)));
    Ok(FusedRanking {
        fixed_set,
        elimination_order: rest,
    })
}
