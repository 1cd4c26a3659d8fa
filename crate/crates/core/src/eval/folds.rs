use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::radar_data::{ClassLabel, InstanceId};
use crate::seed;

pub const SELECTION_FOLDS: usize = 5;
pub const FINAL_FOLDS: usize = 10;

/// Instance-grouped, class-stratified fold assignment. Each class's
/// instances are shuffled and dealt round-robin, continuing from where the
/// previous class stopped so fold sizes stay within one of each other.
pub fn kfold_split(instances: &[(InstanceId, ClassLabel)], k: usize, seed: u64) -> Result<BTreeMap<InstanceId, usize>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 folds, got {k}")));
    }
    if instances.is_empty() {
        return Err(Error::InvalidInput("no instances to split".into()));
    }
    let mut by_class: BTreeMap<ClassLabel, Vec<InstanceId>> = BTreeMap::new();
    for &(id, label) in instances {
        by_class.entry(label).or_default().push(id);
    }
    let mut rng = seed::rng(seed::derive(seed, "kfold"));
    let mut out = BTreeMap::new();
    let mut offset = 0;
    for (_, mut ids) in by_class {
        ids.sort_unstable();
        ids.dedup();
        ids.shuffle(&mut rng);
        for (j, id) in ids.iter().enumerate() {
            out.insert(*id, (offset + j) % k);
        }
        offset = (offset + ids.len()) % k;
    }
    Ok(out)
}

/// Split hidden-class instances into instance-disjoint tuning and test
/// halves; the tuning half gets the extra instance when the count is odd.
pub fn hidden_split(instances: &[InstanceId], seed: u64) -> Result<(Vec<InstanceId>, Vec<InstanceId>)> {
    let mut ids = instances.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "hidden split needs at least 2 instances, got {}",
            ids.len()
        )));
    }
    ids.shuffle(&mut seed::rng(seed::derive(seed, "hidden-split")));
    let test = ids.split_off(ids.len().div_ceil(2));
    let mut tuning = ids;
    tuning.sort_unstable();
    let mut test = test;
    test.sort_unstable();
    Ok((tuning, test))
}
