//! Turns a generated scene into labelled cluster samples: vehicle-frame
//! transform, ego compensation, DBSCAN, and cluster labelling from the
//! per-detection association sidecar.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::radar_data::io::LabeledDetection;
use crate::radar_data::{
    compensate_doppler, dbscan_cluster, to_vehicle_frame, window_samples, ClassLabel, ClusterSample, DbscanParams,
    EgoTrack, InstanceId, RadarDetection, RawDetection, SensorRig,
};

use super::scenario::TruthRecord;

/// Ingest raw detections into the vehicle frame with compensated Doppler.
pub fn ingest(raw: &[RawDetection], ego: &EgoTrack, rig: &SensorRig) -> Result<Vec<RadarDetection>> {
    raw.iter()
        .map(|r| {
            let pose = rig.pose(r.sensor_id)?;
            let mut d = to_vehicle_frame(r, pose)?;
            d.doppler_comp = compensate_doppler(&d, ego.nearest(d.t)?, pose)?;
            Ok(d)
        })
        .collect()
}

/// Cluster the scene and label every cluster with the instance owning most
/// of its detections (ties to the lower id). Noise points are dropped.
pub fn cluster_scene(
    detections: &[RadarDetection],
    assoc: &[InstanceId],
    truth: &[TruthRecord],
    params: &DbscanParams,
) -> Result<Vec<LabeledDetection>> {
    if assoc.len() != detections.len() {
        return Err(Error::Dimension {
            expected: detections.len(),
            got: assoc.len(),
        });
    }
    let labels: BTreeMap<InstanceId, ClassLabel> = truth.iter().map(|r| (r.instance_id, r.label)).collect();
    let clustering = dbscan_cluster(detections, params)?;
    let mut votes: Vec<BTreeMap<InstanceId, usize>> = vec![BTreeMap::new(); clustering.n_clusters];
    for (l, id) in clustering.labels.iter().zip(assoc) {
        if let Some(c) = l {
            *votes[*c].entry(*id).or_default() += 1;
        }
    }
    let owner: Vec<InstanceId> = votes
        .iter()
        .map(|v| {
            // Reverse iteration so `max_by_key` keeps the lowest id on ties.
            v.iter().rev().max_by_key(|(_, &n)| n).map(|(&id, _)| id).unwrap_or(InstanceId(0))
        })
        .collect();
    let mut out = Vec::new();
    for (i, d) in detections.iter().enumerate() {
        let Some(c) = clustering.labels[i] else {
            continue;
        };
        let id = owner[c];
        let label = *labels
            .get(&id)
            .ok_or_else(|| Error::InvalidInput(format!("instance {id} missing from truth table")))?;
        out.push(LabeledDetection {
            instance_id: id,
            label,
            cluster: c,
            core: clustering.core[i],
            detection: *d,
        });
    }
    Ok(out)
}

/// Window every instance's labelled detections into cluster samples,
/// ordered by instance id then window start.
pub fn cluster_samples(labeled: &[LabeledDetection], window_len: f64) -> Result<Vec<ClusterSample>> {
    let mut by_instance: BTreeMap<InstanceId, Vec<&LabeledDetection>> = BTreeMap::new();
    for l in labeled {
        by_instance.entry(l.instance_id).or_default().push(l);
    }
    let mut out = Vec::new();
    for (id, mut dets) in by_instance {
        dets.sort_by(|a, b| a.detection.t.total_cmp(&b.detection.t));
        let d: Vec<RadarDetection> = dets.iter().map(|l| l.detection).collect();
        let core: Vec<bool> = dets.iter().map(|l| l.core).collect();
        out.extend(window_samples(id, dets[0].label, &d, &core, window_len)?);
    }
    Ok(out)
}
