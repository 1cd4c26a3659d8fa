use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::radar_data::{ClassLabel, ClusterSample, InstanceId, RadarDetection};

use super::catalog::{idx, NUM_FEATURES};
use super::covariance::cov_features;
use super::geometry::geometry_features;
use super::microdoppler::microdoppler_features;
use super::stats::base_stats;

/// Guard added before taking the logarithm of a magnitude.
pub const LOG_EPS: f64 = 1e-9;

/// One window's 98 features, aligned to [`FeatureCatalog::standard`].
///
/// [`FeatureCatalog::standard`]: super::FeatureCatalog::standard
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub instance_id: InstanceId,
    pub window_start: f64,
    pub label: ClassLabel,
}

/// log(|u| + ε), sqrt(|u|) and u² of each input, grouped by operation.
pub fn transforms(mean_amplitude: f64, range_spread: f64, angle_spread: f64, mean_velocity: f64) -> [f64; 12] {
    let u = [mean_amplitude, range_spread, angle_spread, mean_velocity];
    let mut out = [0.0; 12];
    for (k, &v) in u.iter().enumerate() {
        out[k] = (v.abs() + LOG_EPS).ln();
        out[4 + k] = v.abs().sqrt();
        out[8 + k] = v * v;
    }
    out
}

fn canonical_order(dets: &[RadarDetection]) -> Vec<RadarDetection> {
    let mut d = dets.to_vec();
    d.sort_by(|a, b| {
        a.t.total_cmp(&b.t)
            .then(a.x.total_cmp(&b.x))
            .then(a.y.total_cmp(&b.y))
            .then(a.doppler_comp.total_cmp(&b.doppler_comp))
            .then(a.amplitude.total_cmp(&b.amplitude))
            .then(a.doppler_raw.total_cmp(&b.doppler_raw))
            .then(a.sensor_id.cmp(&b.sensor_id))
    });
    d
}

/// Full feature vector of one cluster sample.
pub fn extract_all(sample: &ClusterSample) -> Result<FeatureVector> {
    sample.validate()?;
    let dets = canonical_order(&sample.detections);
    let mut values = vec![0.0; NUM_FEATURES];

    let amp: Vec<f64> = dets.iter().map(|d| d.amplitude).collect();
    let range: Vec<f64> = dets.iter().map(RadarDetection::vehicle_range).collect();
    let phi: Vec<f64> = dets.iter().map(RadarDetection::vehicle_azimuth).collect();
    let vr: Vec<f64> = dets.iter().map(|d| d.doppler_comp).collect();
    let stats = [base_stats(&amp)?, base_stats(&range)?, base_stats(&phi)?, base_stats(&vr)?];
    for (k, s) in stats.iter().enumerate() {
        values[idx::BASE_STATS + 9 * k..idx::BASE_STATS + 9 * (k + 1)].copy_from_slice(&s.to_array());
    }
    let t = transforms(stats[0].mean, stats[1].spread, stats[2].spread, stats[3].mean);
    values[idx::TRANSFORMS..idx::TRANSFORMS + 12].copy_from_slice(&t);
    values[idx::COV..idx::COV + 18].copy_from_slice(&cov_features(&dets).to_array());

    let g = geometry_features(&dets, sample.core_count);
    let m = microdoppler_features(&dets);
    values[idx::AMP_SUM] = g.amp_sum;
    values[idx::PHI_SPREAD_COMP] = g.phi_spread_comp;
    values[idx::STD_DEV_DOPPLER] = m.std_dev_doppler;
    values[idx::FRAC_STATIONARY] = m.frac_stationary;
    values[idx::N_DETECTS..idx::N_DETECTS + 20].copy_from_slice(&g.shape_block());
    values[idx::D_FAMILY..idx::D_FAMILY + 8].copy_from_slice(&m.d_block());

    debug_assert!(values.iter().all(|v| v.is_finite()), "non-finite feature");
    Ok(FeatureVector {
        values,
        instance_id: sample.instance_id,
        window_start: sample.window_start,
        label: sample.label,
    })
}
