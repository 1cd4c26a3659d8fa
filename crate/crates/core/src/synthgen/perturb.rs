use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::radar_data::{ClusterSample, RadarDetection, SensorRig};
use crate::seed;

use super::config::AugmentationConfig;

fn jitter<R: Rng>(rng: &mut R, sd: f64) -> f64 {
    if sd > 0.0 {
        Normal::new(0.0, sd).map_or(0.0, |n| n.sample(rng))
    } else {
        0.0
    }
}

fn deteriorate<R: Rng>(d: &RadarDetection, aug: &AugmentationConfig, rig: &SensorRig, rng: &mut R) -> RadarDetection {
    let j = &aug.jitter;
    let range = (d.range + jitter(rng, j.range)).max(0.0);
    let azimuth = d.azimuth + jitter(rng, j.azimuth);
    let dv = jitter(rng, j.doppler);
    let amplitude = d.amplitude + jitter(rng, j.amplitude);
    // Position follows the jittered polar measurement.
    let (x, y) = match rig.poses.get(usize::from(d.sensor_id)) {
        Some(p) => (
            p.mount_x + range * (p.yaw + azimuth).cos(),
            p.mount_y + range * (p.yaw + azimuth).sin(),
        ),
        None => (d.x, d.y),
    };
    RadarDetection {
        range,
        azimuth,
        doppler_raw: d.doppler_raw + dv,
        doppler_comp: d.doppler_comp + dv,
        amplitude,
        x,
        y,
        ..*d
    }
}

/// Deteriorated copies of cluster samples: random detection drop-out plus
/// zero-mean jitter. At least one detection always survives.
pub fn perturb(samples: &[ClusterSample], aug: &AugmentationConfig, rig: &SensorRig, seed: u64) -> Vec<ClusterSample> {
    samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut rng = seed::rng(seed::derive_indexed(seed, "perturb", i as u64));
            let mut keep: Vec<bool> = s.detections.iter().map(|_| !rng.random_bool(aug.drop_prob)).collect();
            if !keep.iter().any(|&k| k) && !keep.is_empty() {
                let k = rng.random_range(0..keep.len());
                keep[k] = true;
            }
            let detections: Vec<RadarDetection> = s
                .detections
                .iter()
                .zip(&keep)
                .filter(|(_, &k)| k)
                .map(|(d, _)| deteriorate(d, aug, rig, &mut rng))
                .collect();
            // Core flags are not stored per detection; keep the core ratio.
            let n = s.detections.len().max(1) as f64;
            let core_count = ((s.core_count as f64 * detections.len() as f64 / n).round() as usize).min(detections.len());
            ClusterSample {
                detections,
                core_count,
                ..s.clone()
            }
        })
        .collect()
}
