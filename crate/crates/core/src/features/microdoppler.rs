//! Distribution of radial velocities over the cluster area.

use crate::radar_data::RadarDetection;

use super::covariance::{covariance, principal_axes};
use super::stats::{mean, min_max, pearson, pearson_scaled};

/// |v_r| below which a detection counts as stationary, m/s.
pub const STATIONARY_SPEED: f64 = 0.1;
/// Guard for ratios over a vanishing v_r spread.
pub const SPREAD_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MicroDopplerFeatures {
    pub std_dev_doppler: f64,
    pub frac_stationary: f64,
    pub r_vr_linearity: f64,
    pub phi_vr_linearity: f64,
    pub major_vr_linearity: f64,
    pub minor_vr_linearity: f64,
    pub r_vr_spread: f64,
    pub phi_vr_spread: f64,
    pub major_vr_spread: f64,
    pub minor_vr_spread: f64,
}

impl MicroDopplerFeatures {
    /// The eight spatial-Doppler values of the D block.
    pub fn d_block(&self) -> [f64; 8] {
        [
            self.r_vr_linearity,
            self.phi_vr_linearity,
            self.major_vr_linearity,
            self.minor_vr_linearity,
            self.r_vr_spread,
            self.phi_vr_spread,
            self.major_vr_spread,
            self.minor_vr_spread,
        ]
    }
}

fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = min_max(v);
    if v.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

pub fn microdoppler_features(detections: &[RadarDetection]) -> MicroDopplerFeatures {
    let n = detections.len().max(1) as f64;
    let raw: Vec<f64> = detections.iter().map(|d| d.doppler_raw).collect();
    let vr: Vec<f64> = detections.iter().map(|d| d.doppler_comp).collect();
    let r: Vec<f64> = detections.iter().map(RadarDetection::vehicle_range).collect();
    let phi: Vec<f64> = detections.iter().map(RadarDetection::vehicle_azimuth).collect();
    let x: Vec<f64> = detections.iter().map(|d| d.x).collect();
    let y: Vec<f64> = detections.iter().map(|d| d.y).collect();

    let raw_mean = mean(&raw);
    let std_dev_doppler = (raw.iter().map(|v| (v - raw_mean).powi(2)).sum::<f64>() / n).sqrt();
    let frac_stationary = vr.iter().filter(|v| v.abs() < STATIONARY_SPEED).count() as f64 / n;

    let cov = covariance(&[x.clone(), y.clone()]);
    let (major, minor) = principal_axes(cov[(0, 0)], cov[(0, 1)], cov[(1, 1)]);
    let (mx, my) = (mean(&x), mean(&y));
    let project = |axis: (f64, f64)| -> Vec<f64> {
        x.iter().zip(&y).map(|(&a, &b)| (a - mx) * axis.0 + (b - my) * axis.1).collect()
    };
    let p_major = project(major);
    let p_minor = project(minor);
    // Projection flatness is judged against the cluster's planar extent.
    let extent = spread(&x).max(spread(&y));
    let vr_scale = min_max(&vr).0.abs().max(min_max(&vr).1.abs());

    let vr_spread = spread(&vr).max(SPREAD_EPS);
    MicroDopplerFeatures {
        std_dev_doppler,
        frac_stationary,
        r_vr_linearity: pearson(&r, &vr).abs(),
        phi_vr_linearity: pearson(&phi, &vr).abs(),
        major_vr_linearity: pearson_scaled(&p_major, &vr, extent, vr_scale).abs(),
        minor_vr_linearity: pearson_scaled(&p_minor, &vr, extent, vr_scale).abs(),
        r_vr_spread: spread(&r) / vr_spread,
        phi_vr_spread: spread(&phi) / vr_spread,
        major_vr_spread: spread(&p_major) / vr_spread,
        minor_vr_spread: spread(&p_minor) / vr_spread,
    }
}
