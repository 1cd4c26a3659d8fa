//! Covariance eigen-structure of the (x, y) and (x, y, v_r, A) point clouds.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::radar_data::RadarDetection;

use super::stats::mean;

/// χ² 95 % quantiles for 2 and 4 degrees of freedom.
pub const CHI2_95_DF2: f64 = 5.991;
pub const CHI2_95_DF4: f64 = 9.488;

/// Population covariance matrix of variables given column by column.
pub fn covariance(columns: &[Vec<f64>]) -> DMatrix<f64> {
    let d = columns.len();
    let n = columns.first().map_or(0, Vec::len);
    let means: Vec<f64> = columns.iter().map(|c| mean(c)).collect();
    let mut cov = DMatrix::zeros(d, d);
    if n == 0 {
        return cov;
    }
    for i in 0..d {
        for j in i..d {
            let s: f64 = columns[i]
                .iter()
                .zip(&columns[j])
                .map(|(a, b)| (a - means[i]) * (b - means[j]))
                .sum();
            cov[(i, j)] = s / n as f64;
            cov[(j, i)] = cov[(i, j)];
        }
    }
    cov
}

/// Eigenvalues in descending order; round-off negatives clamp to zero.
pub fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().map(|v| v.max(0.0)).collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// 18 values: eigenvalues (2 for x/y, 4 for x/y/v_r/A), their squares, and
/// the 95 % confidence-ellipse axis lengths 2·sqrt(χ²·λ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovFeatures {
    pub ev_xy: [f64; 2],
    pub ev_xyva: [f64; 4],
}

impl CovFeatures {
    pub fn to_array(&self) -> [f64; 18] {
        let mut out = [0.0; 18];
        let all: Vec<(f64, f64)> = self
            .ev_xy
            .iter()
            .map(|&l| (l, CHI2_95_DF2))
            .chain(self.ev_xyva.iter().map(|&l| (l, CHI2_95_DF4)))
            .collect();
        for (k, &(l, chi2)) in all.iter().enumerate() {
            out[k] = l;
            out[6 + k] = l * l;
            out[12 + k] = 2.0 * (chi2 * l).sqrt();
        }
        out
    }
}

pub fn cov_features(detections: &[RadarDetection]) -> CovFeatures {
    if detections.len() < 2 {
        return CovFeatures {
            ev_xy: [0.0; 2],
            ev_xyva: [0.0; 4],
        };
    }
    let x: Vec<f64> = detections.iter().map(|d| d.x).collect();
    let y: Vec<f64> = detections.iter().map(|d| d.y).collect();
    let v: Vec<f64> = detections.iter().map(|d| d.doppler_comp).collect();
    let a: Vec<f64> = detections.iter().map(|d| d.amplitude).collect();
    let xy = sorted_eigenvalues(covariance(&[x.clone(), y.clone()]));
    let all = sorted_eigenvalues(covariance(&[x, y, v, a]));
    CovFeatures {
        ev_xy: [xy[0], xy[1]],
        ev_xyva: [all[0], all[1], all[2], all[3]],
    }
}

/// Unit eigenvectors (major, minor) of a 2×2 symmetric matrix
/// `[[a, b], [b, c]]`. Isotropic or diagonal inputs fall back to the axes.
pub fn principal_axes(a: f64, b: f64, c: f64) -> ((f64, f64), (f64, f64)) {
    let major = if b == 0.0 {
        if a >= c {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        }
    } else {
        let l1 = 0.5 * (a + c) + (0.25 * (a - c) * (a - c) + b * b).sqrt();
        let (vx, vy) = if a >= c { (l1 - c, b) } else { (b, l1 - a) };
        let norm = vx.hypot(vy);
        (vx / norm, vy / norm)
    };
    (major, (-major.1, major.0))
}
