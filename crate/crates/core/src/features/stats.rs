//! Summary statistics over one base quantity of a cluster.
//!
//! Moments are population moments (divide by n). Skewness and kurtosis are
//! standardised (m3/σ³, m4/σ⁴, non-excess); a flat input maps both to 0.

use crate::error::{Error, Result};

/// Relative spread below which a variable is treated as constant.
pub(crate) const FLAT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub mean_abs_dev: f64,
    pub var: f64,
    pub std_dev: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub spread: f64,
}

impl BaseStats {
    pub fn to_array(&self) -> [f64; 9] {
        [
            self.min,
            self.max,
            self.mean,
            self.mean_abs_dev,
            self.var,
            self.std_dev,
            self.skewness,
            self.kurtosis,
            self.spread,
        ]
    }
}

pub(crate) fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Whether `values` are constant relative to `scale`.
pub(crate) fn is_flat(values: &[f64], scale: f64) -> bool {
    let (lo, hi) = min_max(values);
    let spread = hi - lo;
    spread == 0.0 || spread <= FLAT_TOLERANCE * scale
}

fn magnitude(values: &[f64]) -> f64 {
    let (lo, hi) = min_max(values);
    lo.abs().max(hi.abs())
}

pub fn base_stats(values: &[f64]) -> Result<BaseStats> {
    if values.is_empty() {
        return Err(Error::InvalidInput("statistics of an empty cluster".into()));
    }
    let n = values.len() as f64;
    let (min, max) = min_max(values);
    if min == max {
        return Ok(BaseStats {
            min,
            max,
            mean: min,
            mean_abs_dev: 0.0,
            var: 0.0,
            std_dev: 0.0,
            skewness: 0.0,
            kurtosis: 0.0,
            spread: 0.0,
        });
    }
    let mean = mean(values);
    let (mut abs, mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        abs += d.abs();
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (abs, m2, m3, m4) = (abs / n, m2 / n, m3 / n, m4 / n);
    let std_dev = m2.sqrt();
    let (skewness, kurtosis) = if is_flat(values, magnitude(values)) || std_dev == 0.0 {
        (0.0, 0.0)
    } else {
        (m3 / (std_dev * std_dev * std_dev), m4 / (m2 * m2))
    };
    Ok(BaseStats {
        min,
        max,
        mean,
        mean_abs_dev: abs,
        var: m2,
        std_dev,
        skewness,
        kurtosis,
        spread: max - min,
    })
}

/// Pearson correlation with flatness judged against explicit scales.
pub(crate) fn pearson_scaled(x: &[f64], y: &[f64], scale_x: f64, scale_y: f64) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    if x.len() < 2 || is_flat(x, scale_x) || is_flat(y, scale_y) {
        return 0.0;
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Pearson correlation; a constant variable gives 0.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    pearson_scaled(x, y, magnitude(x), magnitude(y))
}
