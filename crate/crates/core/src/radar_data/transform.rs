//! Sensor-to-vehicle transform and Doppler ego-motion compensation.

use crate::error::{Error, Result};

use super::types::{EgoState, RadarDetection, RawDetection, SensorPose};

/// Maximum allowed gap between a detection and the nearest ego sample.
pub const EGO_TOLERANCE: f64 = 0.050;

/// Place a sensor-polar detection in the vehicle frame.
///
/// `doppler_comp` is initialised to `doppler_raw`; use [`compensate_doppler`]
/// to fill it in.
pub fn to_vehicle_frame(d: &RawDetection, pose: &SensorPose) -> Result<RadarDetection> {
    let fields = [d.t, d.range, d.azimuth, d.doppler_raw, d.amplitude];
    if fields.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite field in detection from sensor {} at t = {}",
            d.sensor_id, d.t
        )));
    }
    if d.range < 0.0 {
        return Err(Error::InvalidInput(format!("negative range {}", d.range)));
    }
    let bearing = pose.yaw + d.azimuth;
    Ok(RadarDetection {
        sensor_id: d.sensor_id,
        t: d.t,
        range: d.range,
        azimuth: d.azimuth,
        doppler_raw: d.doppler_raw,
        doppler_comp: d.doppler_raw,
        amplitude: d.amplitude,
        x: pose.mount_x + d.range * bearing.cos(),
        y: pose.mount_y + d.range * bearing.sin(),
    })
}

/// Velocity of the sensor mount in vehicle axes for a rigid vehicle moving
/// forward at `speed` while turning at `yaw_rate`.
pub fn sensor_velocity(ego: &EgoState, pose: &SensorPose) -> (f64, f64) {
    (
        ego.speed - ego.yaw_rate * pose.mount_y,
        ego.yaw_rate * pose.mount_x,
    )
}

/// Ego-compensated radial velocity of `d`.
///
/// The measured range rate of a target is the projection of
/// `v_target - v_sensor` onto the line of sight, so adding back
/// `v_sensor · u` leaves the target's own radial velocity. Stationary world
/// points compensate to zero.
pub fn compensate_doppler(d: &RadarDetection, ego: &EgoState, pose: &SensorPose) -> Result<f64> {
    if (ego.t - d.t).abs() > EGO_TOLERANCE + 1e-12 {
        return Err(Error::EgoGap {
            t: d.t,
            tolerance: EGO_TOLERANCE,
        });
    }
    let bearing = pose.yaw + d.azimuth;
    let (vx, vy) = sensor_velocity(ego, pose);
    Ok(d.doppler_raw + vx * bearing.cos() + vy * bearing.sin())
}

/// Time-ordered ego log with nearest-sample lookup.
#[derive(Clone, Debug, Default)]
pub struct EgoTrack {
    states: Vec<EgoState>,
}

impl EgoTrack {
    pub fn new(mut states: Vec<EgoState>) -> Result<Self> {
        if let Some(s) = states.iter().find(|s| !(s.t.is_finite() && s.speed.is_finite() && s.yaw_rate.is_finite())) {
            return Err(Error::InvalidInput(format!("non-finite ego state at t = {}", s.t)));
        }
        if let Some(s) = states.iter().find(|s| s.speed < 0.0) {
            return Err(Error::InvalidInput(format!("negative ego speed at t = {}", s.t)));
        }
        states.sort_by(|a, b| a.t.total_cmp(&b.t));
        Ok(Self { states })
    }

    pub fn states(&self) -> &[EgoState] {
        &self.states
    }

    /// Ego sample closest to `t`, if one lies within [`EGO_TOLERANCE`].
    pub fn nearest(&self, t: f64) -> Result<&EgoState> {
        let idx = self.states.partition_point(|s| s.t < t);
        let candidates = [idx.checked_sub(1), Some(idx)];
        candidates
            .iter()
            .flatten()
            .filter_map(|&i| self.states.get(i))
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .filter(|s| (s.t - t).abs() <= EGO_TOLERANCE + 1e-12)
            .ok_or(Error::EgoGap {
                t,
                tolerance: EGO_TOLERANCE,
            })
    }
}
