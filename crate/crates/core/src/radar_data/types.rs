use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default half-width of a sensor's azimuth field of view (±45°).
pub const DEFAULT_FOV_HALF: f64 = std::f64::consts::FRAC_PI_4;

/// Default sampling window for cluster samples, in seconds.
pub const DEFAULT_WINDOW_LEN: f64 = 0.150;

/// Maximum number of consecutive windows concatenated into one sequence.
pub const MAX_SEQUENCE_LEN: usize = 8;

/// Road-user classes. The first six are the trained classes; `Other` is the
/// hidden class that is never shown to the classifiers during training.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassLabel {
    Pedestrian,
    Group,
    Bike,
    Car,
    Truck,
    Garbage,
    Other,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 7] = [
        ClassLabel::Pedestrian,
        ClassLabel::Group,
        ClassLabel::Bike,
        ClassLabel::Car,
        ClassLabel::Truck,
        ClassLabel::Garbage,
        ClassLabel::Other,
    ];

    pub const TRAINED: [ClassLabel; 6] = [
        ClassLabel::Pedestrian,
        ClassLabel::Group,
        ClassLabel::Bike,
        ClassLabel::Car,
        ClassLabel::Truck,
        ClassLabel::Garbage,
    ];

    /// Number of trained classes.
    pub const K: usize = 6;

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn is_hidden(self) -> bool {
        self == ClassLabel::Other
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassLabel::Pedestrian => "pedestrian",
            ClassLabel::Group => "group",
            ClassLabel::Bike => "bike",
            ClassLabel::Car => "car",
            ClassLabel::Truck => "truck",
            ClassLabel::Garbage => "garbage",
            ClassLabel::Other => "other",
        }
    }

    /// One-letter code used in feature-distribution tables.
    pub fn letter(self) -> char {
        match self {
            ClassLabel::Pedestrian => 'P',
            ClassLabel::Group => 'G',
            ClassLabel::Bike => 'B',
            ClassLabel::Car => 'C',
            ClassLabel::Truck => 'T',
            ClassLabel::Garbage => 'R',
            ClassLabel::Other => 'O',
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown class label `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InstanceId(pub u32);

impl fmt::Display for InstanceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Mounting pose of one sensor in the vehicle frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorPose {
    pub mount_x: f64,
    pub mount_y: f64,
    /// Boresight yaw in (−π, π].
    pub yaw: f64,
}

impl SensorPose {
    pub fn new(mount_x: f64, mount_y: f64, yaw: f64) -> Result<Self> {
        if !(mount_x.is_finite() && mount_y.is_finite() && yaw.is_finite()) {
            return Err(Error::InvalidInput("non-finite sensor pose".into()));
        }
        if !(yaw > -std::f64::consts::PI && yaw <= std::f64::consts::PI) {
            return Err(Error::InvalidInput(format!("sensor yaw {yaw} outside (-pi, pi]")));
        }
        Ok(Self {
            mount_x,
            mount_y,
            yaw,
        })
    }
}

/// Sensor poses indexed by `sensor_id`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorRig {
    pub poses: Vec<SensorPose>,
    pub fov_half: f64,
}

impl SensorRig {
    /// Four sensors spread over the front half of the test vehicle.
    pub fn front_half() -> Self {
        Self {
            poses: vec![
                SensorPose { mount_x: 3.6, mount_y: 0.7, yaw: 0.45 },
                SensorPose { mount_x: 3.6, mount_y: -0.7, yaw: -0.45 },
                SensorPose { mount_x: 2.9, mount_y: 0.9, yaw: 1.2 },
                SensorPose { mount_x: 2.9, mount_y: -0.9, yaw: -1.2 },
            ],
            fov_half: DEFAULT_FOV_HALF,
        }
    }

    pub fn pose(&self, sensor_id: u8) -> Result<&SensorPose> {
        self.poses
            .get(usize::from(sensor_id))
            .ok_or_else(|| Error::InvalidInput(format!("unknown sensor id {sensor_id}")))
    }
}

/// Ego vehicle state sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EgoState {
    pub t: f64,
    /// Forward speed, m/s, ≥ 0.
    pub speed: f64,
    pub yaw_rate: f64,
}

/// A detection as reported by one sensor, before any frame transform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawDetection {
    pub sensor_id: u8,
    pub t: f64,
    pub range: f64,
    pub azimuth: f64,
    pub doppler_raw: f64,
    pub amplitude: f64,
}

/// One resolved radar point with vehicle-frame coordinates and
/// ego-compensated Doppler.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadarDetection {
    pub sensor_id: u8,
    pub t: f64,
    pub range: f64,
    /// Sensor-frame azimuth, radians.
    pub azimuth: f64,
    pub doppler_raw: f64,
    pub doppler_comp: f64,
    /// dB.
    pub amplitude: f64,
    pub x: f64,
    pub y: f64,
}

impl RadarDetection {
    /// Distance from the vehicle origin.
    pub fn vehicle_range(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Azimuth seen from the vehicle origin.
    pub fn vehicle_azimuth(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn raw(&self) -> RawDetection {
        RawDetection {
            sensor_id: self.sensor_id,
            t: self.t,
            range: self.range,
            azimuth: self.azimuth,
            doppler_raw: self.doppler_raw,
            amplitude: self.amplitude,
        }
    }
}

/// All detections of one object instance inside one sampling window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterSample {
    pub instance_id: InstanceId,
    pub label: ClassLabel,
    pub window_start: f64,
    pub window_len: f64,
    pub detections: Vec<RadarDetection>,
    pub core_count: usize,
}

impl ClusterSample {
    pub fn validate(&self) -> Result<()> {
        if self.detections.is_empty() {
            return Err(Error::InvalidInput(format!(
                "cluster sample of instance {} has no detections",
                self.instance_id
            )));
        }
        if self.core_count > self.detections.len() {
            return Err(Error::InvalidInput(format!(
                "core_count {} exceeds {} detections",
                self.core_count,
                self.detections.len()
            )));
        }
        let end = self.window_start + self.window_len;
        if let Some(d) = self.detections.iter().find(|d| d.t < self.window_start || d.t >= end) {
            return Err(Error::InvalidInput(format!(
                "detection at t = {} outside window [{}, {})",
                d.t, self.window_start, end
            )));
        }
        Ok(())
    }
}
