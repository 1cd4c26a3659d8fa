use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radar_data::ClassLabel;

/// Instance counts per class before scaling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassCounts {
    pub pedestrian: u32,
    pub group: u32,
    pub bike: u32,
    pub car: u32,
    pub truck: u32,
    pub garbage: u32,
    pub other: u32,
}

impl Default for ClassCounts {
    fn default() -> Self {
        Self {
            pedestrian: 1215,
            group: 1063,
            bike: 90,
            car: 1310,
            truck: 154,
            garbage: 38176,
            other: 22,
        }
    }
}

impl ClassCounts {
    pub fn get(&self, label: ClassLabel) -> u32 {
        match label {
            ClassLabel::Pedestrian => self.pedestrian,
            ClassLabel::Group => self.group,
            ClassLabel::Bike => self.bike,
            ClassLabel::Car => self.car,
            ClassLabel::Truck => self.truck,
            ClassLabel::Garbage => self.garbage,
            ClassLabel::Other => self.other,
        }
    }

    /// Only the given class, `n` instances.
    pub fn only(label: ClassLabel, n: u32) -> Self {
        let mut c = Self {
            pedestrian: 0,
            group: 0,
            bike: 0,
            car: 0,
            truck: 0,
            garbage: 0,
            other: 0,
        };
        *match label {
            ClassLabel::Pedestrian => &mut c.pedestrian,
            ClassLabel::Group => &mut c.group,
            ClassLabel::Bike => &mut c.bike,
            ClassLabel::Car => &mut c.car,
            ClassLabel::Truck => &mut c.truck,
            ClassLabel::Garbage => &mut c.garbage,
            ClassLabel::Other => &mut c.other,
        } = n;
        c
    }
}

/// Appearance and motion of one kind of road user.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassProfile {
    /// Body length along the heading, m.
    pub extent_x: f64,
    /// Body width, m.
    pub extent_y: f64,
    pub speed_min: f64,
    pub speed_max: f64,
    /// Standard deviation of the per-detection radial velocity around the
    /// body velocity, m/s.
    pub micro_doppler: f64,
    /// Expected detections per 150 ms window.
    pub detection_rate: f64,
    pub amplitude_mean: f64,
    pub amplitude_std: f64,
    pub duration_min: f64,
    pub duration_max: f64,
    /// Points scattered independently in space and velocity instead of
    /// following a rigid track.
    #[serde(default)]
    pub incoherent: bool,
}

impl ClassProfile {
    #[allow(clippy::too_many_arguments)]
    fn new(extent: (f64, f64), speed: (f64, f64), micro: f64, rate: f64, amp: (f64, f64), duration: (f64, f64)) -> Self {
        Self {
            extent_x: extent.0,
            extent_y: extent.1,
            speed_min: speed.0,
            speed_max: speed.1,
            micro_doppler: micro,
            detection_rate: rate,
            amplitude_mean: amp.0,
            amplitude_std: amp.1,
            duration_min: duration.0,
            duration_max: duration.1,
            incoherent: false,
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let vals = [
            self.extent_x,
            self.extent_y,
            self.speed_min,
            self.speed_max,
            self.micro_doppler,
            self.detection_rate,
            self.amplitude_mean,
            self.amplitude_std,
            self.duration_min,
            self.duration_max,
        ];
        let bad = |m: &str| Error::InvalidInput(format!("profile {name}: {m}"));
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(bad("non-finite value"));
        }
        if self.extent_x < 0.0 || self.extent_y < 0.0 || self.micro_doppler < 0.0 || self.amplitude_std < 0.0 {
            return Err(bad("negative extent or spread"));
        }
        if self.speed_min < 0.0 || self.speed_min > self.speed_max {
            return Err(bad("invalid speed range"));
        }
        if self.duration_min <= 0.0 || self.duration_min > self.duration_max {
            return Err(bad("invalid duration range"));
        }
        if self.detection_rate <= 0.0 {
            return Err(bad("detection rate must be positive"));
        }
        Ok(())
    }
}

/// Profiles of the six trained classes plus the two hidden-class variants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassProfiles {
    pub pedestrian: ClassProfile,
    pub group: ClassProfile,
    pub bike: ClassProfile,
    pub car: ClassProfile,
    pub truck: ClassProfile,
    pub garbage: ClassProfile,
    /// Pedestrian-sized but rigid.
    pub wheelchair: ClassProfile,
    /// Bike-sized with pedestrian-like micro-Doppler.
    pub scooter: ClassProfile,
}

impl Default for ClassProfiles {
    fn default() -> Self {
        let mut garbage = ClassProfile::new((2.5, 2.5), (0.0, 1.0), 1.0, 14.0, (-8.0, 5.0), (0.15, 0.45));
        garbage.incoherent = true;
        Self {
            pedestrian: ClassProfile::new((0.5, 0.6), (0.8, 1.8), 0.45, 9.0, (-4.0, 3.0), (2.0, 4.0)),
            group: ClassProfile::new((2.2, 1.6), (0.7, 1.5), 0.45, 20.0, (-1.0, 3.0), (2.0, 4.0)),
            bike: ClassProfile::new((1.8, 0.6), (3.0, 7.0), 0.35, 12.0, (0.0, 3.0), (1.5, 3.5)),
            car: ClassProfile::new((4.5, 1.8), (5.0, 12.0), 0.12, 30.0, (10.0, 4.0), (1.5, 3.0)),
            truck: ClassProfile::new((10.0, 2.5), (4.0, 10.0), 0.15, 45.0, (15.0, 4.0), (1.5, 3.0)),
            garbage,
            wheelchair: ClassProfile::new((0.9, 0.8), (0.6, 1.4), 0.1, 11.0, (1.0, 3.0), (2.0, 4.0)),
            scooter: ClassProfile::new((1.4, 0.5), (2.5, 5.0), 0.45, 10.0, (-3.0, 3.0), (1.5, 3.5)),
        }
    }
}

impl ClassProfiles {
    /// Profile of a trained class; `None` for the hidden class, which uses
    /// the wheelchair and scooter variants.
    pub fn trained(&self, label: ClassLabel) -> Option<&ClassProfile> {
        match label {
            ClassLabel::Pedestrian => Some(&self.pedestrian),
            ClassLabel::Group => Some(&self.group),
            ClassLabel::Bike => Some(&self.bike),
            ClassLabel::Car => Some(&self.car),
            ClassLabel::Truck => Some(&self.truck),
            ClassLabel::Garbage => Some(&self.garbage),
            ClassLabel::Other => None,
        }
    }

    fn all(&self) -> [(&'static str, &ClassProfile); 8] {
        [
            ("pedestrian", &self.pedestrian),
            ("group", &self.group),
            ("bike", &self.bike),
            ("car", &self.car),
            ("truck", &self.truck),
            ("garbage", &self.garbage),
            ("wheelchair", &self.wheelchair),
            ("scooter", &self.scooter),
        ]
    }
}

/// Per-detection jitter standard deviations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Jitter {
    pub range: f64,
    pub azimuth: f64,
    pub doppler: f64,
    pub amplitude: f64,
}

impl Default for Jitter {
    fn default() -> Self {
        Self {
            range: 0.05,
            azimuth: 0.005,
            doppler: 0.05,
            amplitude: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentationConfig {
    /// Deteriorated copies added per training sample.
    pub copies: u32,
    pub drop_prob: f64,
    pub jitter: Jitter,
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        Self {
            copies: 1,
            drop_prob: 0.2,
            jitter: Jitter::default(),
        }
    }
}

impl AugmentationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.drop_prob) {
            return Err(Error::InvalidInput(format!("drop probability {} outside [0, 1)", self.drop_prob)));
        }
        let j = &self.jitter;
        if [j.range, j.azimuth, j.doppler, j.amplitude].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidInput("jitter deviations must be finite and non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub counts: ClassCounts,
    /// Global factor on `counts`.
    pub scale: f64,
    /// Separate factor for garbage, whose raw count dwarfs the others.
    pub garbage_scale: f64,
    /// Floor for every class with a non-zero raw count.
    pub min_per_class: u32,
    pub profiles: ClassProfiles,
    pub augmentation: AugmentationConfig,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            counts: ClassCounts::default(),
            scale: 0.05,
            garbage_scale: 0.0025,
            min_per_class: 10,
            profiles: ClassProfiles::default(),
            augmentation: AugmentationConfig::default(),
        }
    }
}

impl GeneratorConfig {
    /// Effective instance count of one class.
    pub fn instance_count(&self, label: ClassLabel) -> u32 {
        let raw = self.counts.get(label);
        if raw == 0 {
            return 0;
        }
        let f = if label == ClassLabel::Garbage { self.garbage_scale } else { self.scale };
        ((f64::from(raw) * f).round() as u32).max(self.min_per_class)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale >= 0.0 && self.garbage_scale.is_finite() && self.garbage_scale >= 0.0) {
            return Err(Error::InvalidInput("scale factors must be finite and non-negative".into()));
        }
        for (name, p) in self.profiles.all() {
            p.validate(name)?;
        }
        self.augmentation.validate()?;
        if ClassLabel::ALL.iter().all(|&l| self.instance_count(l) == 0) {
            return Err(Error::InvalidInput("generator config yields zero instances".into()));
        }
        Ok(())
    }
}
