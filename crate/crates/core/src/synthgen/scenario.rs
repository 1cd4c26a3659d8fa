//! Scene generation: scheduling of instances, per-instance detection
//! sampling, and the ego motion log.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::radar_data::transform::sensor_velocity;
use crate::radar_data::{ClassLabel, EgoState, EgoTrack, InstanceId, RawDetection, SensorRig};
use crate::seed;

use super::config::{ClassProfile, GeneratorConfig};

pub const FRAME_PERIOD: f64 = 0.05;
pub const EGO_PERIOD: f64 = 0.05;
/// Offset between the frame starts of consecutive sensors.
pub const SENSOR_STAGGER: f64 = 0.01;
/// Lateral lane centres objects are placed on, m.
pub const LANES: [f64; 6] = [-25.0, -15.0, -5.0, 5.0, 15.0, 25.0];
const LANE_DRIFT: f64 = 3.0;
const MIN_GAP: f64 = 0.5;
const X_NEAR: f64 = 20.0;
const X_FAR: f64 = 90.0;
const EGO_MEAN_SPEED: f64 = 5.0;
const RANGE_NOISE: f64 = 0.05;
const AZIMUTH_NOISE: f64 = 0.004;
const DOPPLER_NOISE: f64 = 0.03;

/// Ground-truth extent of one generated instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruthRecord {
    pub instance_id: InstanceId,
    pub label: ClassLabel,
    pub t_start: f64,
    pub t_end: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub detections: Vec<RawDetection>,
    pub ego: Vec<EgoState>,
    pub truth: Vec<TruthRecord>,
    /// Source instance of each detection, aligned with `detections`.
    pub assoc: Vec<InstanceId>,
}

/// Ego motion used by the generator: gently varying speed and yaw rate.
pub fn ego_state(t: f64) -> EgoState {
    EgoState {
        t,
        speed: EGO_MEAN_SPEED + 2.0 * (0.2 * t).sin(),
        yaw_rate: 0.02 * (0.05 * t).sin(),
    }
}

#[derive(Clone, Debug)]
struct Plan {
    id: InstanceId,
    label: ClassLabel,
    profile: ClassProfile,
    t_start: f64,
    duration: f64,
    p0: (f64, f64),
    /// Ground velocity.
    v: (f64, f64),
    heading: f64,
}

fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn schedule(cfg: &GeneratorConfig) -> Vec<Plan> {
    let mut rng = seed::rng(seed::derive(cfg.seed, "schedule"));
    let mut labels: Vec<ClassLabel> = ClassLabel::ALL
        .iter()
        .flat_map(|&l| std::iter::repeat_n(l, cfg.instance_count(l) as usize))
        .collect();
    labels.shuffle(&mut rng);
    let mut lane_free = [0.0f64; LANES.len()];
    labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let profile = match cfg.profiles.trained(label) {
                Some(p) => p.clone(),
                None if rng.random_bool(0.5) => cfg.profiles.wheelchair.clone(),
                None => cfg.profiles.scooter.clone(),
            };
            let mut duration = uniform(&mut rng, profile.duration_min, profile.duration_max);
            let speed = uniform(&mut rng, profile.speed_min, profile.speed_max);
            let mut heading = uniform(&mut rng, -PI, PI);
            let lateral = heading.sin() * speed * duration;
            if lateral.abs() > LANE_DRIFT {
                let s = (LANE_DRIFT / (speed * duration)).copysign(lateral);
                heading = if heading.cos() >= 0.0 { s.asin() } else { PI - s.asin() };
            }
            let v = (speed * heading.cos(), speed * heading.sin());
            let vx_rel = v.0 - EGO_MEAN_SPEED;
            if vx_rel.abs() * duration > 0.9 * (X_FAR - X_NEAR) {
                duration = 0.9 * (X_FAR - X_NEAR) / vx_rel.abs();
            }
            let lo = X_NEAR.max(X_NEAR - vx_rel * duration);
            let hi = X_FAR.min(X_FAR - vx_rel * duration);
            let x0 = uniform(&mut rng, lo, hi);
            let lane = (0..LANES.len()).min_by(|&a, &b| lane_free[a].total_cmp(&lane_free[b])).unwrap_or(0);
            let y0 = LANES[lane] + uniform(&mut rng, -1.0, 1.0);
            let t_start = lane_free[lane] + MIN_GAP + uniform(&mut rng, 0.0, 0.5);
            lane_free[lane] = t_start + duration;
            Plan {
                id: InstanceId(i as u32),
                label,
                profile,
                t_start,
                duration,
                p0: (x0, y0),
                v,
                heading,
            }
        })
        .collect()
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

fn generate_instance(plan: &Plan, base_seed: u64, rig: &SensorRig, ego: &EgoTrack) -> Result<Vec<RawDetection>> {
    let p = &plan.profile;
    let mut rng = seed::rng(seed::derive_indexed(base_seed, "instance", u64::from(plan.id.0)));
    let per_frame = Poisson::new(p.detection_rate * FRAME_PERIOD / 0.150)
        .map_err(|e| Error::InvalidInput(format!("detection rate: {e}")))?;
    let normal = |sd: f64| Normal::new(0.0, sd).map_err(|e| Error::InvalidInput(e.to_string()));
    let (micro, amp) = (normal(p.micro_doppler)?, Normal::new(p.amplitude_mean, p.amplitude_std).map_err(|e| Error::InvalidInput(e.to_string()))?);
    let (rn, an, dn) = (normal(RANGE_NOISE)?, normal(AZIMUTH_NOISE)?, normal(DOPPLER_NOISE)?);
    let v_rel = (plan.v.0 - EGO_MEAN_SPEED, plan.v.1);
    let (ch, sh) = (plan.heading.cos(), plan.heading.sin());

    let first = (plan.t_start / FRAME_PERIOD).ceil() as i64;
    let last = ((plan.t_start + plan.duration) / FRAME_PERIOD).floor() as i64;
    let mut out = Vec::new();
    for frame in first..=last {
        let t_frame = frame as f64 * FRAME_PERIOD;
        let n = per_frame.sample(&mut rng) as usize;
        for _ in 0..n {
            let (ox, oy) = (uniform(&mut rng, -0.5, 0.5) * p.extent_x, uniform(&mut rng, -0.5, 0.5) * p.extent_y);
            let (ox, oy) = if p.incoherent { (ox, oy) } else { (ch * ox - sh * oy, sh * ox + ch * oy) };
            let at = |t: f64| {
                let dt = t - plan.t_start;
                (plan.p0.0 + v_rel.0 * dt + ox, plan.p0.1 + v_rel.1 * dt + oy)
            };
            let (px, py) = at(t_frame);
            let visible: Vec<usize> = rig
                .poses
                .iter()
                .enumerate()
                .filter(|(_, s)| wrap_angle((py - s.mount_y).atan2(px - s.mount_x) - s.yaw).abs() <= rig.fov_half)
                .map(|(k, _)| k)
                .collect();
            let Some(&k) = visible.get(rng.random_range(0..visible.len().max(1))) else {
                continue;
            };
            let pose = &rig.poses[k];
            let t = t_frame + k as f64 * SENSOR_STAGGER;
            let (px, py) = at(t);
            let (dx, dy) = (px - pose.mount_x, py - pose.mount_y);
            let range = (dx.hypot(dy) + rn.sample(&mut rng)).max(0.0);
            let azimuth = (wrap_angle(dy.atan2(dx) - pose.yaw) + an.sample(&mut rng)).clamp(-rig.fov_half, rig.fov_half);
            let u = ((pose.yaw + azimuth).cos(), (pose.yaw + azimuth).sin());
            let body = if p.incoherent {
                let s = uniform(&mut rng, p.speed_min, p.speed_max);
                let h = uniform(&mut rng, -PI, PI);
                s * (h.cos() * u.0 + h.sin() * u.1)
            } else {
                plan.v.0 * u.0 + plan.v.1 * u.1
            };
            let comp = body + micro.sample(&mut rng) + dn.sample(&mut rng);
            let vs = sensor_velocity(ego.nearest(t)?, pose);
            out.push(RawDetection {
                sensor_id: k as u8,
                t,
                range,
                azimuth,
                doppler_raw: comp - (vs.0 * u.0 + vs.1 * u.1),
                amplitude: amp.sample(&mut rng),
            });
        }
    }
    Ok(out)
}

/// Generate a full scene. The output depends only on `cfg`.
pub fn gen_scenario(cfg: &GeneratorConfig, rig: &SensorRig) -> Result<Scenario> {
    cfg.validate()?;
    let plans = schedule(cfg);
    let t_max = plans.iter().map(|p| p.t_start + p.duration).fold(0.0, f64::max) + 1.0;
    let n_ego = (t_max / EGO_PERIOD).ceil() as usize + 1;
    let ego_states: Vec<EgoState> = (0..n_ego).map(|k| ego_state(k as f64 * EGO_PERIOD)).collect();
    let track = EgoTrack::new(ego_states.clone())?;

    let per_instance = plans
        .par_iter()
        .map(|p| generate_instance(p, cfg.seed, rig, &track))
        .collect::<Result<Vec<_>>>()?;
    let mut tagged: Vec<(RawDetection, InstanceId)> = per_instance
        .into_iter()
        .zip(&plans)
        .flat_map(|(dets, p)| dets.into_iter().map(move |d| (d, p.id)))
        .collect();
    tagged.sort_by(|a, b| a.0.t.total_cmp(&b.0.t).then(a.0.sensor_id.cmp(&b.0.sensor_id)).then(a.1.cmp(&b.1)));

    let truth = plans
        .iter()
        .map(|p| TruthRecord {
            instance_id: p.id,
            label: p.label,
            t_start: p.t_start,
            t_end: p.t_start + p.duration,
        })
        .collect();
    let (detections, assoc) = tagged.into_iter().unzip();
    Ok(Scenario {
        detections,
        ego: ego_states,
        truth,
        assoc,
    })
}

pub fn write_truth_table(truth: &[TruthRecord]) -> String {
    let mut s = String::from("# instance_id label t_start t_end\n");
    for r in truth {
        let _ = writeln!(s, "{} {} {} {}", r.instance_id, r.label, r.t_start, r.t_end);
    }
    s
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_truth_table(text: &str) -> Result<Vec<TruthRecord>> {
    data_lines(text)
        .map(|(line, l)| {
            let f: Vec<&str> = l.split_whitespace().collect();
            let bad = |reason: String| Error::Record { line, reason };
            if f.len() != 4 {
                return Err(bad(format!("expected 4 fields, found {}", f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("cannot parse `{s}`")));
            Ok(TruthRecord {
                instance_id: InstanceId(f[0].parse().map_err(|_| bad(format!("bad instance id `{}`", f[0])))?),
                label: f[1].parse()?,
                t_start: num(f[2])?,
                t_end: num(f[3])?,
            })
        })
        .collect()
}

/// Per-detection instance association, one id per line in detection-log
/// order. Stands in for manual annotation of the clustered scene.
pub fn write_assoc(assoc: &[InstanceId]) -> String {
    let mut s = String::from("# instance_id\n");
    for id in assoc {
        let _ = writeln!(s, "{id}");
    }
    s
}

pub fn parse_assoc(text: &str) -> Result<Vec<InstanceId>> {
    data_lines(text)
        .map(|(line, l)| {
            l.parse().map(InstanceId).map_err(|_| Error::Record {
                line,
                reason: format!("bad instance id `{l}`"),
            })
        })
        .collect()
}
