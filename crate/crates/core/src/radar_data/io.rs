//! Line-delimited text logs.
//!
//! One record per line, whitespace separated, fixed field order, `.` as the
//! decimal point. Lines starting with `#` are comments.
//!
//! * detection log: `sensor_id t range azimuth doppler_raw amplitude`
//! * ego log: `t speed yaw_rate`
//! * clustered detections: `instance_id label cluster core sensor_id t range
//!   azimuth doppler_raw doppler_comp amplitude x y`

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::types::{ClassLabel, EgoState, InstanceId, RadarDetection, RawDetection};

/// A record that failed to parse or validate.
#[derive(Clone, Debug, PartialEq)]
pub struct Rejection {
    pub line: usize,
    pub reason: String,
}

impl From<Rejection> for Error {
    fn from(r: Rejection) -> Self {
        Error::Record {
            line: r.line,
            reason: r.reason,
        }
    }
}

fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        (!l.is_empty() && !l.starts_with('#')).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn field<T: FromStr>(fields: &[&str], i: usize, name: &str) -> std::result::Result<T, String> {
    fields[i]
        .parse()
        .map_err(|_| format!("cannot parse {name} from `{}`", fields[i]))
}

fn finite(v: f64, name: &str) -> std::result::Result<f64, String> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite {name}"))
    }
}

fn expect_len(fields: &[&str], n: usize) -> std::result::Result<(), String> {
    if fields.len() == n {
        Ok(())
    } else {
        Err(format!("expected {n} fields, found {}", fields.len()))
    }
}

pub fn write_detection_log(dets: &[RawDetection]) -> String {
    let mut s = String::from("# sensor_id t range azimuth doppler_raw amplitude\n");
    for d in dets {
        let _ = writeln!(s, "{} {} {} {} {} {}", d.sensor_id, d.t, d.range, d.azimuth, d.doppler_raw, d.amplitude);
    }
    s
}

fn parse_detection(fields: &[&str]) -> std::result::Result<RawDetection, String> {
    expect_len(fields, 6)?;
    let d = RawDetection {
        sensor_id: field(fields, 0, "sensor_id")?,
        t: finite(field(fields, 1, "t")?, "t")?,
        range: finite(field(fields, 2, "range")?, "range")?,
        azimuth: finite(field(fields, 3, "azimuth")?, "azimuth")?,
        doppler_raw: finite(field(fields, 4, "doppler_raw")?, "doppler_raw")?,
        amplitude: finite(field(fields, 5, "amplitude")?, "amplitude")?,
    };
    if d.range < 0.0 {
        return Err(format!("negative range {}", d.range));
    }
    Ok(d)
}

/// Parse a detection log. Malformed records are returned as rejections
/// instead of aborting the whole log.
pub fn parse_detection_log(text: &str) -> (Vec<RawDetection>, Vec<Rejection>) {
    let mut ok = Vec::new();
    let mut bad = Vec::new();
    for (line, fields) in records(text) {
        match parse_detection(&fields) {
            Ok(d) => ok.push(d),
            Err(reason) => bad.push(Rejection { line, reason }),
        }
    }
    (ok, bad)
}

pub fn write_ego_log(states: &[EgoState]) -> String {
    let mut s = String::from("# t speed yaw_rate\n");
    for e in states {
        let _ = writeln!(s, "{} {} {}", e.t, e.speed, e.yaw_rate);
    }
    s
}

pub fn parse_ego_log(text: &str) -> Result<Vec<EgoState>> {
    records(text)
        .map(|(line, f)| {
            let parse = || -> std::result::Result<EgoState, String> {
                expect_len(&f, 3)?;
                let e = EgoState {
                    t: finite(field(&f, 0, "t")?, "t")?,
                    speed: finite(field(&f, 1, "speed")?, "speed")?,
                    yaw_rate: finite(field(&f, 2, "yaw_rate")?, "yaw_rate")?,
                };
                if e.speed < 0.0 {
                    return Err("negative speed".into());
                }
                Ok(e)
            };
            parse().map_err(|reason| Error::Record { line, reason })
        })
        .collect()
}

/// A detection attached to an annotated cluster.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabeledDetection {
    pub instance_id: InstanceId,
    pub label: ClassLabel,
    pub cluster: usize,
    pub core: bool,
    pub detection: RadarDetection,
}

pub fn write_labeled_detections(dets: &[LabeledDetection]) -> String {
    let mut s = String::from(
        "# instance_id label cluster core sensor_id t range azimuth doppler_raw doppler_comp amplitude x y\n",
    );
    for l in dets {
        let d = &l.detection;
        let _ = writeln!(
            s,
            "{} {} {} {} {} {} {} {} {} {} {} {} {}",
            l.instance_id,
            l.label,
            l.cluster,
            u8::from(l.core),
            d.sensor_id,
            d.t,
            d.range,
            d.azimuth,
            d.doppler_raw,
            d.doppler_comp,
            d.amplitude,
            d.x,
            d.y
        );
    }
    s
}

pub fn parse_labeled_detections(text: &str) -> Result<Vec<LabeledDetection>> {
    records(text)
        .map(|(line, f)| {
            let parse = || -> std::result::Result<LabeledDetection, String> {
                expect_len(&f, 13)?;
                let core: u8 = field(&f, 3, "core")?;
                let num = |i: usize, name: &str| finite(field(&f, i, name)?, name);
                Ok(LabeledDetection {
                    instance_id: InstanceId(field(&f, 0, "instance_id")?),
                    label: f[1].parse().map_err(|e: Error| e.to_string())?,
                    cluster: field(&f, 2, "cluster")?,
                    core: core != 0,
                    detection: RadarDetection {
                        sensor_id: field(&f, 4, "sensor_id")?,
                        t: num(5, "t")?,
                        range: num(6, "range")?,
                        azimuth: num(7, "azimuth")?,
                        doppler_raw: num(8, "doppler_raw")?,
                        doppler_comp: num(9, "doppler_comp")?,
                        amplitude: num(10, "amplitude")?,
                        x: num(11, "x")?,
                        y: num(12, "y")?,
                    },
                })
            };
            parse().map_err(|reason| Error::Record { line, reason })
        })
        .collect()
}
