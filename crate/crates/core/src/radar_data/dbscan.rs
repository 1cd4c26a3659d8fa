//! DBSCAN over space, time and Doppler.
//!
//! Two detections are neighbours when the scaled distance
//!
//! ```text
//! sqrt((dx² + dy²)/eps_xy² + dt²/eps_t² + dv²/eps_v²) <= 1
//! ```
//!
//! A point is a core point when its neighbourhood (itself included) holds at
//! least `min_pts` points. Points are visited in input order; a border point
//! reachable from several clusters joins the first one discovered.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::types::RadarDetection;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DbscanParams {
    pub eps_xy: f64,
    pub eps_t: f64,
    pub eps_v: f64,
    pub min_pts: usize,
}

impl Default for DbscanParams {
    fn default() -> Self {
        Self {
            eps_xy: 1.2,
            eps_t: 0.2,
            eps_v: 0.8,
            min_pts: 3,
        }
    }
}

impl DbscanParams {
    pub fn validate(&self) -> Result<()> {
        let eps = [self.eps_xy, self.eps_t, self.eps_v];
        if eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidInput("DBSCAN radii must be strictly positive".into()));
        }
        if self.min_pts < 2 {
            return Err(Error::InvalidInput("DBSCAN min_pts must be at least 2".into()));
        }
        Ok(())
    }
}

/// A point in the clustering space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub v: f64,
}

impl From<&RadarDetection> for StPoint {
    fn from(d: &RadarDetection) -> Self {
        Self {
            x: d.x,
            y: d.y,
            t: d.t,
            v: d.doppler_comp,
        }
    }
}

pub fn scaled_distance_sq(a: &StPoint, b: &StPoint, p: &DbscanParams) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dt = a.t - b.t;
    let dv = a.v - b.v;
    (dx * dx + dy * dy) / (p.eps_xy * p.eps_xy) + dt * dt / (p.eps_t * p.eps_t) + dv * dv / (p.eps_v * p.eps_v)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Clustering {
    /// Cluster id per point; `None` marks noise.
    pub labels: Vec<Option<usize>>,
    pub core: Vec<bool>,
    pub n_clusters: usize,
}

impl Clustering {
    pub fn members(&self, cluster: usize) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, l)| **l == Some(cluster))
            .map(|(i, _)| i)
    }
}

/// Neighbour lists using a time-sorted sweep; only points within `eps_t` in
/// time can be neighbours.
fn neighbourhoods(points: &[StPoint], params: &DbscanParams) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].t.total_cmp(&points[b].t).then(a.cmp(&b)));
    let times: Vec<f64> = order.iter().map(|&i| points[i].t).collect();

    let mut out = vec![Vec::new(); points.len()];
    for (rank, &i) in order.iter().enumerate() {
        let lo = times.partition_point(|&t| t < points[i].t - params.eps_t);
        let mut hi = rank;
        while hi < times.len() && times[hi] <= points[i].t + params.eps_t {
            hi += 1;
        }
        let nb = &mut out[i];
        for &j in &order[lo..hi] {
            if scaled_distance_sq(&points[i], &points[j], params) <= 1.0 {
                nb.push(j);
            }
        }
        nb.sort_unstable();
    }
    out
}

pub fn dbscan(points: &[StPoint], params: &DbscanParams) -> Result<Clustering> {
    params.validate()?;
    if points.is_empty() {
        return Ok(Clustering::default());
    }
    if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite() && p.t.is_finite() && p.v.is_finite())) {
        return Err(Error::InvalidInput("non-finite point passed to DBSCAN".into()));
    }

    let nbs = neighbourhoods(points, params);
    let core: Vec<bool> = nbs.iter().map(|n| n.len() >= params.min_pts).collect();
    let mut labels: Vec<Option<usize>> = vec![None; points.len()];
    let mut n_clusters = 0;
    let mut queue = VecDeque::new();

    for seed in 0..points.len() {
        if labels[seed].is_some() || !core[seed] {
            continue;
        }
        let cluster = n_clusters;
        n_clusters += 1;
        labels[seed] = Some(cluster);
        queue.push_back(seed);
        while let Some(p) = queue.pop_front() {
            if !core[p] {
                continue;
            }
            for &q in &nbs[p] {
                if labels[q].is_none() {
                    labels[q] = Some(cluster);
                    queue.push_back(q);
                }
            }
        }
    }

    Ok(Clustering {
        labels,
        core,
        n_clusters,
    })
}

/// Cluster detections directly.
pub fn dbscan_cluster(detections: &[RadarDetection], params: &DbscanParams) -> Result<Clustering> {
    let points: Vec<StPoint> = detections.iter().map(StPoint::from).collect();
    dbscan(&points, params)
}
