//! Planar geometry of a cluster: hulls, bounding rectangles, circle fit and
//! sector occupancy.

use crate::radar_data::RadarDetection;

use super::stats::{mean, min_max, pearson};

/// Floor on hull areas used as density denominators, m².
pub const MIN_AREA: f64 = 1e-6;
/// Cap for the fitted circle radius of (near-)collinear clusters, m.
pub const MAX_CIRCLE_RADIUS: f64 = 1e3;
/// Reference range of the detection-count weighting, m.
pub const VOLCAN_REF_RANGE: f64 = 50.0;
pub const CBO_RINGS: usize = 3;
pub const CBO_SECTORS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    fn dist(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Convex hull by Andrew's monotone chain, counter-clockwise, without
/// collinear vertices. Coincident inputs collapse to one vertex and
/// collinear inputs to their two extreme points.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Shoelace area of a simple polygon.
pub fn polygon_area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let twice: f64 = (0..poly.len())
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            a.x * b.y - b.x * a.y
        })
        .sum();
    0.5 * twice.abs()
}

/// Closed perimeter; a two-vertex hull is traversed there and back.
pub fn polygon_perimeter(poly: &[Point]) -> f64 {
    match poly.len() {
        0 | 1 => 0.0,
        n => (0..n).map(|i| poly[i].dist(poly[(i + 1) % n])).sum(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.width + self.height)
    }
}

/// Minimum-area enclosing rectangle of a convex hull (CCW), by rotating
/// calipers: one side of the optimum is flush with a hull edge, and the
/// three extreme vertices for successive edges only ever advance.
pub fn min_area_rect(hull: &[Point]) -> Rect {
    let m = hull.len();
    match m {
        0 | 1 => return Rect { width: 0.0, height: 0.0 },
        2 => return Rect { width: hull[0].dist(hull[1]), height: 0.0 },
        _ => {}
    }
    let edge = |i: usize| {
        let d = hull[(i + 1) % m].sub(hull[i]);
        let len = d.x.hypot(d.y);
        let e = Point::new(d.x / len, d.y / len);
        (e, Point::new(-e.y, e.x))
    };
    let argmax = |f: &dyn Fn(Point) -> f64| {
        (0..m).fold(0, |best, i| if f(hull[i]) > f(hull[best]) { i } else { best })
    };

    let (e0, n0) = edge(0);
    let mut right = argmax(&|p| p.dot(e0));
    let mut top = argmax(&|p| p.dot(n0));
    let mut left = argmax(&|p| -p.dot(e0));

    let mut best: Option<Rect> = None;
    for i in 0..m {
        let (e, n) = edge(i);
        for _ in 0..m {
            if hull[(right + 1) % m].dot(e) >= hull[right].dot(e) {
                right = (right + 1) % m;
            } else {
                break;
            }
        }
        for _ in 0..m {
            if hull[(top + 1) % m].dot(n) >= hull[top].dot(n) {
                top = (top + 1) % m;
            } else {
                break;
            }
        }
        for _ in 0..m {
            if hull[(left + 1) % m].dot(e) <= hull[left].dot(e) {
                left = (left + 1) % m;
            } else {
                break;
            }
        }
        let rect = Rect {
            width: hull[right].sub(hull[left]).dot(e),
            height: hull[top].sub(hull[i]).dot(n),
        };
        if best.is_none_or(|b| rect.area() < b.area()) {
            best = Some(rect);
        }
    }
    best.expect("hull has at least three vertices")
}

/// Algebraic (Kåsa) least-squares circle radius, computed in centred
/// coordinates. Collinear clusters and huge radii are capped.
pub fn kasa_radius(points: &[Point]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 0.0;
    }
    let cx = mean(&points.iter().map(|p| p.x).collect::<Vec<_>>());
    let cy = mean(&points.iter().map(|p| p.y).collect::<Vec<_>>());
    let (mut suu, mut svv, mut suv) = (0.0, 0.0, 0.0);
    let (mut suuu, mut svvv, mut suvv, mut svuu) = (0.0, 0.0, 0.0, 0.0);
    for p in points {
        let (u, v) = (p.x - cx, p.y - cy);
        suu += u * u;
        svv += v * v;
        suv += u * v;
        suuu += u * u * u;
        svvv += v * v * v;
        suvv += u * v * v;
        svuu += v * u * u;
    }
    let trace = suu + svv;
    if trace == 0.0 {
        return 0.0;
    }
    let det = suu * svv - suv * suv;
    if det <= 1e-12 * trace * trace {
        return MAX_CIRCLE_RADIUS;
    }
    let (bu, bv) = (0.5 * (suuu + suvv), 0.5 * (svvv + svuu));
    let uc = (bu * svv - bv * suv) / det;
    let vc = (suu * bv - suv * bu) / det;
    let r = (uc * uc + vc * vc + trace / n as f64).sqrt();
    if r.is_finite() {
        r.min(MAX_CIRCLE_RADIUS)
    } else {
        MAX_CIRCLE_RADIUS
    }
}

/// Cumulative binary occupancy: occupied sectors (of [`CBO_SECTORS`]) among
/// points inside each of three concentric circles around the centroid with
/// radii ⅓, ⅔ and 1 times the largest centroid distance.
pub fn cumulative_occupancy(points: &[Point]) -> [f64; CBO_RINGS] {
    let cx = mean(&points.iter().map(|p| p.x).collect::<Vec<_>>());
    let cy = mean(&points.iter().map(|p| p.y).collect::<Vec<_>>());
    let c = Point::new(cx, cy);
    let dists: Vec<f64> = points.iter().map(|p| p.dist(c)).collect();
    let dmax = dists.iter().copied().fold(0.0, f64::max);
    let mut out = [0.0; CBO_RINGS];
    if dmax == 0.0 {
        return out;
    }
    let sector_width = std::f64::consts::TAU / CBO_SECTORS as f64;
    for (ring, slot) in out.iter_mut().enumerate() {
        let radius = dmax * (ring + 1) as f64 / CBO_RINGS as f64;
        let mut occupied = [false; CBO_SECTORS];
        for (p, &d) in points.iter().zip(&dists) {
            if d <= 1e-12 * dmax || d > radius * (1.0 + 1e-12) {
                continue;
            }
            let theta = (p.y - cy).atan2(p.x - cx) + std::f64::consts::PI;
            let s = ((theta / sector_width) as usize).min(CBO_SECTORS - 1);
            occupied[s] = true;
        }
        *slot = occupied.iter().filter(|&&o| o).count() as f64;
    }
    out
}

/// Pairwise distance summary: mean over unordered pairs, maximum, and the
/// farthest pair (first in sorted order on ties).
fn pair_summary(points: &[Point]) -> (f64, f64, Option<(usize, usize)>) {
    let n = points.len();
    if n < 2 {
        return (0.0, 0.0, None);
    }
    let (mut sum, mut best, mut pair) = (0.0, -1.0, None);
    for i in 0..n {
        for j in i + 1..n {
            let d = points[i].dist(points[j]);
            sum += d;
            if d > best {
                best = d;
                pair = Some((i, j));
            }
        }
    }
    (sum / (n * (n - 1) / 2) as f64, best, pair)
}

/// Shape, count and spatial features of one cluster, in catalog order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometryFeatures {
    pub n_detects: f64,
    pub n_detects_comp: f64,
    pub n_detects_volcan: f64,
    pub core_points: f64,
    pub mean_dist: f64,
    pub cluster_width: f64,
    pub max_dist_dev: f64,
    pub cbo: [f64; CBO_RINGS],
    pub rect_area: f64,
    pub rect_perimeter: f64,
    pub rect_density: f64,
    pub hull_area: f64,
    pub hull_perimeter: f64,
    pub hull_density: f64,
    pub circle_fit: f64,
    pub circularity: f64,
    pub compactness: f64,
    pub xy_linearity: f64,
    pub phi_spread_comp: f64,
    pub amp_sum: f64,
}

impl GeometryFeatures {
    /// The 20 shape/count values occupying the contiguous S block.
    pub fn shape_block(&self) -> [f64; 20] {
        [
            self.n_detects,
            self.n_detects_comp,
            self.n_detects_volcan,
            self.core_points,
            self.mean_dist,
            self.cluster_width,
            self.max_dist_dev,
            self.cbo[0],
            self.cbo[1],
            self.cbo[2],
            self.rect_area,
            self.rect_perimeter,
            self.rect_density,
            self.hull_area,
            self.hull_perimeter,
            self.hull_density,
            self.circle_fit,
            self.circularity,
            self.compactness,
            self.xy_linearity,
        ]
    }
}

pub fn geometry_features(detections: &[RadarDetection], core_count: usize) -> GeometryFeatures {
    let mut pts: Vec<Point> = detections.iter().map(|d| Point::new(d.x, d.y)).collect();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let n = pts.len().max(1) as f64;

    let ranges: Vec<f64> = detections.iter().map(RadarDetection::vehicle_range).collect();
    let angles: Vec<f64> = detections.iter().map(RadarDetection::vehicle_azimuth).collect();
    let mean_range = mean(&ranges);
    let (amin, amax) = min_max(&angles);
    let angle_spread = if angles.is_empty() { 0.0 } else { amax - amin };

    let (mean_dist, cluster_width, pair) = pair_summary(&pts);
    let max_dist_dev = match pair {
        Some((i, j)) if cluster_width > 0.0 => {
            let (a, b) = (pts[i], pts[j]);
            pts.iter().map(|&p| cross(a, b, p).abs() / cluster_width).sum::<f64>() / n
        }
        _ => 0.0,
    };

    let hull = convex_hull(&pts);
    let hull_area = polygon_area(&hull);
    let hull_perimeter = polygon_perimeter(&hull);
    let rect = min_area_rect(&hull);

    let cx = mean(&pts.iter().map(|p| p.x).collect::<Vec<_>>());
    let cy = mean(&pts.iter().map(|p| p.y).collect::<Vec<_>>());
    let compactness = mean(&pts.iter().map(|p| p.dist(Point::new(cx, cy))).collect::<Vec<_>>());
    let xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.y).collect();

    GeometryFeatures {
        n_detects: n,
        n_detects_comp: n * mean_range,
        n_detects_volcan: n * (mean_range / VOLCAN_REF_RANGE).powi(2),
        core_points: core_count as f64 / n,
        mean_dist,
        cluster_width,
        max_dist_dev,
        cbo: cumulative_occupancy(&pts),
        rect_area: rect.area(),
        rect_perimeter: rect.perimeter(),
        rect_density: n / rect.area().max(MIN_AREA),
        hull_area,
        hull_perimeter,
        hull_density: n / hull_area.max(MIN_AREA),
        circle_fit: kasa_radius(&pts),
        circularity: if hull_perimeter > 0.0 {
            4.0 * std::f64::consts::PI * hull_area / (hull_perimeter * hull_perimeter)
        } else {
            0.0
        },
        compactness,
        xy_linearity: pearson(&xs, &ys).abs(),
        phi_spread_comp: angle_spread * mean_range,
        amp_sum: detections.iter().map(|d| d.amplitude).sum(),
    }
}
