//! Brute-force re-derivations of every catalog feature.

use radarclass::features::{extract_all, FeatureCatalog, NUM_FEATURES};
use radarclass::radar_data::{ClassLabel, ClusterSample, InstanceId, RadarDetection};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-6;
const LOG_EPS: f64 = 1e-9;
const MIN_AREA: f64 = 1e-6;
const MAX_RADIUS: f64 = 1e3;
const VOLCAN_REF: f64 = 50.0;
const CHI2_2: f64 = 5.991;
const CHI2_4: f64 = 9.488;

fn two_pass(v: &[f64]) -> [f64; 9] {
    let n = v.len() as f64;
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return [min, max, min, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    }
    let mean = v.iter().sum::<f64>() / n;
    let c = |k: i32| v.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / n;
    let mad = v.iter().map(|x| (x - mean).abs()).sum::<f64>() / n;
    let var = c(2);
    let sd = var.sqrt();
    [min, max, mean, mad, var, sd, c(3) / sd.powi(3), c(4) / (var * var), max - min]
}

/// Cyclic Jacobi rotations; eigenvalues descending with eigenvectors as
/// columns.
pub fn jacobi(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>();
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let vals = idx.iter().map(|&i| a[i][i].max(0.0)).collect();
    let vecs = idx.iter().map(|&i| (0..n).map(|k| v[k][i]).collect()).collect();
    (vals, vecs)
}

fn cov(cols: &[&[f64]]) -> Vec<Vec<f64>> {
    let n = cols[0].len() as f64;
    let means: Vec<f64> = cols.iter().map(|c| c.iter().sum::<f64>() / n).collect();
    (0..cols.len())
        .map(|i| {
            (0..cols.len())
                .map(|j| cols[i].iter().zip(cols[j]).map(|(a, b)| (a - means[i]) * (b - means[j])).sum::<f64>() / n)
                .collect()
        })
        .collect()
}

fn magnitude(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m: f64, a| m.max(a.abs()))
}

/// |Pearson r|, zero when either variable is flat relative to its scale.
fn corr_guarded(x: &[f64], y: &[f64], sx: f64, sy: f64) -> f64 {
    let flat = |v: &[f64], scale: f64| spread(v) <= 1e-12 * scale;
    if x.len() < 2 || flat(x, sx) || flat(y, sy) {
        return 0.0;
    }
    corr_abs(x, y)
}

fn corr_abs(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        (sxy / (sxx * syy).sqrt()).abs()
    }
}

fn spread(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn orient(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Jarvis march; collinear points on an edge are skipped in favour of the
/// farthest one.
fn gift_wrap(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let start = (0..pts.len()).min_by(|&i, &j| pts[i].0.total_cmp(&pts[j].0).then(pts[i].1.total_cmp(&pts[j].1))).unwrap();
    let mut hull = vec![pts[start]];
    if pts.iter().all(|&p| p == pts[start]) {
        return hull;
    }
    let mut cur = start;
    loop {
        let mut next = if cur == 0 { 1 } else { 0 };
        for k in 0..pts.len() {
            if pts[k] == pts[cur] {
                continue;
            }
            let o = orient(pts[cur], pts[next], pts[k]);
            let d = |p: (f64, f64)| (p.0 - pts[cur].0).hypot(p.1 - pts[cur].1);
            if pts[next] == pts[cur] || o < 0.0 || (o == 0.0 && d(pts[k]) > d(pts[next])) {
                next = k;
            }
        }
        if pts[next] == pts[start] || hull.len() > pts.len() {
            break;
        }
        hull.push(pts[next]);
        cur = next;
    }
    hull
}

fn shoelace(h: &[(f64, f64)]) -> f64 {
    if h.len() < 3 {
        return 0.0;
    }
    (0..h.len()).map(|i| {
        let (a, b) = (h[i], h[(i + 1) % h.len()]);
        a.0 * b.1 - b.0 * a.1
    }).sum::<f64>().abs() / 2.0
}

fn perimeter(h: &[(f64, f64)]) -> f64 {
    match h.len() {
        0 | 1 => 0.0,
        2 => 2.0 * (h[0].0 - h[1].0).hypot(h[0].1 - h[1].1),
        m => (0..m).map(|i| (h[i].0 - h[(i + 1) % m].0).hypot(h[i].1 - h[(i + 1) % m].1)).sum(),
    }
}

/// Smallest enclosing rectangle over every direction spanned by two points.
fn rect_brute(pts: &[(f64, f64)]) -> (f64, f64) {
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (dx, dy) = (pts[j].0 - pts[i].0, pts[j].1 - pts[i].1);
            let len = dx.hypot(dy);
            if len == 0.0 {
                continue;
            }
            let (ex, ey) = (dx / len, dy / len);
            let u: Vec<f64> = pts.iter().map(|p| p.0 * ex + p.1 * ey).collect();
            let w: Vec<f64> = pts.iter().map(|p| -p.0 * ey + p.1 * ex).collect();
            let (a, b) = (spread(&u), spread(&w));
            if a * b < best.0 {
                best = (a * b, 2.0 * (a + b));
            }
        }
    }
    if best.0.is_infinite() {
        (0.0, 0.0)
    } else {
        best
    }
}

/// Kåsa fit from the raw 3×3 normal equations of x²+y² = 2ax + 2by + c.
fn kasa(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mut m = [[0.0; 4]; 3];
    for &(x, y) in pts {
        let row = [2.0 * x, 2.0 * y, 1.0];
        let rhs = x * x + y * y;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            m[i][3] += row[i] * rhs;
        }
    }
    let _ = n;
    for c in 0..3 {
        let p = (c..3).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        m.swap(c, p);
        for r in 0..3 {
            if r != c {
                let f = m[r][c] / m[c][c];
                for k in c..4 {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    let (a, b, c) = (m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]);
    (c + a * a + b * b).sqrt().min(MAX_RADIUS)
}

fn cbo(pts: &[(f64, f64)]) -> [f64; 3] {
    let n = pts.len() as f64;
    let c = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let d: Vec<f64> = pts.iter().map(|p| (p.0 - c.0).hypot(p.1 - c.1)).collect();
    let dmax = d.iter().cloned().fold(0.0, f64::max);
    let mut out = [0.0; 3];
    if dmax == 0.0 {
        return out;
    }
    for (k, o) in out.iter_mut().enumerate() {
        let r = dmax * (k + 1) as f64 / 3.0;
        let mut sectors = std::collections::BTreeSet::new();
        for (p, &di) in pts.iter().zip(&d) {
            if di > 0.0 && di <= r * (1.0 + 1e-12) {
                let ang = (p.1 - c.1).atan2(p.0 - c.0) + std::f64::consts::PI;
                sectors.insert(((ang / (std::f64::consts::PI / 4.0)).floor() as usize).min(7));
            }
        }
        *o = sectors.len() as f64;
    }
    out
}

/// All 98 features by name.
pub fn oracle(s: &ClusterSample) -> Vec<(String, f64)> {
    let d = &s.detections;
    let n = d.len() as f64;
    let amp: Vec<f64> = d.iter().map(|d| d.amplitude).collect();
    let r: Vec<f64> = d.iter().map(|d| d.x.hypot(d.y)).collect();
    let phi: Vec<f64> = d.iter().map(|d| d.y.atan2(d.x)).collect();
    let vr: Vec<f64> = d.iter().map(|d| d.doppler_comp).collect();
    let raw: Vec<f64> = d.iter().map(|d| d.doppler_raw).collect();
    let x: Vec<f64> = d.iter().map(|d| d.x).collect();
    let y: Vec<f64> = d.iter().map(|d| d.y).collect();
    let pts: Vec<(f64, f64)> = x.iter().zip(&y).map(|(&a, &b)| (a, b)).collect();
    let mut out: Vec<(String, f64)> = Vec::new();

    let stats = ["min", "max", "mean", "meanAbsDev", "var", "stdDev", "skewness", "kurtosis", "spread"];
    let bases = [("Amplitude", &amp), ("Range", &r), ("Angle", &phi), ("Velocity", &vr)];
    let mut st = Vec::new();
    for (b, v) in bases {
        let s = two_pass(v);
        for (name, val) in stats.iter().zip(s) {
            out.push((format!("{name}{b}"), val));
        }
        st.push(s);
    }
    let u = [("MeanAmplitude", st[0][2]), ("SpreadRange", st[1][8]), ("SpreadAngle", st[2][8]), ("MeanVelocity", st[3][2])];
    for (name, v) in u {
        out.push((format!("log{name}"), (v.abs() + LOG_EPS).ln()));
        out.push((format!("sqrt{name}"), v.abs().sqrt()));
        out.push((format!("quad{name}"), v * v));
    }

    let (ev2, ev4) = if d.len() < 2 {
        (vec![0.0; 2], vec![0.0; 4])
    } else {
        (jacobi(cov(&[&x, &y])).0, jacobi(cov(&[&x, &y, &vr, &amp])).0)
    };
    for (k, &l) in ev2.iter().enumerate() {
        out.push((format!("covEVXY{}", k + 1), l));
        out.push((format!("covEV2XY{}", k + 1), l * l));
        out.push((format!("con95axisXY{}", k + 1), 2.0 * (CHI2_2 * l).sqrt()));
    }
    for (k, &l) in ev4.iter().enumerate() {
        out.push((format!("covEVXYVA{}", k + 1), l));
        out.push((format!("covEV2XYVA{}", k + 1), l * l));
        out.push((format!("con95axisXYVA{}", k + 1), 2.0 * (CHI2_4 * l).sqrt()));
    }

    let mean_r = r.iter().sum::<f64>() / n;
    out.push(("AmpSum".into(), amp.iter().sum()));
    out.push(("PhiSpreadComp".into(), spread(&phi) * mean_r));
    let raw_mean = raw.iter().sum::<f64>() / n;
    out.push(("StdDevDoppler".into(), (raw.iter().map(|v| (v - raw_mean).powi(2)).sum::<f64>() / n).sqrt()));
    out.push(("fracStationary".into(), vr.iter().filter(|v| v.abs() < 0.1).count() as f64 / n));
    out.push(("nDetects".into(), n));
    out.push(("nDetectsComp".into(), n * mean_r));
    out.push(("nDetectsVolcan".into(), n * (mean_r / VOLCAN_REF).powi(2)));
    out.push(("CorePoints".into(), s.core_count as f64 / n));

    let mut pair_sum = 0.0;
    let mut width = 0.0;
    let mut far = None;
    let mut pairs = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let dd = (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
            pair_sum += dd;
            pairs += 1.0;
            if dd > width {
                width = dd;
                far = Some((pts[i], pts[j]));
            }
        }
    }
    out.push(("MeanDist".into(), if pairs > 0.0 { pair_sum / pairs } else { 0.0 }));
    out.push(("clusterWidth".into(), width));
    let dev = far.map_or(0.0, |(a, b)| pts.iter().map(|&p| orient(a, b, p).abs() / width).sum::<f64>() / n);
    out.push(("maxDistDev".into(), dev));
    for (k, v) in cbo(&pts).iter().enumerate() {
        out.push((format!("CBO{}", k + 1), *v));
    }
    let (ra, rp) = rect_brute(&pts);
    out.push(("RectHullArea".into(), ra));
    out.push(("RectHullPerimeter".into(), rp));
    out.push(("RectHullDensity".into(), n / ra.max(MIN_AREA)));
    let hull = gift_wrap(&pts);
    let (ha, hp) = (shoelace(&hull), perimeter(&hull));
    out.push(("ConvexHullArea".into(), ha));
    out.push(("ConvexHullPerimeter".into(), hp));
    out.push(("ConvexHullDensity".into(), n / ha.max(MIN_AREA)));
    // Collinear clusters have no finite circle and are capped.
    let collinear = ev2[0] * ev2[1] <= 1e-12 * (ev2[0] + ev2[1]).powi(2);
    let circle = if d.len() < 2 || ev2[0] + ev2[1] == 0.0 {
        0.0
    } else if collinear {
        MAX_RADIUS
    } else {
        kasa(&pts)
    };
    out.push(("CircleFit".into(), circle));
    out.push(("Circularity".into(), if hp > 0.0 { 4.0 * std::f64::consts::PI * ha / (hp * hp) } else { 0.0 }));
    let (cx, cy) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    out.push(("Compactness".into(), pts.iter().map(|p| (p.0 - cx).hypot(p.1 - cy)).sum::<f64>() / n));
    out.push(("xyLinearity".into(), corr_guarded(&x, &y, magnitude(&x), magnitude(&y))));

    let vs = spread(&vr).max(1e-9);
    let (major, minor) = if d.len() < 2 {
        ((1.0, 0.0), (0.0, 1.0))
    } else {
        let (_, vecs) = jacobi(cov(&[&x, &y]));
        ((vecs[0][0], vecs[0][1]), (vecs[1][0], vecs[1][1]))
    };
    let proj = |a: (f64, f64)| -> Vec<f64> { pts.iter().map(|p| (p.0 - cx) * a.0 + (p.1 - cy) * a.1).collect() };
    let (pm, pn) = (proj(major), proj(minor));
    let extent = spread(&x).max(spread(&y));
    let mv = magnitude(&vr);
    out.push(("rVrLinearity".into(), corr_guarded(&r, &vr, magnitude(&r), mv)));
    out.push(("phiVrLinearity".into(), corr_guarded(&phi, &vr, magnitude(&phi), mv)));
    out.push(("majorVrLinearity".into(), corr_guarded(&pm, &vr, extent, mv)));
    out.push(("minorVrLinearity".into(), corr_guarded(&pn, &vr, extent, mv)));
    out.push(("rVrSpread".into(), spread(&r) / vs));
    out.push(("phiVrSpread".into(), spread(&phi) / vs));
    out.push(("majorVrSpread".into(), spread(&pm) / vs));
    out.push(("minorVrSpread".into(), spread(&pn) / vs));
    out
}

fn random_sample(rng: &mut ChaCha8Rng, n: usize) -> ClusterSample {
    let cx = rng.random_range(8.0..60.0);
    let cy = rng.random_range(-20.0..20.0);
    let sx = rng.random_range(0.1..4.0);
    let sy = rng.random_range(0.1..2.0);
    let rot: f64 = rng.random_range(0.0..std::f64::consts::PI);
    let v0 = rng.random_range(-12.0..12.0);
    let detections = (0..n)
        .map(|_| {
            let (u, w) = (rng.random_range(-sx..sx), rng.random_range(-sy..sy));
            let x = cx + u * rot.cos() - w * rot.sin();
            let y = cy + u * rot.sin() + w * rot.cos();
            let comp = v0 + rng.random_range(-1.5..1.5);
            RadarDetection {
                sensor_id: rng.random_range(0..4),
                t: rng.random_range(1.0..1.149),
                range: x.hypot(y),
                azimuth: y.atan2(x),
                doppler_raw: comp - rng.random_range(5.0..15.0),
                doppler_comp: comp,
                amplitude: rng.random_range(-10.0..30.0),
                x,
                y,
            }
        })
        .collect();
    ClusterSample {
        instance_id: InstanceId(0),
        label: ClassLabel::Car,
        window_start: 1.0,
        window_len: 0.15,
        detections,
        core_count: rng.random_range(0..=n),
    }
}

/// Relative error with an absolute floor of 1e-12 at the 1e-6 tolerance;
/// `scale` lifts the denominator for eigen-derived values, whose round-off
/// is proportional to the largest eigenvalue.
fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / (a.abs().max(b.abs()).max(scale) + 1e-12 / TOL)
}

/// Largest magnitude among the features sharing `name`'s eigen family.
fn family_scale(name: &str, want: &[(String, f64)]) -> f64 {
    if !(name.starts_with("covEV") || name.starts_with("con95axis")) {
        return 0.0;
    }
    let stem = name.trim_end_matches(|c: char| c.is_ascii_digit());
    want.iter()
        .filter(|(n, _)| n.trim_end_matches(|c: char| c.is_ascii_digit()) == stem)
        .fold(0.0, |m: f64, (_, v)| m.max(v.abs()))
}

fn degenerate_cases() -> Vec<ClusterSample> {
    let det = |x: f64, y: f64, v: f64, a: f64| RadarDetection {
        sensor_id: 0,
        t: 1.0,
        range: x.hypot(y),
        azimuth: y.atan2(x),
        doppler_raw: v,
        doppler_comp: v,
        amplitude: a,
        x,
        y,
    };
    let wrap = |detections: Vec<RadarDetection>| ClusterSample {
        instance_id: InstanceId(0),
        label: ClassLabel::Car,
        window_start: 1.0,
        window_len: 0.15,
        core_count: detections.len(),
        detections,
    };
    vec![
        wrap(vec![det(10.0, 2.0, 1.0, 5.0)]),
        wrap((0..12).map(|i| det(10.0 + i as f64 * 0.3, 1.0 + i as f64 * 0.1, 2.0, 5.0)).collect()),
        wrap((0..12).map(|i| det(10.0 + i as f64 * 0.3, 0.0, 0.0, 0.0)).collect()),
        wrap(vec![det(20.0, -3.0, 0.0, 0.0); 9]),
        wrap(vec![det(20.0, -3.0, 4.0, 7.0); 2]),
        wrap((0..5).map(|i| det(30.0, i as f64, 0.05, 1.0)).collect()),
    ]
}

pub fn run() -> (bool, String) {
    let start = std::time::Instant::now();
    let catalog = FeatureCatalog::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for case in 0..200 {
        let n = 1 + case % 100;
        let s = random_sample(&mut rng, n);
        let got = extract_all(&s).expect("valid sample");
        let want = oracle(&s);
        assert_eq!(want.len(), NUM_FEATURES);
        for (name, w) in &want {
            let g = got.values[catalog.index_of(name).unwrap_or_else(|| panic!("unknown feature {name}"))];
            let rel = rel_err(g, *w, family_scale(name, &want));
            worst = worst.max(rel);
            if rel > TOL && failures.len() < 5 {
                failures.push(format!("case {case} n={n} {name}: got {g} want {w}"));
            }
        }
    }
    let mut non_finite = 0;
    for s in degenerate_cases() {
        non_finite += extract_all(&s).expect("valid sample").values.iter().filter(|v| !v.is_finite()).count();
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = failures.is_empty() && non_finite == 0 && secs < 30.0;
    let mut detail = format!("200 samples, worst rel err {worst:.2e}, non-finite {non_finite}, {secs:.1} s");
    if !failures.is_empty() {
        detail.push_str(&format!("; {}", failures.join("; ")));
    }
    (pass, detail)
}
