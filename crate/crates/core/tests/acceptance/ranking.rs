//! Reference implementations of MultiSURF and greedy JMI.

use std::collections::HashMap;

use radarclass::ranking::{jmi_rank, multisurf_rank, multisurf_weights};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn multisurf_reference(x: &[Vec<f64>], y: &[usize]) -> Vec<f64> {
    let n = x.len();
    let m = x[0].len();
    let range: Vec<f64> = (0..m)
        .map(|f| {
            let col: Vec<f64> = x.iter().map(|r| r[f]).collect();
            col.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - col.iter().cloned().fold(f64::INFINITY, f64::min)
        })
        .collect();
    let diff = |a: usize, b: usize, f: usize| if range[f] > 0.0 { (x[a][f] - x[b][f]).abs() / range[f] } else { 0.0 };
    let dist = |a: usize, b: usize| (0..m).map(|f| diff(a, b, f)).sum::<f64>();
    let classes: Vec<usize> = {
        let mut c = y.to_vec();
        c.sort_unstable();
        c.dedup();
        c
    };
    let prior = |c: usize| y.iter().filter(|&&l| l == c).count() as f64 / n as f64;
    let mut w = vec![0.0; m];
    for i in 0..n {
        let ds: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dist(i, j)).collect();
        let mean = ds.iter().sum::<f64>() / ds.len() as f64;
        let sd = (ds.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / ds.len() as f64).sqrt();
        let near: Vec<usize> = (0..n).filter(|&j| j != i && dist(i, j) < mean - sd / 2.0).collect();
        for f in 0..m {
            let hits: Vec<usize> = near.iter().copied().filter(|&j| y[j] == y[i]).collect();
            if !hits.is_empty() {
                w[f] -= hits.iter().map(|&j| diff(i, j, f)).sum::<f64>() / hits.len() as f64 / n as f64;
            }
            for &c in classes.iter().filter(|&&c| c != y[i]) {
                let miss: Vec<usize> = near.iter().copied().filter(|&j| y[j] == c).collect();
                if !miss.is_empty() {
                    let mean_diff = miss.iter().map(|&j| diff(i, j, f)).sum::<f64>() / miss.len() as f64;
                    w[f] += prior(c) / (1.0 - prior(y[i])) * mean_diff / n as f64;
                }
            }
        }
    }
    w
}

fn entropy(keys: &[Vec<usize>]) -> f64 {
    let mut counts: HashMap<&Vec<usize>, usize> = HashMap::new();
    for k in keys {
        *counts.entry(k).or_default() += 1;
    }
    let n = keys.len() as f64;
    -counts.values().map(|&c| c as f64 / n * (c as f64 / n).ln()).sum::<f64>()
}

/// I(vars; Y) = H(vars) + H(Y) - H(vars, Y).
fn mi(vars: &[&Vec<usize>], y: &[usize]) -> f64 {
    let n = y.len();
    let joint: Vec<Vec<usize>> = (0..n).map(|i| vars.iter().map(|v| v[i]).collect()).collect();
    let yy: Vec<Vec<usize>> = y.iter().map(|&v| vec![v]).collect();
    let all: Vec<Vec<usize>> = (0..n).map(|i| vars.iter().map(|v| v[i]).chain([y[i]]).collect()).collect();
    entropy(&joint) + entropy(&yy) - entropy(&all)
}

fn greedy_jmi(cols: &[Vec<usize>], y: &[usize]) -> Vec<usize> {
    let m = cols.len();
    let mut chosen: Vec<usize> = Vec::new();
    while chosen.len() < m {
        let mut best = None;
        let mut best_score = f64::NEG_INFINITY;
        for f in (0..m).filter(|f| !chosen.contains(f)) {
            let score = if chosen.is_empty() {
                mi(&[&cols[f]], y)
            } else {
                chosen.iter().map(|&g| mi(&[&cols[f], &cols[g]], y)).sum()
            };
            if score > best_score + 1e-12 {
                best_score = score;
                best = Some(f);
            }
        }
        chosen.push(best.unwrap());
    }
    chosen
}

pub fn run() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x: Vec<Vec<f64>> = (0..20).map(|_| (0..5).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let y: Vec<usize> = (0..20).map(|i| if i < 7 { 0 } else if i < 14 { 1 } else { 2 }).collect();
        let got = multisurf_weights(&x, &y).unwrap();
        let want = multisurf_reference(&x, &y);
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs());
        }
    }
    let mut jmi_mismatch = 0;
    for _ in 0..200 {
        let n = 60;
        let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let cols: Vec<Vec<usize>> = (0..4)
            .map(|f| {
                y.iter()
                    .map(|&c| if rng.random_bool(0.25 + 0.15 * f as f64) { rng.random_range(0..4) } else { c + usize::from(rng.random_bool(0.3)) })
                    .collect()
            })
            .collect();
        if jmi_rank(&cols, &y).unwrap().order != greedy_jmi(&cols, &y) {
            jmi_mismatch += 1;
        }
    }
    // A feature equal to the label next to noise.
    let y: Vec<usize> = (0..40).map(|i| i % 2).collect();
    let rows: Vec<Vec<f64>> = y
        .iter()
        .map(|&c| vec![rng.random_range(0.0..1.0), c as f64, rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
        .collect();
    let cols: Vec<Vec<usize>> = (0..4)
        .map(|f| radarclass::ranking::discretize(&rows.iter().map(|r| r[f]).collect::<Vec<_>>(), 10))
        .collect();
    let perfect_first = multisurf_rank(&rows, &y).unwrap().order[0] == 1 && jmi_rank(&cols, &y).unwrap().order[0] == 1;
    let pass = worst <= 1e-12 && jmi_mismatch == 0 && perfect_first;
    (
        pass,
        format!("MultiSURF max |diff| {worst:.1e} over 50 sets of 20x5; JMI order mismatches {jmi_mismatch}/200; perfect predictor first: {perfect_first}"),
    )
}
