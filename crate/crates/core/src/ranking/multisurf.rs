use crate::error::{Error, Result};

use super::Ranking;

/// MultiSURF feature weights over row-major samples.
///
/// Per-feature differences are range-normalised and the sample distance is
/// their sum. Sample `i` uses every other sample closer than
/// `T_i − σ_i/2`, where `T_i` and `σ_i` are the mean and population standard
/// deviation of its distances. Near hits lower a weight by their mean
/// difference; near misses raise it, each other class weighted by its prior
/// `P(c) / (1 − P(c_i))`. Weights are averaged over samples.
pub fn multisurf_weights(rows: &[Vec<f64>], labels: &[usize]) -> Result<Vec<f64>> {
    let n = rows.len();
    if labels.len() != n {
        return Err(Error::Dimension { expected: n, got: labels.len() });
    }
    let Some(m) = rows.first().map(Vec::len) else {
        return Ok(Vec::new());
    };
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidInput("ragged feature matrix".into()));
    }
    let n_classes = labels.iter().max().map_or(0, |c| c + 1);
    let mut prior = vec![0.0; n_classes];
    for &c in labels {
        prior[c] += 1.0 / n as f64;
    }
    if prior.iter().filter(|&&p| p > 0.0).count() < 2 {
        return Err(Error::InvalidInput("MultiSURF needs at least two classes".into()));
    }

    let inv_range: Vec<f64> = (0..m)
        .map(|f| {
            let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r[f]), hi.max(r[f])));
            if hi > lo { 1.0 / (hi - lo) } else { 0.0 }
        })
        .collect();
    let diff = |i: usize, j: usize, f: usize| (rows[i][f] - rows[j][f]).abs() * inv_range[f];
    let dist = |i: usize, j: usize| (0..m).map(|f| diff(i, j, f)).sum::<f64>();

    let mut weights = vec![0.0; m];
    let mut d = vec![0.0; n];
    for i in 0..n {
        for (j, dj) in d.iter_mut().enumerate() {
            *dj = if i == j { 0.0 } else { dist(i, j) };
        }
        if n < 2 {
            continue;
        }
        let others = (n - 1) as f64;
        let mean = d.iter().sum::<f64>() / others;
        let var = d.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| (x - mean).powi(2)).sum::<f64>() / others;
        let threshold = mean - var.sqrt() / 2.0;

        let mut hit_sum = vec![0.0; m];
        let mut hits = 0usize;
        let mut miss_sum = vec![vec![0.0; m]; n_classes];
        let mut misses = vec![0usize; n_classes];
        for j in (0..n).filter(|&j| j != i && d[j] < threshold) {
            let (acc, count) = if labels[j] == labels[i] {
                (&mut hit_sum, &mut hits)
            } else {
                (&mut miss_sum[labels[j]], &mut misses[labels[j]])
            };
            *count += 1;
            for (f, a) in acc.iter_mut().enumerate() {
                *a += diff(i, j, f);
            }
        }
        for f in 0..m {
            let mut w = 0.0;
            if hits > 0 {
                w -= hit_sum[f] / hits as f64;
            }
            for c in (0..n_classes).filter(|&c| c != labels[i] && misses[c] > 0) {
                w += prior[c] / (1.0 - prior[labels[i]]) * miss_sum[c][f] / misses[c] as f64;
            }
            weights[f] += w / n as f64;
        }
    }
    Ok(weights)
}

pub fn multisurf_rank(rows: &[Vec<f64>], labels: &[usize]) -> Result<Ranking> {
    Ok(Ranking::from_scores(&multisurf_weights(rows, labels)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn separating_feature_beats_noise_and_constant_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let labels: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let rows: Vec<Vec<f64>> = labels
            .iter()
            .map(|&c| vec![rng.random::<f64>(), c as f64 * 2.0 + rng.random::<f64>() * 0.1, 7.0, rng.random::<f64>()])
            .collect();
        let w = multisurf_weights(&rows, &labels).unwrap();
        assert!(w[1] > 0.0);
        assert!(w[1] > w[0] && w[1] > w[3]);
        assert_eq!(w[2], 0.0);
        assert_eq!(multisurf_rank(&rows, &labels).unwrap().order[0], 1);
    }

    #[test]
    fn lone_sample_class_is_allowed() {
        let rows = vec![vec![0.0], vec![0.1], vec![0.2], vec![5.0]];
        multisurf_weights(&rows, &[0, 0, 0, 1]).unwrap();
    }
}
