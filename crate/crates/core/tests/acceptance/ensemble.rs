//! Literal re-evaluation of the aggregation formula and the detectors.

use radarclass::ensemble::{
    argmax, detect_hidden_ova, detect_hidden_ovoova, detect_hidden_voting, normalized_scores, score_classes, PosteriorBundle,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const K: usize = 6;

/// Full ordered-pair table and one-vs-all vector.
fn random_bundle(rng: &mut ChaCha8Rng) -> (PosteriorBundle, Vec<Vec<f64>>, Vec<f64>) {
    let mut p = vec![vec![0.0; K]; K];
    let mut upper = Vec::new();
    for i in 0..K {
        for j in i + 1..K {
            let v: f64 = rng.random();
            p[i][j] = v;
            p[j][i] = 1.0 - v;
            upper.push(v);
        }
    }
    let ova: Vec<f64> = (0..K).map(|_| rng.random()).collect();
    (PosteriorBundle::from_upper(K, &upper, &ova).unwrap(), p, ova)
}

fn literal_scores(p: &[Vec<f64>], ova: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; K];
    for i in 0..K {
        for j in 0..K {
            if j != i {
                s[i] += p[i][j] * (ova[i] + ova[j]);
            }
        }
    }
    s
}

fn first_max(s: &[f64]) -> usize {
    let m = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    s.iter().position(|&v| v == m).unwrap()
}

pub fn aggregation() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut argmax_mismatch = 0;
    for _ in 0..10_000 {
        let (b, p, ova) = random_bundle(&mut rng);
        let got = score_classes(&b);
        let want = literal_scores(&p, &ova);
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs());
        }
        if argmax(&got) != first_max(&want) {
            argmax_mismatch += 1;
        }
    }
    let two = |p12: f64| argmax(&score_classes(&PosteriorBundle::from_upper(2, &[p12], &[0.6, 0.4]).unwrap()));
    let eps = 1e-12;
    let boundary = two(0.5 + eps) == 0 && two(0.5) == 0 && two(0.5 - eps) == 1;
    let s = score_classes(&PosteriorBundle::from_upper(2, &[0.5], &[0.6, 0.4]).unwrap());
    let tie_exact = s[0] == s[1];
    let pass = worst <= 1e-12 && argmax_mismatch == 0 && boundary && tie_exact;
    (
        pass,
        format!("10000 bundles, max |diff| {worst:.1e}, argmax mismatches {argmax_mismatch}, K=2 boundary at 0.5: {}", boundary && tie_exact),
    )
}

pub fn detectors() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let mut mismatches = [0usize; 3];
    let mut monotone_violations = 0;
    let mut worst_sum = 0.0f64;
    for _ in 0..10_000 {
        let (b, p, ova) = random_bundle(&mut rng);
        let thr: f64 = rng.random();
        let max_p = ova.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if detect_hidden_ova(&b, thr) != (max_p < thr) {
            mismatches[0] += 1;
        }
        let votes: Vec<usize> = (0..K)
            .map(|i| usize::from(ova[i] > 0.5) + (0..K).filter(|&j| j != i && p[i][j] > 0.5).count())
            .collect();
        for v in 1..=K {
            if detect_hidden_voting(&b, v) != votes.iter().all(|&x| x < v) {
                mismatches[1] += 1;
            }
        }
        let s = literal_scores(&p, &ova);
        let c: f64 = s.iter().sum();
        let want = c == 0.0 || s.iter().all(|&x| x / c < thr);
        if detect_hidden_ovoova(&b, thr) != want {
            mismatches[2] += 1;
        }
        if let Some(n) = normalized_scores(&b) {
            worst_sum = worst_sum.max((n.iter().sum::<f64>() - 1.0).abs());
        }
        let flagged: Vec<bool> = grid.iter().map(|&t| detect_hidden_ova(&b, t)).collect();
        if flagged.windows(2).any(|w| w[0] && !w[1]) {
            monotone_violations += 1;
        }
    }
    let pass = mismatches == [0, 0, 0] && monotone_violations == 0 && worst_sum <= 1e-12;
    (
        pass,
        format!(
            "10000 bundles, mismatches ova/voting/ovoova {mismatches:?}, monotonicity violations {monotone_violations}, max |sum-1| {worst_sum:.1e}"
        ),
    )
}
