use crate::error::{Error, Result};

use super::Ranking;

/// Equal-frequency binning. A value's bin follows from its rank `pos` in
/// sorted order as `pos·bins/n`; tied values all take the bin of their first
/// (lowest) rank.
pub fn discretize(column: &[f64], bins: usize) -> Vec<usize> {
    let n = column.len();
    let bins = bins.max(1);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| column[a].total_cmp(&column[b]));
    let mut out = vec![0; n];
    let mut bin = 0;
    for (pos, &i) in order.iter().enumerate() {
        if pos == 0 || column[i] != column[order[pos - 1]] {
            bin = pos * bins / n;
        }
        out[i] = bin;
    }
    out
}

fn cardinality(v: &[usize]) -> usize {
    v.iter().max().map_or(0, |m| m + 1)
}

/// Empirical mutual information in nats, 0·log 0 = 0.
pub fn mutual_information(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let (ka, kb) = (cardinality(a), cardinality(b));
    let mut joint = vec![0usize; ka * kb];
    let mut pa = vec![0usize; ka];
    let mut pb = vec![0usize; kb];
    for (&x, &y) in a.iter().zip(b) {
        joint[x * kb + y] += 1;
        pa[x] += 1;
        pb[y] += 1;
    }
    let nf = n as f64;
    let mut mi = 0.0;
    for x in 0..ka {
        for y in 0..kb {
            let c = joint[x * kb + y];
            if c > 0 {
                mi += c as f64 / nf * (c as f64 * nf / (pa[x] as f64 * pb[y] as f64)).ln();
            }
        }
    }
    mi.max(0.0)
}

fn pair_code(f: &[usize], g: &[usize]) -> Vec<usize> {
    let kg = cardinality(g);
    f.iter().zip(g).map(|(&a, &b)| a * kg + b).collect()
}

/// Greedy JMI ordering over discretised feature columns. The first feature
/// maximises I(f; Y); each later one maximises Σ_{g ∈ S} I((f, g); Y). Ties
/// go to the lower index. Scores are positional (n − position) because the
/// raw criterion grows with |S| and is not comparable across steps.
pub fn jmi_rank(columns: &[Vec<usize>], labels: &[usize]) -> Result<Ranking> {
    let n_classes = {
        let mut l = labels.to_vec();
        l.sort_unstable();
        l.dedup();
        l.len()
    };
    if n_classes < 2 {
        return Err(Error::InvalidInput("JMI needs at least two classes".into()));
    }
    if let Some(c) = columns.iter().find(|c| c.len() != labels.len()) {
        return Err(Error::Dimension {
            expected: labels.len(),
            got: c.len(),
        });
    }
    let m = columns.len();
    let mut criterion: Vec<f64> = columns.iter().map(|c| mutual_information(c, labels)).collect();
    let mut chosen = vec![false; m];
    let mut order = Vec::with_capacity(m);
    for step in 0..m {
        let best = (0..m)
            .filter(|&f| !chosen[f])
            .fold(None, |acc: Option<usize>, f| match acc {
                Some(b) if criterion[b] >= criterion[f] => Some(b),
                _ => Some(f),
            })
            .expect("unchosen feature remains");
        chosen[best] = true;
        order.push(best);
        if step == 0 {
            criterion.iter_mut().for_each(|c| *c = 0.0);
        }
        for f in (0..m).filter(|&f| !chosen[f]) {
            criterion[f] += mutual_information(&pair_code(&columns[f], &columns[best]), labels);
        }
    }
    Ok(Ranking {
        scores: (0..m).map(|p| (m - p) as f64).collect(),
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discretize_examples() {
        assert_eq!(discretize(&[3.0; 7], 10), vec![0; 7]);
        let col: Vec<f64> = (0..100).map(|i| ((i * 37) % 100) as f64).collect();
        let d = discretize(&col, 10);
        for b in 0..10 {
            assert_eq!(d.iter().filter(|&&x| x == b).count(), 10);
        }
        // Ties collapse into the bin of their first rank.
        assert_eq!(discretize(&[1.0, 1.0, 1.0, 2.0], 2), vec![0, 0, 0, 1]);
    }

    #[test]
    fn mi_of_identical_binary_is_log2() {
        let a = [0, 1, 0, 1];
        assert!((mutual_information(&a, &a) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(mutual_information(&a, &[0, 0, 1, 1]), 0.0);
    }

    #[test]
    fn perfect_predictor_first_and_duplicate_not_preferred() {
        let y: Vec<usize> = (0..12).map(|i| i % 2).collect();
        let noise: Vec<usize> = (0..12).map(|i| (i * 7 / 3) % 3).collect();
        let weak: Vec<usize> = vec![0, 1, 0, 1, 0, 1, 1, 0, 1, 0, 0, 0];
        let cols = vec![noise.clone(), y.clone(), y.clone(), weak];
        let r = jmi_rank(&cols, &y).unwrap();
        assert_eq!(r.order[0], 1);
        assert_ne!(r.order[1], 2);
        r.validate().unwrap();
    }

    #[test]
    fn single_class_rejected() {
        assert!(jmi_rank(&[vec![0, 1]], &[1, 1]).is_err());
    }
}
