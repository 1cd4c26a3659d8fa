//! Central finite differences against back-propagation through time.

use radarclass::classifier::LstmParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut params = LstmParams::new(4, 3, 3, &mut rng);
    // Move the biases off their initial values so every gate is exercised.
    for v in params.b.iter_mut().chain(params.by.iter_mut()) {
        *v += rng.random_range(-0.5..0.5);
    }
    let steps: Vec<Vec<f64>> = (0..5).map(|_| (0..4).map(|_| rng.random_range(-1.5..1.5)).collect()).collect();
    let label = 1;
    let mut grad = params.zeros_like();
    params.loss_and_grad(&steps, label, &mut grad);
    let loss = |p: &LstmParams| -p.forward(&steps)[label].ln();
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut per_group = Vec::new();
    let analytic: Vec<(&str, Vec<f64>)> = grad.groups().iter().map(|(n, v)| (*n, (*v).clone())).collect();
    for (g, (name, an)) in analytic.iter().enumerate() {
        let mut group_worst = 0.0f64;
        for k in 0..an.len() {
            let mut plus = params.clone();
            plus.groups_mut()[g][k] += h;
            let mut minus = params.clone();
            minus.groups_mut()[g][k] -= h;
            let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
            let rel = (an[k] - fd).abs() / an[k].abs().max(fd.abs()).max(1e-7);
            group_worst = group_worst.max(rel);
        }
        per_group.push(format!("{name} {group_worst:.1e}"));
        worst = worst.max(group_worst);
    }
    (worst < 1e-4, format!("3-cell LSTM, max rel err {worst:.2e} ({})", per_group.join(", ")))
}
