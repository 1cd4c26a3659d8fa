//! Gated recurrent cell (input, forget, candidate, output) over a sequence,
//! last hidden state into a softmax layer.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::softmax;

/// Parameter tensors, each flattened row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    pub input_dim: usize,
    pub hidden: usize,
    pub classes: usize,
    /// Input weights, 4H × D, gate blocks in order i, f, g, o.
    pub wx: Vec<f64>,
    /// Recurrent weights, 4H × H.
    pub wh: Vec<f64>,
    /// Gate biases, 4H.
    pub b: Vec<f64>,
    /// Output weights, C × H.
    pub wy: Vec<f64>,
    pub by: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn matvec_add(w: &[f64], x: &[f64], out: &mut [f64]) {
    let cols = x.len();
    for (r, o) in out.iter_mut().enumerate() {
        let row = &w[r * cols..(r + 1) * cols];
        *o += row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

struct Step {
    i: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    o: Vec<f64>,
    c: Vec<f64>,
    h: Vec<f64>,
}

impl LstmParams {
    pub fn new<R: Rng>(input_dim: usize, hidden: usize, classes: usize, rng: &mut R) -> Self {
        let s = 1.0 / (hidden as f64).sqrt();
        let mut init = |n: usize| (0..n).map(|_| rng.random_range(-s..s)).collect::<Vec<f64>>();
        let wx = init(4 * hidden * input_dim);
        let wh = init(4 * hidden * hidden);
        let wy = init(classes * hidden);
        let mut b = vec![0.0; 4 * hidden];
        b[hidden..2 * hidden].iter_mut().for_each(|v| *v = 1.0);
        Self {
            input_dim,
            hidden,
            classes,
            wx,
            wh,
            b,
            wy,
            by: vec![0.0; classes],
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            wx: vec![0.0; self.wx.len()],
            wh: vec![0.0; self.wh.len()],
            b: vec![0.0; self.b.len()],
            wy: vec![0.0; self.wy.len()],
            by: vec![0.0; self.by.len()],
            ..*self
        }
    }

    /// Parameter groups with their names, in a fixed order.
    pub fn groups(&self) -> [(&'static str, &Vec<f64>); 5] {
        [("wx", &self.wx), ("wh", &self.wh), ("b", &self.b), ("wy", &self.wy), ("by", &self.by)]
    }

    pub fn groups_mut(&mut self) -> [&mut Vec<f64>; 5] {
        [&mut self.wx, &mut self.wh, &mut self.b, &mut self.wy, &mut self.by]
    }

    fn run(&self, steps: &[Vec<f64>]) -> Vec<Step> {
        let h_n = self.hidden;
        let mut out: Vec<Step> = Vec::with_capacity(steps.len());
        let zeros = vec![0.0; h_n];
        for x in steps {
            let (h_prev, c_prev) = match out.last() {
                Some(s) => (&s.h, &s.c),
                None => (&zeros, &zeros),
            };
            let mut z = self.b.clone();
            matvec_add(&self.wx, x, &mut z);
            matvec_add(&self.wh, h_prev, &mut z);
            let i: Vec<f64> = z[..h_n].iter().map(|&v| sigmoid(v)).collect();
            let f: Vec<f64> = z[h_n..2 * h_n].iter().map(|&v| sigmoid(v)).collect();
            let g: Vec<f64> = z[2 * h_n..3 * h_n].iter().map(|v| v.tanh()).collect();
            let o: Vec<f64> = z[3 * h_n..].iter().map(|&v| sigmoid(v)).collect();
            let c: Vec<f64> = (0..h_n).map(|k| f[k] * c_prev[k] + i[k] * g[k]).collect();
            let h: Vec<f64> = (0..h_n).map(|k| o[k] * c[k].tanh()).collect();
            out.push(Step { i, f, g, o, c, h });
        }
        out
    }

    fn logits(&self, h: &[f64]) -> Vec<f64> {
        let mut l = self.by.clone();
        matvec_add(&self.wy, h, &mut l);
        l
    }

    /// Class posteriors for standardised steps.
    pub fn forward(&self, steps: &[Vec<f64>]) -> Vec<f64> {
        let trace = self.run(steps);
        let zeros = vec![0.0; self.hidden];
        let h = trace.last().map_or(&zeros, |s| &s.h);
        softmax(&self.logits(h))
    }

    /// Cross-entropy loss of one sequence and its gradient, accumulated
    /// into `grad`.
    pub fn loss_and_grad(&self, steps: &[Vec<f64>], label: usize, grad: &mut LstmParams) -> f64 {
        let h_n = self.hidden;
        let d = self.input_dim;
        let trace = self.run(steps);
        let zeros = vec![0.0; h_n];
        let h_last = trace.last().map_or(&zeros, |s| &s.h);
        let p = softmax(&self.logits(h_last));
        let loss = -p[label].max(f64::MIN_POSITIVE).ln();

        let mut dl = p;
        dl[label] -= 1.0;
        let mut dh = vec![0.0; h_n];
        for (c, &g) in dl.iter().enumerate() {
            grad.by[c] += g;
            for k in 0..h_n {
                grad.wy[c * h_n + k] += g * h_last[k];
                dh[k] += self.wy[c * h_n + k] * g;
            }
        }
        let mut dc = vec![0.0; h_n];
        let mut dz = vec![0.0; 4 * h_n];
        for t in (0..trace.len()).rev() {
            let s = &trace[t];
            let (h_prev, c_prev) = if t > 0 { (&trace[t - 1].h, &trace[t - 1].c) } else { (&zeros, &zeros) };
            for k in 0..h_n {
                let tc = s.c[k].tanh();
                let d_o = dh[k] * tc;
                dc[k] += dh[k] * s.o[k] * (1.0 - tc * tc);
                dz[k] = dc[k] * s.g[k] * s.i[k] * (1.0 - s.i[k]);
                dz[h_n + k] = dc[k] * c_prev[k] * s.f[k] * (1.0 - s.f[k]);
                dz[2 * h_n + k] = dc[k] * s.i[k] * (1.0 - s.g[k] * s.g[k]);
                dz[3 * h_n + k] = d_o * s.o[k] * (1.0 - s.o[k]);
                dc[k] *= s.f[k];
            }
            let x = &steps[t];
            let mut dh_prev = vec![0.0; h_n];
            for (r, &g) in dz.iter().enumerate() {
                if g == 0.0 {
                    continue;
                }
                grad.b[r] += g;
                let wx_row = &mut grad.wx[r * d..(r + 1) * d];
                for (w, &xv) in wx_row.iter_mut().zip(x) {
                    *w += g * xv;
                }
                let base = r * h_n;
                for k in 0..h_n {
                    grad.wh[base + k] += g * h_prev[k];
                    dh_prev[k] += self.wh[base + k] * g;
                }
            }
            dh = dh_prev;
        }
        loss
    }
}
