//! One-hidden-layer ReLU network with a softmax output, trained by
//! full-batch gradient descent on mean cross-entropy.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ml::linear::softmax;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    /// `hidden x inputs`
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    /// `classes x hidden`
    pub w2: Vec<Vec<f64>>,
    pub b2: Vec<f64>,
}

fn uniform_rows<R: Rng>(rows: usize, fan_in: usize, rng: &mut R) -> (Vec<Vec<f64>>, Vec<f64>) {
    let a = 1.0 / (fan_in.max(1) as f64).sqrt();
    let w = (0..rows)
        .map(|_| (0..fan_in).map(|_| rng.gen_range(-a..=a)).collect())
        .collect();
    let b = (0..rows).map(|_| rng.gen_range(-a..=a)).collect();
    (w, b)
}

fn affine(w: &[Vec<f64>], b: &[f64], x: &[f64]) -> Vec<f64> {
    w.iter()
        .zip(b)
        .map(|(r, b)| b + r.iter().zip(x).map(|(a, v)| a * v).sum::<f64>())
        .collect()
}

impl Mlp {
    pub fn init<R: Rng>(d: usize, hidden: usize, k: usize, rng: &mut R) -> Self {
        let (w1, b1) = uniform_rows(hidden, d, rng);
        let (w2, b2) = uniform_rows(k, hidden, rng);
        Mlp { w1, b1, w2, b2 }
    }

    fn zeros_like(&self) -> Self {
        Mlp {
            w1: self.w1.iter().map(|r| vec![0.0; r.len()]).collect(),
            b1: vec![0.0; self.b1.len()],
            w2: self.w2.iter().map(|r| vec![0.0; r.len()]).collect(),
            b2: vec![0.0; self.b2.len()],
        }
    }

    /// Hidden activations and class probabilities.
    fn forward(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut h = affine(&self.w1, &self.b1, x);
        h.iter_mut().for_each(|v| *v = v.max(0.0));
        let mut p = affine(&self.w2, &self.b2, &h);
        softmax(&mut p);
        (h, p)
    }

    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.forward(x).1
    }

    pub fn loss(&self, x: &[Vec<f64>], y: &[usize]) -> f64 {
        let total: f64 = x
            .iter()
            .zip(y)
            .map(|(xi, &yi)| -self.forward(xi).1[yi].max(1e-300).ln())
            .sum();
        total / x.len() as f64
    }

    /// Gradient of `loss`, shaped like the network.
    pub fn gradient(&self, x: &[Vec<f64>], y: &[usize]) -> Mlp {
        let mut g = self.zeros_like();
        let n = x.len() as f64;
        for (xi, &yi) in x.iter().zip(y) {
            let (h, mut p) = self.forward(xi);
            p[yi] -= 1.0;
            let mut dh = vec![0.0; h.len()];
            for (c, pc) in p.iter().enumerate() {
                g.b2[c] += pc / n;
                for (j, hj) in h.iter().enumerate() {
                    g.w2[c][j] += pc * hj / n;
                    dh[j] += pc * self.w2[c][j];
                }
            }
            for (j, hj) in h.iter().enumerate() {
                if *hj <= 0.0 {
                    continue;
                }
                g.b1[j] += dh[j] / n;
                for (gw, v) in g.w1[j].iter_mut().zip(xi) {
                    *gw += dh[j] * v / n;
                }
            }
        }
        g
    }

    /// All parameters in a fixed order.
    pub fn params(&self) -> Vec<f64> {
        let mut v = Vec::new();
        self.w1.iter().for_each(|r| v.extend_from_slice(r));
        v.extend_from_slice(&self.b1);
        self.w2.iter().for_each(|r| v.extend_from_slice(r));
        v.extend_from_slice(&self.b2);
        v
    }

    pub fn set_params(&mut self, v: &[f64]) {
        let mut it = v.iter().copied();
        let mut fill = |s: &mut [f64]| s.iter_mut().for_each(|x| *x = it.next().expect("parameter count"));
        self.w1.iter_mut().for_each(|r| fill(r));
        fill(&mut self.b1);
        self.w2.iter_mut().for_each(|r| fill(r));
        fill(&mut self.b2);
    }

    pub fn fit<R: Rng>(
        x: &[Vec<f64>],
        y: &[usize],
        k: usize,
        hidden: usize,
        lr: f64,
        epochs: usize,
        rng: &mut R,
    ) -> Self {
        let d = x.first().map_or(0, Vec::len);
        let mut m = Mlp::init(d, hidden, k, rng);
        for _ in 0..epochs {
            let g = m.gradient(x, y);
            let step: Vec<f64> = m.params().iter().zip(g.params()).map(|(p, g)| p - lr * g).collect();
            m.set_params(&step);
        }
        m
    }
}
