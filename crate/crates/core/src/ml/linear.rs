//! Multinomial logistic regression by full-batch gradient descent.

use serde::{Deserialize, Serialize};

/// Numerically stable in-place softmax.
pub fn softmax(z: &mut [f64]) {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for v in z.iter_mut() {
        *v = (*v - m).exp();
        s += *v;
    }
    z.iter_mut().for_each(|v| *v /= s);
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    /// One weight row per class.
    pub w: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl Logistic {
    pub fn zeros(k: usize, d: usize) -> Self {
        Logistic {
            w: vec![vec![0.0; d]; k],
            b: vec![0.0; k],
        }
    }

    pub fn fit(x: &[Vec<f64>], y: &[usize], k: usize, l2: f64, lr: f64, epochs: usize) -> Self {
        let d = x.first().map_or(0, Vec::len);
        let n = x.len() as f64;
        let mut m = Logistic::zeros(k, d);
        let mut gw = vec![vec![0.0; d]; k];
        let mut gb = vec![0.0; k];
        for _ in 0..epochs {
            gw.iter_mut().for_each(|r| r.fill(0.0));
            gb.fill(0.0);
            for (xi, &yi) in x.iter().zip(y) {
                let mut p = m.scores(xi);
                softmax(&mut p);
                p[yi] -= 1.0;
                for c in 0..k {
                    gb[c] += p[c];
                    for (g, v) in gw[c].iter_mut().zip(xi) {
                        *g += p[c] * v;
                    }
                }
            }
            for c in 0..k {
                m.b[c] -= lr * gb[c] / n;
                for (w, g) in m.w[c].iter_mut().zip(&gw[c]) {
                    *w -= lr * (g / n + l2 * *w);
                }
            }
        }
        m
    }

    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.w
            .iter()
            .zip(&self.b)
            .map(|(w, b)| b + w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>())
            .collect()
    }
}
