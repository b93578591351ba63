//! Multiclass gradient boosting: softmax cross-entropy, one squared-error
//! regression tree per class per round, Newton-step leaf values.

use serde::{Deserialize, Serialize};

use crate::ml::linear::softmax;
use crate::ml::tree::{grow_regressor, Tree, TreeParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Boosted {
    /// Log class priors.
    pub init: Vec<f64>,
    pub learning_rate: f64,
    /// `rounds x classes`
    pub trees: Vec<Vec<Tree>>,
}

impl Boosted {
    pub fn fit(x: &[Vec<f64>], y: &[usize], k: usize, rounds: usize, depth: usize, lr: f64) -> Self {
        let n = x.len();
        let mut count = vec![0.0; k];
        y.iter().for_each(|&c| count[c] += 1.0);
        // Absent classes get a large negative prior instead of -inf.
        let init: Vec<f64> = count
            .iter()
            .map(|c| if *c > 0.0 { (c / n as f64).ln() } else { -30.0 })
            .collect();
        let mut f: Vec<Vec<f64>> = vec![init.clone(); n];
        let params = TreeParams {
            max_depth: Some(depth),
            min_split: 2,
            max_features: None,
        };
        let scale = (k as f64 - 1.0) / k as f64;
        let mut trees = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            let p: Vec<Vec<f64>> = f
                .iter()
                .map(|z| {
                    let mut z = z.clone();
                    softmax(&mut z);
                    z
                })
                .collect();
            let mut round = Vec::with_capacity(k);
            for c in 0..k {
                let r: Vec<f64> = (0..n).map(|i| f64::from(u8::from(y[i] == c)) - p[i][c]).collect();
                let leaf = |rows: &[usize]| {
                    let num: f64 = rows.iter().map(|&i| r[i]).sum();
                    let den: f64 = rows.iter().map(|&i| r[i].abs() * (1.0 - r[i].abs())).sum();
                    if den.abs() < 1e-12 {
                        0.0
                    } else {
                        scale * num / den
                    }
                };
                let t = grow_regressor(x, &r, (0..n).collect(), params, &leaf);
                for (i, fi) in f.iter_mut().enumerate() {
                    fi[c] += lr * t.leaf(&x[i])[0];
                }
                round.push(t);
            }
            trees.push(round);
        }
        Boosted {
            init,
            learning_rate: lr,
            trees,
        }
    }

    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        let mut z = self.init.clone();
        for round in &self.trees {
            for (c, t) in round.iter().enumerate() {
                z[c] += self.learning_rate * t.leaf(x)[0];
            }
        }
        z
    }
}
