//! Gaussian naive Bayes.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub log_prior: Vec<f64>,
    pub mean: Vec<Vec<f64>>,
    pub var: Vec<Vec<f64>>,
}

impl GaussianNb {
    /// `smoothing` is multiplied by the largest column variance and added to
    /// every per-class variance.
    pub fn fit(x: &[Vec<f64>], y: &[usize], k: usize, smoothing: f64) -> Self {
        let d = x.first().map_or(0, Vec::len);
        let n = x.len() as f64;
        let mut count = vec![0.0; k];
        let mut mean = vec![vec![0.0; d]; k];
        for (xi, &c) in x.iter().zip(y) {
            count[c] += 1.0;
            for (m, v) in mean[c].iter_mut().zip(xi) {
                *m += v;
            }
        }
        for c in 0..k {
            if count[c] > 0.0 {
                mean[c].iter_mut().for_each(|m| *m /= count[c]);
            }
        }
        let mut var = vec![vec![0.0; d]; k];
        for (xi, &c) in x.iter().zip(y) {
            for ((s, v), m) in var[c].iter_mut().zip(xi).zip(&mean[c]) {
                *s += (v - m) * (v - m);
            }
        }
        let max_col_var = (0..d)
            .map(|f| {
                let mu = x.iter().map(|r| r[f]).sum::<f64>() / n;
                x.iter().map(|r| (r[f] - mu) * (r[f] - mu)).sum::<f64>() / n
            })
            .fold(0.0, f64::max);
        let eps = if max_col_var > 0.0 {
            smoothing * max_col_var
        } else {
            smoothing
        };
        for c in 0..k {
            for s in var[c].iter_mut() {
                *s = if count[c] > 0.0 { *s / count[c] } else { 0.0 } + eps;
            }
        }
        GaussianNb {
            log_prior: count.iter().map(|c| (c / n).ln()).collect(),
            mean,
            var,
        }
    }

    /// Unnormalized log posteriors.
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.log_prior
            .iter()
            .zip(self.mean.iter().zip(&self.var))
            .map(|(lp, (mu, var))| {
                lp + x
                    .iter()
                    .zip(mu.iter().zip(var))
                    .map(|(v, (m, s))| -0.5 * (2.0 * std::f64::consts::PI * s).ln() - (v - m) * (v - m) / (2.0 * s))
                    .sum::<f64>()
            })
            .collect()
    }
}
