//! k-nearest neighbours by Euclidean distance.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub k: usize,
    pub n_classes: usize,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<usize>,
}

impl Knn {
    /// Vote counts of the `k` nearest rows; equal distances favour the lower
    /// row index.
    pub fn scores(&self, q: &[f64]) -> Vec<f64> {
        let mut d: Vec<(f64, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = vec![0.0; self.n_classes];
        for &(_, i) in d.iter().take(self.k.max(1)) {
            votes[self.y[i]] += 1.0;
        }
        votes
    }
}
