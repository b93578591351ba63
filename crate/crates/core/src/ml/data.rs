//! Feature matrices, z-score standardization and stratified splits.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::stream;
use crate::harness::DatasetRow;
use crate::solver::SolverId;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabeledDataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<SolverId>,
}

impl LabeledDataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<SolverId>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                actual: y.len(),
            });
        }
        Ok(LabeledDataset { x, y })
    }

    pub fn from_rows(rows: &[DatasetRow]) -> Self {
        LabeledDataset {
            x: rows.iter().map(|r| r.features.to_array().to_vec()).collect(),
            y: rows.iter().map(|r| r.label).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    pub fn subset(&self, idx: &[usize]) -> LabeledDataset {
        LabeledDataset {
            x: idx.iter().map(|&i| self.x[i].clone()).collect(),
            y: idx.iter().map(|&i| self.y[i]).collect(),
        }
    }

    /// Distinct labels in portfolio order.
    pub fn labels(&self) -> Vec<SolverId> {
        SolverId::ALL.into_iter().filter(|s| self.y.contains(s)).collect()
    }

    pub fn class_counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for s in &self.y {
            c[s.index()] += 1;
        }
        c
    }

    /// Rows of each label, in row order.
    fn by_class(&self) -> Vec<(SolverId, Vec<usize>)> {
        self.labels()
            .into_iter()
            .map(|s| (s, (0..self.len()).filter(|&i| self.y[i] == s).collect()))
            .collect()
    }

    /// Checks the shape and finiteness preconditions of training.
    pub fn check_trainable(&self) -> Result<()> {
        let d = self.n_features();
        for (row, x) in self.x.iter().enumerate() {
            if x.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: x.len(),
                });
            }
            if let Some(column) = x.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteFeature { row, column });
            }
        }
        if self.labels().len() < 2 {
            return Err(Error::SingleClass);
        }
        Ok(())
    }
}

/// Column-wise z-scores with population standard deviations. Constant
/// columns map to 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[Vec<f64>]) -> Self {
        let d = x.first().map_or(0, Vec::len);
        let n = x.len().max(1) as f64;
        let mut mean = vec![0.0; d];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut std = vec![0.0; d];
        for row in x {
            for ((s, v), m) in std.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        std.iter_mut().for_each(|s| *s = (*s / n).sqrt());
        Standardizer { mean, std }
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| if *s > 0.0 { (v - m) / s } else { 0.0 })
            .collect()
    }

    pub fn transform(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        x.iter().map(|r| self.transform_row(r)).collect()
    }
}

const SPLIT_STREAM: u64 = 21;
const FOLD_STREAM: u64 = 22;

/// Seeded per-class shuffle of row indices.
fn shuffled_classes(ds: &LabeledDataset, seed: u64, stream_id: u64) -> Vec<(SolverId, Vec<usize>)> {
    let mut rng = stream(seed, stream_id);
    let mut classes = ds.by_class();
    for (_, rows) in classes.iter_mut() {
        rows.shuffle(&mut rng);
    }
    classes
}

/// Train/test row indices (ascending). Each class sends
/// `round(count * test_fraction)` rows, clamped to `[1, count - 1]`, to test.
pub fn stratified_split(ds: &LabeledDataset, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::Config(format!("test fraction {test_fraction} outside [0, 1)")));
    }
    let classes = shuffled_classes(ds, seed, SPLIT_STREAM);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (label, rows) in classes {
        if rows.len() < 2 {
            return Err(Error::ClassTooSmall {
                label: label.tag().into(),
                count: rows.len(),
                required: 2,
            });
        }
        let n_test = ((rows.len() as f64 * test_fraction).round() as usize).clamp(1, rows.len() - 1);
        test.extend_from_slice(&rows[..n_test]);
        train.extend_from_slice(&rows[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// `k` (train, validation) index pairs. Rows are dealt round-robin within
/// each class with one counter running across classes, so fold sizes differ
/// by at most one overall and per class.
pub fn kfold(ds: &LabeledDataset, k: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if k < 2 {
        return Err(Error::Config(format!("k = {k}, need at least 2 folds")));
    }
    let classes = shuffled_classes(ds, seed, FOLD_STREAM);
    let mut folds = vec![Vec::new(); k];
    let mut counter = 0;
    for (label, rows) in classes {
        if rows.len() < k {
            return Err(Error::ClassTooSmall {
                label: label.tag().into(),
                count: rows.len(),
                required: k,
            });
        }
        for r in rows {
            folds[counter % k].push(r);
            counter += 1;
        }
    }
    Ok((0..k)
        .map(|f| {
            let mut val = folds[f].clone();
            val.sort_unstable();
            let mut train: Vec<usize> = (0..k)
                .filter(|&g| g != f)
                .flat_map(|g| folds[g].iter().copied())
                .collect();
            train.sort_unstable();
            (train, val)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(counts: [usize; 3]) -> LabeledDataset {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (c, &n) in counts.iter().enumerate() {
            for i in 0..n {
                x.push(vec![c as f64, i as f64]);
                y.push(SolverId::ALL[c]);
            }
        }
        LabeledDataset { x, y }
    }

    #[test]
    fn split_one_of_each() {
        let ds = toy([5, 5, 0]);
        let (train, test) = stratified_split(&ds, 0.2, 1).unwrap();
        assert_eq!(test.len(), 2);
        assert_eq!(train.len(), 8);
        assert_eq!(ds.subset(&test).class_counts(), [1, 1, 0]);
    }

    #[test]
    fn split_needs_two_per_class() {
        assert!(matches!(
            stratified_split(&toy([5, 1, 0]), 0.2, 1),
            Err(Error::ClassTooSmall { count: 1, .. })
        ));
    }

    #[test]
    fn folds_of_two() {
        let ds = toy([5, 5, 0]);
        let folds = kfold(&ds, 5, 3).unwrap();
        let mut seen = vec![0; 10];
        for (train, val) in &folds {
            assert_eq!(val.len(), 2);
            assert_eq!(train.len() + val.len(), 10);
            for &v in val {
                seen[v] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
        assert!(matches!(kfold(&toy([5, 4, 0]), 5, 0), Err(Error::ClassTooSmall { .. })));
    }

    #[test]
    fn standardizer_moments() {
        let x = vec![vec![1.0, 5.0], vec![3.0, 5.0], vec![8.0, 5.0]];
        let s = Standardizer::fit(&x);
        let z = s.transform(&x);
        let mean: f64 = z.iter().map(|r| r[0]).sum::<f64>() / 3.0;
        let var: f64 = z.iter().map(|r| r[0] * r[0]).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-12);
        assert!(z.iter().all(|r| r[1] == 0.0));
    }
}
