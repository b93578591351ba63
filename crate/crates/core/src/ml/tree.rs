//! CART trees: Gini splits for classification, squared-error splits for the
//! boosting regressors. Thresholds are midpoints between consecutive distinct
//! values; ties go to the lower feature index, then the lower threshold.

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    /// Class counts for classifiers, a single value for regressors.
    Leaf { value: Vec<f64> },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf(&self, x: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn predict_class(&self, x: &[f64]) -> usize {
        argmax(self.leaf(x))
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &Tree, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(t, *left).max(walk(t, *right)),
            }
        }
        walk(self, 0)
    }
}

/// First index of the maximum.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Copy, Debug)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_split: usize,
    /// Features drawn per split; `None` uses all of them.
    pub max_features: Option<usize>,
}

enum Target<'a> {
    Classes { y: &'a [usize], k: usize },
    Values { r: &'a [f64] },
}

impl Target<'_> {
    /// Node cost: n * gini for classes, SSE for values. Zero means pure.
    fn cost(&self, rows: &[usize]) -> f64 {
        match self {
            Target::Classes { y, k } => {
                let mut c = vec![0.0; *k];
                for &i in rows {
                    c[y[i]] += 1.0;
                }
                let n = rows.len() as f64;
                n - c.iter().map(|x| x * x).sum::<f64>() / n
            }
            Target::Values { r } => {
                let n = rows.len() as f64;
                let s: f64 = rows.iter().map(|&i| r[i]).sum();
                let s2: f64 = rows.iter().map(|&i| r[i] * r[i]).sum();
                (s2 - s * s / n).max(0.0)
            }
        }
    }

    fn pure(&self, rows: &[usize]) -> bool {
        match self {
            Target::Classes { y, .. } => rows.iter().all(|&i| y[i] == y[rows[0]]),
            Target::Values { r } => rows.iter().all(|&i| r[i] == r[rows[0]]),
        }
    }
}

/// Incremental sweep state for one sorted feature.
struct Sweep {
    left: Vec<f64>,
    right: Vec<f64>,
}

impl Sweep {
    fn new(target: &Target, rows: &[usize]) -> Self {
        let dim = match target {
            Target::Classes { k, .. } => *k,
            Target::Values { .. } => 3,
        };
        let mut s = Sweep {
            left: vec![0.0; dim],
            right: vec![0.0; dim],
        };
        for &i in rows {
            s.add(target, i, false);
        }
        s
    }

    fn add(&mut self, target: &Target, i: usize, left: bool) {
        let side = if left { &mut self.left } else { &mut self.right };
        match target {
            Target::Classes { y, .. } => side[y[i]] += 1.0,
            Target::Values { r } => {
                side[0] += 1.0;
                side[1] += r[i];
                side[2] += r[i] * r[i];
            }
        }
    }

    fn move_left(&mut self, target: &Target, i: usize) {
        self.add(target, i, true);
        match target {
            Target::Classes { y, .. } => self.right[y[i]] -= 1.0,
            Target::Values { r } => {
                self.right[0] -= 1.0;
                self.right[1] -= r[i];
                self.right[2] -= r[i] * r[i];
            }
        }
    }

    fn cost(&self, target: &Target) -> f64 {
        let side = |v: &[f64]| match target {
            Target::Classes { .. } => {
                let n: f64 = v.iter().sum();
                n - v.iter().map(|x| x * x).sum::<f64>() / n
            }
            Target::Values { .. } => (v[2] - v[1] * v[1] / v[0]).max(0.0),
        };
        side(&self.left) + side(&self.right)
    }
}

struct Grower<'a, R> {
    x: &'a [Vec<f64>],
    target: Target<'a>,
    params: TreeParams,
    rng: Option<&'a mut R>,
    leaf: &'a dyn Fn(&[usize]) -> Vec<f64>,
    nodes: Vec<Node>,
}

impl<R: Rng> Grower<'_, R> {
    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x.first().map_or(0, Vec::len);
        match (self.params.max_features, self.rng.as_deref_mut()) {
            (Some(m), Some(rng)) if m < d => {
                let mut f = rand::seq::index::sample(rng, d, m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&mut self, rows: &[usize]) -> Option<(usize, f64, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for f in self.candidate_features() {
            let x = self.x;
            let mut sorted = rows.to_vec();
            sorted.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]));
            let mut sweep = Sweep::new(&self.target, &sorted);
            for w in 1..sorted.len() {
                sweep.move_left(&self.target, sorted[w - 1]);
                let (lo, hi) = (x[sorted[w - 1]][f], x[sorted[w]][f]);
                if lo == hi {
                    continue;
                }
                let cost = sweep.cost(&self.target);
                if best.map_or(true, |b| cost < b.2) {
                    let mid = lo + (hi - lo) / 2.0;
                    best = Some((f, if mid < hi { mid } else { lo }, cost));
                }
            }
        }
        best
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            value: (self.leaf)(&rows),
        });
        let stop = self.params.max_depth.is_some_and(|d| depth >= d)
            || rows.len() < self.params.min_split.max(2)
            || self.target.pure(&rows);
        if stop {
            return id;
        }
        let Some((feature, threshold, cost)) = self.best_split(&rows) else {
            return id;
        };
        if let Target::Values { .. } = self.target {
            if self.target.cost(&rows) - cost <= 1e-12 {
                return id;
            }
        }
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| self.x[i][feature] <= threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

/// Gini tree over `rows` (duplicates allowed, as in a bootstrap sample).
pub fn grow_classifier<R: Rng>(
    x: &[Vec<f64>],
    y: &[usize],
    k: usize,
    rows: Vec<usize>,
    params: TreeParams,
    rng: Option<&mut R>,
) -> Tree {
    let counts = |rows: &[usize]| {
        let mut c = vec![0.0; k];
        for &i in rows {
            c[y[i]] += 1.0;
        }
        c
    };
    let mut g = Grower {
        x,
        target: Target::Classes { y, k },
        params,
        rng,
        leaf: &counts,
        nodes: Vec::new(),
    };
    g.grow(rows, 0);
    Tree { nodes: g.nodes }
}

/// Squared-error tree on `r`; leaf values come from `leaf`.
pub fn grow_regressor(
    x: &[Vec<f64>],
    r: &[f64],
    rows: Vec<usize>,
    params: TreeParams,
    leaf: &dyn Fn(&[usize]) -> f64,
) -> Tree {
    let wrap = |rows: &[usize]| vec![leaf(rows)];
    let mut g: Grower<rand_chacha::ChaCha8Rng> = Grower {
        x,
        target: Target::Values { r },
        params,
        rng: None,
        leaf: &wrap,
        nodes: Vec::new(),
    };
    g.grow(rows, 0);
    Tree { nodes: g.nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    const FULL: TreeParams = TreeParams {
        max_depth: None,
        min_split: 2,
        max_features: None,
    };

    #[test]
    fn midpoint_threshold() {
        let x = vec![vec![1.0], vec![2.0], vec![4.0], vec![6.0]];
        let y = vec![0, 0, 1, 1];
        let t = grow_classifier::<ChaCha8Rng>(&x, &y, 2, (0..4).collect(), FULL, None);
        assert_eq!(
            t.nodes[0],
            Node::Split {
                feature: 0,
                threshold: 3.0,
                left: 1,
                right: 2
            }
        );
        assert_eq!(t.depth(), 1);
    }

    #[test]
    fn xor_is_memorized() {
        let x = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]];
        let y = vec![0, 1, 1, 0];
        let t = grow_classifier::<ChaCha8Rng>(&x, &y, 2, (0..4).collect(), FULL, None);
        for (xi, yi) in x.iter().zip(&y) {
            assert_eq!(t.predict_class(xi), *yi);
        }
    }

    #[test]
    fn depth_cap() {
        let x: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64]).collect();
        let y: Vec<usize> = (0..16).map(|i| i % 2).collect();
        let p = TreeParams {
            max_depth: Some(2),
            ..FULL
        };
        let t = grow_classifier::<ChaCha8Rng>(&x, &y, 2, (0..16).collect(), p, None);
        assert_eq!(t.depth(), 2);
    }

    #[test]
    fn regressor_means() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let r = vec![1.0, 1.0, 5.0, 5.0];
        let mean = |rows: &[usize]| rows.iter().map(|&i| r[i]).sum::<f64>() / rows.len() as f64;
        let t = grow_regressor(&x, &r, (0..4).collect(), FULL, &mean);
        assert_eq!(t.leaf(&[0.5]), &[1.0]);
        assert_eq!(t.leaf(&[2.5]), &[5.0]);
        assert_eq!(t.nodes.len(), 3);
    }
}
