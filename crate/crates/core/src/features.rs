//! Instance features used by the solver selector.
//!
//! Seventeen values per instance: the four size characteristics, processing
//! time and energy statistics over every `(job, task, speed)` entry, the
//! serial/parallel makespan and energy bounds, and three window features that
//! take the sentinel `-1` when the instance has no time windows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{validate_instance, Instance, RdddLevel, Window, Windows};
use crate::objective::objective_bounds;

pub const N_FEATURES: usize = 17;

/// Column names in feature-vector order.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "n_jobs",
    "n_machines",
    "rddd",
    "n_speeds",
    "p_max",
    "p_mean",
    "p_min",
    "e_max",
    "e_mean",
    "e_min",
    "mk_ub",
    "mk_lb",
    "en_ub",
    "en_lb",
    "tt_ub",
    "time_window",
    "overlap",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub n_jobs: usize,
    pub n_machines: usize,
    pub rddd_level: u8,
    pub n_speeds: usize,
    pub p_max: f64,
    pub p_mean: f64,
    pub p_min: f64,
    pub e_max: f64,
    pub e_mean: f64,
    pub e_min: f64,
    pub mk_ub: i64,
    pub mk_lb: i64,
    pub en_ub: i64,
    pub en_lb: i64,
    pub tt_ub: i64,
    pub time_window: f64,
    pub overlap: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; N_FEATURES] {
        [
            self.n_jobs as f64,
            self.n_machines as f64,
            self.rddd_level as f64,
            self.n_speeds as f64,
            self.p_max,
            self.p_mean,
            self.p_min,
            self.e_max,
            self.e_mean,
            self.e_min,
            self.mk_ub as f64,
            self.mk_lb as f64,
            self.en_ub as f64,
            self.en_lb as f64,
            self.tt_ub as f64,
            self.time_window,
            self.overlap,
        ]
    }

    /// Inverse of [`FeatureVector::to_array`]; integer columns are rounded.
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() != N_FEATURES {
            return Err(Error::DimensionMismatch {
                expected: N_FEATURES,
                actual: v.len(),
            });
        }
        Ok(FeatureVector {
            n_jobs: v[0].round() as usize,
            n_machines: v[1].round() as usize,
            rddd_level: v[2].round() as u8,
            n_speeds: v[3].round() as usize,
            p_max: v[4],
            p_mean: v[5],
            p_min: v[6],
            e_max: v[7],
            e_mean: v[8],
            e_min: v[9],
            mk_ub: v[10].round() as i64,
            mk_lb: v[11].round() as i64,
            en_ub: v[12].round() as i64,
            en_lb: v[13].round() as i64,
            tt_ub: v[14].round() as i64,
            time_window: v[15],
            overlap: v[16],
        })
    }
}

fn ensure_valid(inst: &Instance) -> Result<()> {
    let v = validate_instance(inst);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidInstance(v))
    }
}

fn stats<'a>(values: impl Iterator<Item = &'a i64>) -> (f64, f64, f64) {
    let (mut max, mut min, mut sum, mut n) = (i64::MIN, i64::MAX, 0i64, 0usize);
    for &v in values {
        max = max.max(v);
        min = min.min(v);
        sum += v;
        n += 1;
    }
    (max as f64, sum as f64 / n as f64, min as f64)
}

pub fn extract_features(inst: &Instance) -> Result<FeatureVector> {
    ensure_valid(inst)?;
    let flat = |t: &Vec<Vec<Vec<i64>>>| t.iter().flatten().flatten().copied().collect::<Vec<_>>();
    let (p_max, p_mean, p_min) = stats(flat(&inst.proc).iter());
    let (e_max, e_mean, e_min) = stats(flat(&inst.energy).iter());
    let b = objective_bounds(inst);
    Ok(FeatureVector {
        n_jobs: inst.n_jobs,
        n_machines: inst.n_machines,
        rddd_level: inst.rddd_level.as_u8(),
        n_speeds: inst.n_speeds,
        p_max,
        p_mean,
        p_min,
        e_max,
        e_mean,
        e_min,
        mk_ub: b.mk_ub,
        mk_lb: b.mk_lb,
        en_ub: b.en_ub,
        en_lb: b.en_lb,
        tt_ub: if inst.rddd_level == RdddLevel::None {
            -1
        } else {
            b.mk_ub
        },
        time_window: time_window_unchecked(inst),
        overlap: overlap_unchecked(inst),
    })
}

/// How many times the job (rddd 1) or task (rddd 2) fits in its window at
/// the slowest speed, averaged; `-1` without windows.
pub fn time_window_feature(inst: &Instance) -> Result<f64> {
    ensure_valid(inst)?;
    Ok(time_window_unchecked(inst))
}

fn time_window_unchecked(inst: &Instance) -> f64 {
    match &inst.windows {
        Windows::None => -1.0,
        Windows::Job(w) => {
            let total: f64 = w
                .iter()
                .enumerate()
                .map(|(j, win)| {
                    let work: i64 = (0..inst.n_machines).map(|t| inst.p(j, t, 0)).sum();
                    win.len() as f64 / work as f64
                })
                .sum();
            total / inst.n_jobs as f64
        }
        Windows::Task(w) => {
            let mut total = 0.0;
            for (j, row) in w.iter().enumerate() {
                for (t, win) in row.iter().enumerate() {
                    total += win.len() as f64 / inst.p(j, t, 0) as f64;
                }
            }
            total / (inst.n_jobs * inst.n_machines) as f64
        }
    }
}

/// Share of `a`'s window covered by `b`'s window.
fn covered(a: &Window, b: &Window) -> f64 {
    let inter = (a.due.min(b.due) - a.release.max(b.release)).max(0);
    inter as f64 / a.len() as f64
}

/// Mean pairwise window overlap over ordered job pairs (per machine at
/// rddd 2, pairing the two jobs' tasks on that machine); `-1` without windows
/// and `0` for a single job.
pub fn overlap_feature(inst: &Instance) -> Result<f64> {
    ensure_valid(inst)?;
    Ok(overlap_unchecked(inst))
}

fn overlap_unchecked(inst: &Instance) -> f64 {
    let nj = inst.n_jobs;
    if matches!(inst.windows, Windows::None) {
        return -1.0;
    }
    if nj < 2 {
        return 0.0;
    }
    let pairs = (nj * (nj - 1)) as f64;
    match &inst.windows {
        Windows::None => unreachable!(),
        Windows::Job(w) => {
            let mut total = 0.0;
            for a in 0..nj {
                for b in 0..nj {
                    if a != b {
                        total += covered(&w[a], &w[b]);
                    }
                }
            }
            total / pairs
        }
        Windows::Task(w) => {
            let pos = inst.route_positions();
            let mut total = 0.0;
            for a in 0..nj {
                for b in 0..nj {
                    if a == b {
                        continue;
                    }
                    for m in 0..inst.n_machines {
                        total += covered(&w[a][pos[a][m]], &w[b][pos[b][m]]);
                    }
                }
            }
            total / (pairs * inst.n_machines as f64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::instance;

    #[test]
    fn single_entry_instance() {
        let i = instance(vec![vec![0]], vec![vec![vec![7]]], vec![vec![vec![3]]]);
        let f = extract_features(&i).unwrap();
        assert_eq!(
            f.to_array(),
            [1.0, 1.0, 0.0, 1.0, 7.0, 7.0, 7.0, 3.0, 3.0, 3.0, 7.0, 7.0, 3.0, 3.0, -1.0, -1.0, -1.0]
        );
    }

    fn windowed(windows: Vec<Window>) -> Instance {
        let n = windows.len();
        let mut i = instance(vec![vec![0]; n], vec![vec![vec![4]]; n], vec![vec![vec![1]]; n]);
        i.rddd_level = RdddLevel::JobLevel;
        i.windows = Windows::Job(windows);
        i
    }

    #[test]
    fn exact_fit_window_is_one() {
        let i = windowed(vec![Window::new(2, 6)]);
        assert_eq!(time_window_feature(&i).unwrap(), 1.0);
        assert_eq!(overlap_feature(&i).unwrap(), 0.0);
        assert_eq!(extract_features(&i).unwrap().tt_ub, 4);
    }

    #[test]
    fn identical_and_disjoint_windows() {
        assert_eq!(
            overlap_feature(&windowed(vec![Window::new(0, 8), Window::new(0, 8)])).unwrap(),
            1.0
        );
        assert_eq!(
            overlap_feature(&windowed(vec![Window::new(0, 4), Window::new(4, 8)])).unwrap(),
            0.0
        );
    }

    #[test]
    fn ordered_pairs_differ_from_unordered_average() {
        // Window a = [0, 4), b = [0, 8). a is fully covered by b (1.0); b is
        // half covered by a (0.5). Ordered mean 0.75; normalizing the
        // intersection by the union-free mean length would give 4/6.
        let i = windowed(vec![Window::new(0, 4), Window::new(0, 8)]);
        let v = overlap_feature(&i).unwrap();
        assert!((v - 0.75).abs() < 1e-12);
        assert!((v - 4.0 / 6.0).abs() > 1e-3);
    }

    #[test]
    fn invalid_instance_rejected() {
        let mut i = instance(vec![vec![0]], vec![vec![vec![7]]], vec![vec![vec![3]]]);
        i.routes[0] = vec![1];
        assert!(matches!(extract_features(&i), Err(Error::InvalidInstance(_))));
    }
}
