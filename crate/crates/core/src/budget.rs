//! Per-instance solve-time allocation.
//!
//! Each of the four size characteristics (jobs, machines, window level,
//! speeds) contributes `min * (max / min)^r` milliseconds, where `r` in
//! `[0, 1]` is the value's rank position inside its grid set. With the
//! default 50 ms / 75 000 ms anchors the four terms sum to at most 300 000 ms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::GeneratorConfig;
use crate::instance::{Instance, RdddLevel};

/// The size characteristics the budget depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Characteristics {
    pub n_jobs: usize,
    pub n_machines: usize,
    pub rddd_level: RdddLevel,
    pub n_speeds: usize,
}

impl From<&Instance> for Characteristics {
    fn from(i: &Instance) -> Self {
        Characteristics {
            n_jobs: i.n_jobs,
            n_machines: i.n_machines,
            rddd_level: i.rddd_level,
            n_speeds: i.n_speeds,
        }
    }
}

impl From<&GeneratorConfig> for Characteristics {
    fn from(c: &GeneratorConfig) -> Self {
        Characteristics {
            n_jobs: c.n_jobs,
            n_machines: c.n_machines,
            rddd_level: c.rddd_level,
            n_speeds: c.n_speeds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetPolicy {
    pub per_char_min_ms: f64,
    pub per_char_max_ms: f64,
    pub total_cap_ms: u64,
    pub jobs: Vec<usize>,
    pub machines: Vec<usize>,
    pub rddd: Vec<usize>,
    pub speeds: Vec<usize>,
}

impl Default for BudgetPolicy {
    fn default() -> Self {
        BudgetPolicy {
            per_char_min_ms: 50.0,
            per_char_max_ms: 75_000.0,
            total_cap_ms: 300_000,
            jobs: vec![5, 10, 20, 25, 50, 100],
            machines: vec![5, 10, 20, 25, 50, 100],
            rddd: vec![0, 1, 2],
            speeds: vec![1, 3, 5],
        }
    }
}

impl BudgetPolicy {
    /// Rank fraction of `value` in `set`. Values outside the set take the rank
    /// of the nearest member (the lower one on ties) unless `strict`.
    pub fn rank(set: &[usize], value: usize, characteristic: &'static str, strict: bool) -> Result<f64> {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() <= 1 {
            return if strict && sorted.first() != Some(&value) {
                Err(Error::UnknownCharacteristicValue { characteristic, value })
            } else {
                Ok(0.0)
            };
        }
        let idx = match sorted.binary_search(&value) {
            Ok(i) => i,
            Err(_) if strict => return Err(Error::UnknownCharacteristicValue { characteristic, value }),
            Err(0) => 0,
            Err(i) if i == sorted.len() => sorted.len() - 1,
            Err(i) => {
                if value - sorted[i - 1] <= sorted[i] - value {
                    i - 1
                } else {
                    i
                }
            }
        };
        Ok(idx as f64 / (sorted.len() - 1) as f64)
    }

    /// Contribution of one characteristic at rank fraction `r`.
    pub fn term(&self, r: f64) -> f64 {
        self.per_char_min_ms * (self.per_char_max_ms / self.per_char_min_ms).powf(r)
    }

    pub fn terms(&self, c: &Characteristics, strict: bool) -> Result<[f64; 4]> {
        Ok([
            self.term(Self::rank(&self.jobs, c.n_jobs, "jobs", strict)?),
            self.term(Self::rank(&self.machines, c.n_machines, "machines", strict)?),
            self.term(Self::rank(&self.rddd, c.rddd_level.as_u8() as usize, "rddd", strict)?),
            self.term(Self::rank(&self.speeds, c.n_speeds, "speeds", strict)?),
        ])
    }

    pub fn allocate(&self, c: &Characteristics, strict: bool) -> Result<u64> {
        let total: f64 = self.terms(c, strict)?.iter().sum();
        Ok((total.round() as u64).min(self.total_cap_ms))
    }
}

/// Budget in milliseconds under the default policy, clamping off-grid values.
pub fn allocate_budget(c: &Characteristics) -> u64 {
    BudgetPolicy::default()
        .allocate(c, false)
        .expect("lenient allocation cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(j: usize, m: usize, r: RdddLevel, s: usize) -> Characteristics {
        Characteristics {
            n_jobs: j,
            n_machines: m,
            rddd_level: r,
            n_speeds: s,
        }
    }

    #[test]
    fn anchors() {
        let p = BudgetPolicy::default();
        let t = p.terms(&ch(50, 10, RdddLevel::None, 1), true).unwrap();
        assert_eq!(t[2], 50.0);
        let t = p.terms(&ch(50, 10, RdddLevel::OpLevel, 1), true).unwrap();
        assert!((t[2] - 75_000.0).abs() < 1e-9);
        assert_eq!(allocate_budget(&ch(100, 100, RdddLevel::OpLevel, 5)), 300_000);
        assert_eq!(allocate_budget(&ch(5, 5, RdddLevel::None, 1)), 200);
    }

    #[test]
    fn job_level_windows_interpolate_geometrically() {
        let p = BudgetPolicy::default();
        let t = p.terms(&ch(5, 5, RdddLevel::JobLevel, 1), true).unwrap();
        assert!((t[2] - (50.0f64 * 75_000.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn off_grid_values() {
        let p = BudgetPolicy::default();
        assert!(matches!(
            p.allocate(&ch(3, 5, RdddLevel::None, 1), true),
            Err(Error::UnknownCharacteristicValue {
                characteristic: "jobs",
                value: 3
            })
        ));
        assert_eq!(BudgetPolicy::rank(&p.jobs, 3, "jobs", false).unwrap(), 0.0);
        assert_eq!(BudgetPolicy::rank(&p.jobs, 8, "jobs", false).unwrap(), 0.2);
        assert_eq!(BudgetPolicy::rank(&p.jobs, 7, "jobs", false).unwrap(), 0.0);
        assert_eq!(BudgetPolicy::rank(&p.jobs, 500, "jobs", false).unwrap(), 1.0);
        assert_eq!(BudgetPolicy::rank(&[4], 4, "jobs", true).unwrap(), 0.0);
    }
}
