//! Makespan, energy and tardiness of a schedule, and their normalized sum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Time};
use crate::schedule::{check_feasibility, Schedule};

/// Serial upper and perfectly-parallel lower bounds for makespan and energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveBounds {
    pub mk_ub: Time,
    pub mk_lb: Time,
    pub en_ub: i64,
    pub en_lb: i64,
}

/// The three raw objective components. Ordered lexicographically
/// (makespan, energy, tardiness), which is the tie-break order used by the
/// solvers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Components {
    pub makespan: Time,
    pub energy: i64,
    pub tardiness: Time,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    pub makespan: Time,
    pub energy: i64,
    pub tardiness: Time,
    pub scalarized: f64,
    pub bounds: ObjectiveBounds,
}

impl ObjectiveBreakdown {
    pub fn components(&self) -> Components {
        Components {
            makespan: self.makespan,
            energy: self.energy,
            tardiness: self.tardiness,
        }
    }
}

pub fn objective_bounds(inst: &Instance) -> ObjectiveBounds {
    let (nj, nm) = (inst.n_jobs, inst.n_machines);
    let mut b = ObjectiveBounds {
        mk_ub: 0,
        mk_lb: 0,
        en_ub: 0,
        en_lb: 0,
    };
    for j in 0..nj {
        let mut job_min = 0;
        for t in 0..nm {
            b.mk_ub += inst.max_p(j, t);
            job_min += inst.min_p(j, t);
            b.en_ub += inst.max_e(j, t);
            b.en_lb += inst.min_e(j, t);
        }
        b.mk_lb = b.mk_lb.max(job_min);
    }
    b
}

/// Maps raw components onto the normalized scalar objective. A term whose
/// bound range is empty contributes 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normalizer {
    pub bounds: ObjectiveBounds,
}

impl Normalizer {
    pub fn new(bounds: ObjectiveBounds) -> Self {
        Normalizer { bounds }
    }

    pub fn for_instance(inst: &Instance) -> Self {
        Normalizer::new(objective_bounds(inst))
    }

    #[inline]
    pub fn makespan_term(&self, makespan: Time) -> f64 {
        let den = self.bounds.mk_ub - self.bounds.mk_lb;
        if den == 0 {
            0.0
        } else {
            (makespan - self.bounds.mk_lb) as f64 / den as f64
        }
    }

    #[inline]
    pub fn energy_term(&self, energy: i64) -> f64 {
        let den = self.bounds.en_ub - self.bounds.en_lb;
        if den == 0 {
            0.0
        } else {
            (energy - self.bounds.en_lb) as f64 / den as f64
        }
    }

    #[inline]
    pub fn tardiness_term(&self, tardiness: Time) -> f64 {
        if self.bounds.mk_ub == 0 {
            0.0
        } else {
            tardiness as f64 / self.bounds.mk_ub as f64
        }
    }

    #[inline]
    pub fn scalarize(&self, c: Components) -> f64 {
        self.makespan_term(c.makespan) + self.energy_term(c.energy) + self.tardiness_term(c.tardiness)
    }

    pub fn breakdown(&self, c: Components) -> ObjectiveBreakdown {
        ObjectiveBreakdown {
            makespan: c.makespan,
            energy: c.energy,
            tardiness: c.tardiness,
            scalarized: self.scalarize(c),
            bounds: self.bounds,
        }
    }
}

/// Components of a schedule known to be feasible (solver-internal fast path).
pub(crate) fn components_unchecked(inst: &Instance, start: &[Vec<Time>], speed: &[Vec<usize>]) -> Components {
    let mut c = Components::default();
    for j in 0..inst.n_jobs {
        for t in 0..inst.n_machines {
            let s = speed[j][t];
            let end = start[j][t] + inst.p(j, t, s);
            c.makespan = c.makespan.max(end);
            c.energy += inst.e(j, t, s);
            if let Some(d) = inst.due(j, t) {
                c.tardiness += (end - d).max(0);
            }
        }
    }
    c
}

pub fn objective_components(inst: &Instance, schedule: &Schedule) -> Result<Components> {
    let v = check_feasibility(inst, schedule);
    if !v.is_empty() {
        return Err(Error::InfeasibleInput(v));
    }
    Ok(components_unchecked(inst, &schedule.start, &schedule.speed))
}

pub fn normalized_objective(inst: &Instance, schedule: &Schedule) -> Result<ObjectiveBreakdown> {
    let c = objective_components(inst, schedule)?;
    Ok(Normalizer::for_instance(inst).breakdown(c))
}
