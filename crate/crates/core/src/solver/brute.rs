//! Exhaustive optimum for tiny instances: every speed assignment times every
//! active schedule under it.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::instance::{validate_instance, Instance, Time};
use crate::objective::{components_unchecked, Components, Normalizer, ObjectiveBounds, ObjectiveBreakdown};
use crate::schedule::Schedule;

pub const BRUTE_FORCE_MAX_TASKS: usize = 9;
pub const BRUTE_FORCE_MAX_SPEEDS: usize = 2;

pub fn brute_force_optimum(inst: &Instance) -> Result<(Schedule, ObjectiveBreakdown)> {
    brute_force_with_bounds(inst, crate::objective::objective_bounds(inst))
}

/// Same search, scoring with caller-supplied normalization bounds.
pub fn brute_force_with_bounds(inst: &Instance, bounds: ObjectiveBounds) -> Result<(Schedule, ObjectiveBreakdown)> {
    let v = validate_instance(inst);
    if !v.is_empty() {
        return Err(Error::InvalidInstance(v));
    }
    let n = inst.n_jobs * inst.n_machines;
    if n > BRUTE_FORCE_MAX_TASKS || inst.n_speeds > BRUTE_FORCE_MAX_SPEEDS {
        return Err(Error::TooLarge(format!(
            "{} tasks x {} speeds exceeds {} tasks x {} speeds",
            n, inst.n_speeds, BRUTE_FORCE_MAX_TASKS, BRUTE_FORCE_MAX_SPEEDS
        )));
    }
    let mut e = Enum {
        inst,
        norm: Normalizer::new(bounds),
        speed: vec![vec![0; inst.n_machines]; inst.n_jobs],
        start: vec![vec![0; inst.n_machines]; inst.n_jobs],
        next: vec![0; inst.n_jobs],
        job_ready: vec![0; inst.n_jobs],
        mach_ready: vec![0; inst.n_machines],
        best: None,
    };
    let total = inst.n_speeds.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for j in 0..inst.n_jobs {
            for t in 0..inst.n_machines {
                e.speed[j][t] = c % inst.n_speeds;
                c /= inst.n_speeds;
            }
        }
        e.recurse(0);
    }
    let (value, comps, schedule) = e.best.expect("at least one schedule");
    let mut b = Normalizer::new(bounds).breakdown(comps);
    b.scalarized = value;
    Ok((schedule, b))
}

struct Enum<'a> {
    inst: &'a Instance,
    norm: Normalizer,
    speed: Vec<Vec<usize>>,
    start: Vec<Vec<Time>>,
    next: Vec<usize>,
    job_ready: Vec<Time>,
    mach_ready: Vec<Time>,
    best: Option<(f64, Components, Schedule)>,
}

impl Enum<'_> {
    fn est(&self, j: usize) -> Time {
        let t = self.next[j];
        self.job_ready[j]
            .max(self.mach_ready[self.inst.routes[j][t]])
            .max(self.inst.release(j, t))
    }

    fn dur(&self, j: usize) -> Time {
        let t = self.next[j];
        self.inst.p(j, t, self.speed[j][t])
    }

    fn recurse(&mut self, placed: usize) {
        let (nj, nm) = (self.inst.n_jobs, self.inst.n_machines);
        if placed == nj * nm {
            self.offer();
            return;
        }
        let mut star = usize::MAX;
        let mut ect = Time::MAX;
        for j in 0..nj {
            if self.next[j] < nm && self.est(j) + self.dur(j) < ect {
                ect = self.est(j) + self.dur(j);
                star = j;
            }
        }
        let m = self.inst.routes[star][self.next[star]];
        let conflict: Vec<usize> = (0..nj)
            .filter(|&j| self.next[j] < nm && self.inst.routes[j][self.next[j]] == m && self.est(j) < ect)
            .collect();
        for j in conflict {
            let t = self.next[j];
            let (jr, mr) = (self.job_ready[j], self.mach_ready[m]);
            let s = self.est(j);
            let c = s + self.dur(j);
            self.start[j][t] = s;
            self.job_ready[j] = c;
            self.mach_ready[m] = c;
            self.next[j] += 1;
            self.recurse(placed + 1);
            self.next[j] -= 1;
            self.job_ready[j] = jr;
            self.mach_ready[m] = mr;
        }
    }

    fn offer(&mut self) {
        let comps = components_unchecked(self.inst, &self.start, &self.speed);
        let value = self.norm.scalarize(comps);
        let better = match &self.best {
            None => true,
            Some((bv, bc, bs)) => {
                value
                    .total_cmp(bv)
                    .then(comps.cmp(bc))
                    .then_with(|| (&self.start, &self.speed).cmp(&(&bs.start, &bs.speed)))
                    == Ordering::Less
            }
        };
        if better {
            self.best = Some((
                value,
                comps,
                Schedule {
                    start: self.start.clone(),
                    speed: self.speed.clone(),
                },
            ));
        }
    }
}
