//! Partial active schedules: the state shared by the branch-and-bound search
//! and the Giffler–Thompson constructor.

use rand::Rng;

use crate::instance::{Instance, Time};
use crate::objective::{Components, Normalizer};

/// Flattened per-task data, indexed `j * n_machines + t`.
pub(crate) struct Model<'a> {
    pub inst: &'a Instance,
    pub norm: Normalizer,
    pub nj: usize,
    pub nm: usize,
    pub ns: usize,
    pub machine: Vec<usize>,
    pub release: Vec<Time>,
    /// `Time::MAX` when the task carries no due date.
    pub due: Vec<Time>,
    pub min_p: Vec<Time>,
    pub min_e: Vec<i64>,
    /// `pos[j][m]`: route position of machine `m` in job `j`.
    pub pos: Vec<Vec<usize>>,
}

impl<'a> Model<'a> {
    pub(crate) fn new(inst: &'a Instance) -> Self {
        Self::with_normalizer(inst, Normalizer::for_instance(inst))
    }

    pub(crate) fn with_normalizer(inst: &'a Instance, norm: Normalizer) -> Self {
        let (nj, nm) = (inst.n_jobs, inst.n_machines);
        let mut m = Model {
            inst,
            norm,
            nj,
            nm,
            ns: inst.n_speeds,
            machine: Vec::with_capacity(nj * nm),
            release: Vec::with_capacity(nj * nm),
            due: Vec::with_capacity(nj * nm),
            min_p: Vec::with_capacity(nj * nm),
            min_e: Vec::with_capacity(nj * nm),
            pos: inst.route_positions(),
        };
        for j in 0..nj {
            for t in 0..nm {
                m.machine.push(inst.routes[j][t]);
                m.release.push(inst.release(j, t));
                m.due.push(inst.due(j, t).unwrap_or(Time::MAX));
                m.min_p.push(inst.min_p(j, t));
                m.min_e.push(inst.min_e(j, t));
            }
        }
        m
    }

    #[inline]
    pub(crate) fn p(&self, j: usize, t: usize, s: usize) -> Time {
        self.inst.proc[j][t][s]
    }

    #[inline]
    pub(crate) fn e(&self, j: usize, t: usize, s: usize) -> i64 {
        self.inst.energy[j][t][s]
    }

    pub(crate) fn n_tasks(&self) -> usize {
        self.nj * self.nm
    }
}

/// One branching decision. `Fix` commits the speed of a job's next task
/// without scheduling it; `Place` schedules the next task at its earliest
/// start with the given speed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Step {
    Fix { job: usize, speed: usize },
    Place { job: usize, speed: usize },
}

#[derive(Clone, Debug)]
pub(crate) struct Partial {
    pub next: Vec<usize>,
    pub pending: Vec<Option<usize>>,
    pub job_ready: Vec<Time>,
    pub mach_ready: Vec<Time>,
    /// Assumed remaining duration per job / machine (min speed, or the
    /// committed speed of a pending task).
    pub job_rem: Vec<Time>,
    pub mach_rem: Vec<Time>,
    pub energy: i64,
    pub rem_energy: i64,
    pub tardiness: Time,
    pub makespan: Time,
    pub scheduled: usize,
}

impl Partial {
    pub(crate) fn root(md: &Model) -> Self {
        let mut p = Partial {
            next: vec![0; md.nj],
            pending: vec![None; md.nj],
            job_ready: vec![0; md.nj],
            mach_ready: vec![0; md.nm],
            job_rem: vec![0; md.nj],
            mach_rem: vec![0; md.nm],
            energy: 0,
            rem_energy: 0,
            tardiness: 0,
            makespan: 0,
            scheduled: 0,
        };
        for j in 0..md.nj {
            for t in 0..md.nm {
                let k = j * md.nm + t;
                p.job_rem[j] += md.min_p[k];
                p.mach_rem[md.machine[k]] += md.min_p[k];
                p.rem_energy += md.min_e[k];
            }
        }
        p
    }

    pub(crate) fn is_complete(&self, md: &Model) -> bool {
        self.scheduled == md.n_tasks()
    }

    pub(crate) fn components(&self) -> Components {
        Components {
            makespan: self.makespan,
            energy: self.energy,
            tardiness: self.tardiness,
        }
    }

    #[inline]
    pub(crate) fn est(&self, md: &Model, j: usize) -> Time {
        let k = j * md.nm + self.next[j];
        self.job_ready[j].max(self.mach_ready[md.machine[k]]).max(md.release[k])
    }

    /// Duration assumed for job `j`'s next task.
    #[inline]
    fn assumed_p(&self, md: &Model, j: usize) -> Time {
        let t = self.next[j];
        match self.pending[j] {
            Some(s) => md.p(j, t, s),
            None => md.min_p[j * md.nm + t],
        }
    }

    #[inline]
    fn assumed_e(&self, md: &Model, j: usize) -> i64 {
        let t = self.next[j];
        match self.pending[j] {
            Some(s) => md.e(j, t, s),
            None => md.min_e[j * md.nm + t],
        }
    }

    /// Applies a step; returns `(job, task, speed, start)` for placements.
    pub(crate) fn apply(&mut self, md: &Model, step: Step) -> Option<(usize, usize, usize, Time)> {
        match step {
            Step::Fix { job, speed } => {
                let t = self.next[job];
                let k = job * md.nm + t;
                let dp = md.p(job, t, speed) - md.min_p[k];
                self.job_rem[job] += dp;
                self.mach_rem[md.machine[k]] += dp;
                self.rem_energy += md.e(job, t, speed) - md.min_e[k];
                self.pending[job] = Some(speed);
                None
            }
            Step::Place { job, speed } => {
                let t = self.next[job];
                let k = job * md.nm + t;
                let m = md.machine[k];
                let assumed = self.assumed_p(md, job);
                self.rem_energy -= self.assumed_e(md, job);
                let start = self.est(md, job);
                let end = start + md.p(job, t, speed);
                self.job_rem[job] -= assumed;
                self.mach_rem[m] -= assumed;
                self.energy += md.e(job, t, speed);
                if end > md.due[k] {
                    self.tardiness += end - md.due[k];
                }
                self.makespan = self.makespan.max(end);
                self.job_ready[job] = end;
                self.mach_ready[m] = end;
                self.next[job] = t + 1;
                self.pending[job] = None;
                self.scheduled += 1;
                Some((job, t, speed, start))
            }
        }
    }

    /// Admissible bound on the scalarized value of any completion.
    pub(crate) fn lower_bound(&self, md: &Model) -> f64 {
        let mut mk = self.makespan;
        let mut tard = self.tardiness;
        for j in 0..md.nj {
            let mut c = self.job_ready[j];
            for t in self.next[j]..md.nm {
                let k = j * md.nm + t;
                let p = if t == self.next[j] {
                    self.assumed_p(md, j)
                } else {
                    md.min_p[k]
                };
                c = c.max(md.release[k]) + p;
                if c > md.due[k] {
                    tard += c - md.due[k];
                }
            }
            mk = mk.max(c);
        }
        for m in 0..md.nm {
            mk = mk.max(self.mach_ready[m] + self.mach_rem[m]);
        }
        md.norm.makespan_term(mk) + md.norm.energy_term(self.energy + self.rem_energy) + md.norm.tardiness_term(tard)
    }

    /// Exact-search branching: first commit the speed of the reference task
    /// (minimum assumed completion), then branch over the conflict set on its
    /// machine. Complete over every speed assignment.
    pub(crate) fn branch(&self, md: &Model, out: &mut Vec<Step>) {
        out.clear();
        let Some((oj, ect)) = self.reference(md, |p, j| p.assumed_p(md, j)) else {
            return;
        };
        if self.pending[oj].is_none() && md.ns > 1 {
            out.extend((0..md.ns).map(|speed| Step::Fix { job: oj, speed }));
            return;
        }
        let m_star = md.machine[oj * md.nm + self.next[oj]];
        for j in 0..md.nj {
            if self.next[j] == md.nm || md.machine[j * md.nm + self.next[j]] != m_star || self.est(md, j) >= ect {
                continue;
            }
            match self.pending[j] {
                Some(speed) => out.push(Step::Place { job: j, speed }),
                None => out.extend((0..md.ns).map(|speed| Step::Place { job: j, speed })),
            }
        }
    }

    /// Schedulable job minimizing `est + dur`, lowest index on ties.
    fn reference(&self, md: &Model, dur: impl Fn(&Self, usize) -> Time) -> Option<(usize, Time)> {
        let mut best: Option<(usize, Time)> = None;
        for j in 0..md.nj {
            if self.next[j] == md.nm {
                continue;
            }
            let ect = self.est(md, j) + dur(self, j);
            if best.map_or(true, |(_, b)| ect < b) {
                best = Some((j, ect));
            }
        }
        best
    }

    /// Heuristic conflict set: jobs whose next task shares the reference
    /// machine and could start before the reference finishes at min speed.
    pub(crate) fn conflict_set(&self, md: &Model, out: &mut Vec<usize>) {
        out.clear();
        let Some((oj, ect)) = self.reference(md, |p, j| md.min_p[j * md.nm + p.next[j]]) else {
            return;
        };
        let m_star = md.machine[oj * md.nm + self.next[oj]];
        out.extend((0..md.nj).filter(|&j| {
            self.next[j] < md.nm && md.machine[j * md.nm + self.next[j]] == m_star && self.est(md, j) < ect
        }));
    }
}

/// A complete schedule in solver form.
#[derive(Clone, Debug)]
pub(crate) struct Built {
    pub start: Vec<Vec<Time>>,
    pub speed: Vec<Vec<usize>>,
    pub orders: Vec<Vec<usize>>,
    pub comps: Components,
}

/// Giffler–Thompson construction. With `rng` the task and speed are sampled
/// uniformly; without, the pair with the smallest bound after placement wins.
pub(crate) fn construct<R: Rng>(md: &Model, mut rng: Option<&mut R>) -> Built {
    let mut cur = Partial::root(md);
    let mut scratch = cur.clone();
    let mut k_set = Vec::with_capacity(md.nj);
    let mut out = Built {
        start: vec![vec![0; md.nm]; md.nj],
        speed: vec![vec![0; md.nm]; md.nj],
        orders: vec![Vec::with_capacity(md.nj); md.nm],
        comps: Components::default(),
    };
    while !cur.is_complete(md) {
        cur.conflict_set(md, &mut k_set);
        let (job, speed) = match rng.as_deref_mut() {
            Some(r) => (k_set[r.gen_range(0..k_set.len())], r.gen_range(0..md.ns)),
            None => {
                let mut best = (f64::INFINITY, 0, 0);
                for &j in &k_set {
                    for s in 0..md.ns {
                        scratch.clone_from(&cur);
                        scratch.apply(md, Step::Place { job: j, speed: s });
                        let lb = scratch.lower_bound(md);
                        if lb < best.0 {
                            best = (lb, j, s);
                        }
                    }
                }
                (best.1, best.2)
            }
        };
        let (j, t, s, st) = cur.apply(md, Step::Place { job, speed }).expect("placement");
        out.start[j][t] = st;
        out.speed[j][t] = s;
        out.orders[md.machine[j * md.nm + t]].push(j);
    }
    out.comps = cur.components();
    out
}
