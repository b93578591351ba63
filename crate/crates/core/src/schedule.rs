//! Schedules, semi-active decoding of sequencing decisions, and feasibility.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Time, Violation, ViolationKind};

/// Start time and speed of every task, indexed `[job][task]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule {
    pub start: Vec<Vec<Time>>,
    pub speed: Vec<Vec<usize>>,
}

impl Schedule {
    pub fn completion(&self, inst: &Instance, job: usize, task: usize) -> Time {
        self.start[job][task] + inst.p(job, task, self.speed[job][task])
    }

    /// Per-machine processing order (job indices), read off the start times.
    /// Ties on a machine, which only occur in infeasible schedules, break by
    /// job index.
    pub fn machine_orders(&self, inst: &Instance) -> Vec<Vec<usize>> {
        let pos = inst.route_positions();
        (0..inst.n_machines)
            .map(|m| {
                let mut jobs: Vec<usize> = (0..inst.n_jobs).collect();
                jobs.sort_by_key(|&j| (self.start[j][pos[j][m]], j));
                jobs
            })
            .collect()
    }
}

/// A sequencing decision: the job order on every machine plus a speed per task.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequencing {
    pub machine_orders: Vec<Vec<usize>>,
    pub speeds: Vec<Vec<usize>>,
}

impl Sequencing {
    pub fn from_schedule(inst: &Instance, schedule: &Schedule) -> Self {
        Sequencing {
            machine_orders: schedule.machine_orders(inst),
            speeds: schedule.speed.clone(),
        }
    }
}

/// Reusable earliest-start decoder; keeps scratch buffers between calls.
#[derive(Clone, Debug)]
pub(crate) struct Decoder {
    job_next: Vec<usize>,
    mach_next: Vec<usize>,
    job_ready: Vec<Time>,
    mach_ready: Vec<Time>,
    stack: Vec<usize>,
}

impl Decoder {
    pub(crate) fn new(inst: &Instance) -> Self {
        Decoder {
            job_next: vec![0; inst.n_jobs],
            mach_next: vec![0; inst.n_machines],
            job_ready: vec![0; inst.n_jobs],
            mach_ready: vec![0; inst.n_machines],
            stack: Vec::with_capacity(inst.n_jobs),
        }
    }

    /// Writes earliest starts into `start`; returns false on a precedence cycle.
    pub(crate) fn decode_into(
        &mut self,
        inst: &Instance,
        machine_orders: &[Vec<usize>],
        speeds: &[Vec<usize>],
        start: &mut [Vec<Time>],
    ) -> bool {
        let (nj, nm) = (inst.n_jobs, inst.n_machines);
        self.job_next.iter_mut().for_each(|x| *x = 0);
        self.mach_next.iter_mut().for_each(|x| *x = 0);
        self.job_ready.iter_mut().for_each(|x| *x = 0);
        self.mach_ready.iter_mut().for_each(|x| *x = 0);
        self.stack.clear();
        self.stack.extend((0..nj).rev());
        let mut done = 0;
        while let Some(j) = self.stack.pop() {
            let t = self.job_next[j];
            if t == nm {
                continue;
            }
            let m = inst.routes[j][t];
            let k = self.mach_next[m];
            if k == nj || machine_orders[m][k] != j {
                continue;
            }
            let s = self.job_ready[j].max(self.mach_ready[m]).max(inst.release(j, t));
            let c = s + inst.p(j, t, speeds[j][t]);
            start[j][t] = s;
            self.job_ready[j] = c;
            self.mach_ready[m] = c;
            self.job_next[j] = t + 1;
            self.mach_next[m] = k + 1;
            done += 1;
            if k + 1 < nj {
                self.stack.push(machine_orders[m][k + 1]);
            }
            self.stack.push(j);
        }
        done == nj * nm
    }
}

fn check_sequencing(inst: &Instance, machine_orders: &[Vec<usize>], speeds: &[Vec<usize>]) -> Result<()> {
    if machine_orders.len() != inst.n_machines {
        return Err(Error::InvalidSequencing(format!(
            "{} machine orders for {} machines",
            machine_orders.len(),
            inst.n_machines
        )));
    }
    for (m, order) in machine_orders.iter().enumerate() {
        let mut seen = vec![false; inst.n_jobs];
        let ok = order.len() == inst.n_jobs
            && order
                .iter()
                .all(|&j| j < inst.n_jobs && !std::mem::replace(&mut seen[j], true));
        if !ok {
            return Err(Error::InvalidSequencing(format!(
                "order on machine {m} is not a permutation of the jobs"
            )));
        }
    }
    let shape_ok = speeds.len() == inst.n_jobs
        && speeds
            .iter()
            .all(|row| row.len() == inst.n_machines && row.iter().all(|&s| s < inst.n_speeds));
    if !shape_ok {
        return Err(Error::InvalidSequencing(
            "speed assignment out of range or misshapen".into(),
        ));
    }
    Ok(())
}

/// Earliest-start (semi-active) timing of a sequencing decision: every task
/// starts at the latest of its release date, its route predecessor's
/// completion and its machine predecessor's completion.
pub fn decode_schedule(inst: &Instance, machine_orders: &[Vec<usize>], speeds: &[Vec<usize>]) -> Result<Schedule> {
    check_sequencing(inst, machine_orders, speeds)?;
    let mut start = vec![vec![0; inst.n_machines]; inst.n_jobs];
    if !Decoder::new(inst).decode_into(inst, machine_orders, speeds, &mut start) {
        return Err(Error::CyclicPrecedence);
    }
    Ok(Schedule {
        start,
        speed: speeds.to_vec(),
    })
}

/// Every constraint the schedule breaks. Due dates are soft and never reported.
pub fn check_feasibility(inst: &Instance, schedule: &Schedule) -> Vec<Violation> {
    use ViolationKind::*;
    let (nj, nm) = (inst.n_jobs, inst.n_machines);
    let mut out = Vec::new();
    let shape_ok = schedule.start.len() == nj
        && schedule.speed.len() == nj
        && schedule.start.iter().all(|r| r.len() == nm)
        && schedule.speed.iter().all(|r| r.len() == nm);
    if !shape_ok {
        out.push(Violation::new(
            Shape,
            None,
            None,
            None,
            "schedule shape does not match instance",
        ));
        return out;
    }
    let mut speeds_ok = true;
    for j in 0..nj {
        for t in 0..nm {
            let s = schedule.speed[j][t];
            if s >= inst.n_speeds {
                out.push(Violation::new(SpeedOutOfRange, Some(j), Some(t), Some(s), ""));
                speeds_ok = false;
            }
            let st = schedule.start[j][t];
            if st < 0 {
                out.push(Violation::new(
                    NegativeStart,
                    Some(j),
                    Some(t),
                    None,
                    format!("start {st}"),
                ));
            }
            let r = inst.release(j, t);
            if st < r {
                out.push(Violation::new(
                    ReleaseDate,
                    Some(j),
                    Some(t),
                    None,
                    format!("start {st} < release {r}"),
                ));
            }
        }
    }
    if !speeds_ok {
        out.sort();
        return out;
    }
    for j in 0..nj {
        for t in 1..nm {
            let prev_end = schedule.completion(inst, j, t - 1);
            if schedule.start[j][t] < prev_end {
                out.push(Violation::new(
                    RoutePrecedence,
                    Some(j),
                    Some(t),
                    None,
                    format!(
                        "starts at {} before task {} ends at {prev_end}",
                        schedule.start[j][t],
                        t - 1
                    ),
                ));
            }
        }
    }
    let pos = inst.route_positions();
    for m in 0..nm {
        for a in 0..nj {
            let ta = pos[a][m];
            let (sa, ea) = (schedule.start[a][ta], schedule.completion(inst, a, ta));
            for b in a + 1..nj {
                let tb = pos[b][m];
                let (sb, eb) = (schedule.start[b][tb], schedule.completion(inst, b, tb));
                if sa < eb && sb < ea {
                    out.push(Violation::new(
                        MachineOverlap,
                        Some(a),
                        Some(ta),
                        None,
                        format!("machine {m}: [{sa},{ea}) overlaps job {b} task {tb} [{sb},{eb})"),
                    ));
                }
            }
        }
    }
    out.sort();
    out
}
