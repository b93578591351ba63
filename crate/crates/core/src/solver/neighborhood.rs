//! Critical-pair swaps and single-task speed changes over a sequencing.

use serde::{Deserialize, Serialize};

use super::active::Model;
use crate::error::{Error, Result};
use crate::instance::{validate_instance, Instance, Time};
use crate::objective::{components_unchecked, Components, Normalizer, ObjectiveBreakdown};
use crate::schedule::{check_feasibility, Decoder, Schedule, Sequencing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Move {
    /// Exchange positions `position` and `position + 1` on `machine`.
    Swap { machine: usize, position: usize },
    Speed {
        job: usize,
        task: usize,
        from: usize,
        to: usize,
    },
}

impl Move {
    pub(crate) fn apply(self, seq: &mut Sequencing) {
        match self {
            Move::Swap { machine, position } => seq.machine_orders[machine].swap(position, position + 1),
            Move::Speed { job, task, to, .. } => seq.speeds[job][task] = to,
        }
    }

    pub(crate) fn undo(self, seq: &mut Sequencing) {
        match self {
            Move::Swap { machine, position } => seq.machine_orders[machine].swap(position, position + 1),
            Move::Speed { job, task, from, .. } => seq.speeds[job][task] = from,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Neighbor {
    pub mv: Move,
    pub schedule: Schedule,
    pub objective: ObjectiveBreakdown,
}

/// Candidate moves in enumeration order: critical swaps by (machine,
/// position), then speed moves by (job, task, slower before faster).
///
/// A task is critical when a chain of tight arcs leads from it to a task that
/// ends at the makespan or after its due date.
pub(crate) fn candidate_moves(
    md: &Model,
    seq: &Sequencing,
    start: &[Vec<Time>],
    crit: &mut Vec<bool>,
    out: &mut Vec<Move>,
) {
    out.clear();
    let (nj, nm) = (md.nj, md.nm);
    let end = |j: usize, t: usize| start[j][t] + md.p(j, t, seq.speeds[j][t]);
    let mut makespan = 0;
    for j in 0..nj {
        makespan = makespan.max(end(j, nm - 1));
    }
    // Machine successor of every task.
    let mut succ = vec![usize::MAX; nj * nm];
    for (m, order) in seq.machine_orders.iter().enumerate() {
        for w in order.windows(2) {
            succ[w[0] * nm + md.pos[w[0]][m]] = w[1] * nm + md.pos[w[1]][m];
        }
    }
    let mut tasks: Vec<usize> = (0..nj * nm).collect();
    tasks.sort_unstable_by_key(|&k| std::cmp::Reverse(start[k / nm][k % nm]));
    crit.clear();
    crit.resize(nj * nm, false);
    for &k in &tasks {
        let (j, t) = (k / nm, k % nm);
        let c = end(j, t);
        let tight = |q: usize| crit[q] && start[q / nm][q % nm] == c;
        let sink = c == makespan || c > md.due[k];
        crit[k] = sink || (t + 1 < nm && tight(k + 1)) || (succ[k] != usize::MAX && tight(succ[k]));
    }
    for (m, order) in seq.machine_orders.iter().enumerate() {
        for (position, w) in order.windows(2).enumerate() {
            let a = w[0] * nm + md.pos[w[0]][m];
            let b = w[1] * nm + md.pos[w[1]][m];
            if crit[a] && crit[b] && start[w[1]][md.pos[w[1]][m]] == end(w[0], md.pos[w[0]][m]) {
                out.push(Move::Swap { machine: m, position });
            }
        }
    }
    for job in 0..nj {
        for task in 0..nm {
            let from = seq.speeds[job][task];
            if from > 0 {
                out.push(Move::Speed {
                    job,
                    task,
                    from,
                    to: from - 1,
                });
            }
            if from + 1 < md.ns {
                out.push(Move::Speed {
                    job,
                    task,
                    from,
                    to: from + 1,
                });
            }
        }
    }
}

/// Incumbent-plus-scratch state for the local searches.
pub(crate) struct Walker<'a> {
    pub md: &'a Model<'a>,
    decoder: Decoder,
    pub seq: Sequencing,
    pub start: Vec<Vec<Time>>,
    pub comps: Components,
    pub value: f64,
    trial_start: Vec<Vec<Time>>,
    pub trial_comps: Components,
    pub trial_value: f64,
    crit: Vec<bool>,
}

impl<'a> Walker<'a> {
    pub(crate) fn new(md: &'a Model<'a>, seq: Sequencing, start: Vec<Vec<Time>>, comps: Components) -> Self {
        let value = md.norm.scalarize(comps);
        Walker {
            md,
            decoder: Decoder::new(md.inst),
            trial_start: start.clone(),
            seq,
            start,
            comps,
            value,
            trial_comps: comps,
            trial_value: value,
            crit: Vec::new(),
        }
    }

    pub(crate) fn reset(&mut self, seq: Sequencing, start: Vec<Vec<Time>>, comps: Components) {
        self.value = self.md.norm.scalarize(comps);
        self.seq = seq;
        self.start = start;
        self.comps = comps;
    }

    pub(crate) fn moves(&mut self, out: &mut Vec<Move>) {
        candidate_moves(self.md, &self.seq, &self.start, &mut self.crit, out);
    }

    /// Applies `mv` to the sequencing and decodes it into the trial buffers.
    /// On a cycle the move is undone and false returned.
    pub(crate) fn try_move(&mut self, mv: Move) -> bool {
        mv.apply(&mut self.seq);
        let inst = self.md.inst;
        if !self
            .decoder
            .decode_into(inst, &self.seq.machine_orders, &self.seq.speeds, &mut self.trial_start)
        {
            mv.undo(&mut self.seq);
            return false;
        }
        self.trial_comps = components_unchecked(inst, &self.trial_start, &self.seq.speeds);
        self.trial_value = self.md.norm.scalarize(self.trial_comps);
        true
    }

    pub(crate) fn accept(&mut self) {
        std::mem::swap(&mut self.start, &mut self.trial_start);
        self.comps = self.trial_comps;
        self.value = self.trial_value;
    }

    pub(crate) fn reject(&mut self, mv: Move) {
        mv.undo(&mut self.seq);
    }

    pub(crate) fn schedule(&self) -> Schedule {
        Schedule {
            start: self.start.clone(),
            speed: self.seq.speeds.clone(),
        }
    }
}

/// Every move from `schedule`, re-decoded; cyclic candidates are dropped.
pub fn enumerate_neighbors(inst: &Instance, schedule: &Schedule) -> Result<Vec<Neighbor>> {
    let v = validate_instance(inst);
    if !v.is_empty() {
        return Err(Error::InvalidInstance(v));
    }
    let v = check_feasibility(inst, schedule);
    if !v.is_empty() {
        return Err(Error::InfeasibleInput(v));
    }
    let md = Model::new(inst);
    let norm = Normalizer::for_instance(inst);
    let seq = Sequencing::from_schedule(inst, schedule);
    let comps = components_unchecked(inst, &schedule.start, &schedule.speed);
    let mut w = Walker::new(&md, seq, schedule.start.clone(), comps);
    let mut moves = Vec::new();
    w.moves(&mut moves);
    let mut out = Vec::with_capacity(moves.len());
    for mv in moves {
        if w.try_move(mv) {
            out.push(Neighbor {
                mv,
                schedule: Schedule {
                    start: w.trial_start.clone(),
                    speed: w.seq.speeds.clone(),
                },
                objective: norm.breakdown(w.trial_comps),
            });
            w.reject(mv);
        }
    }
    Ok(out)
}
