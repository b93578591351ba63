//! The solver portfolio: exact branch-and-bound, greedy construction with
//! local search, and simulated annealing, plus a brute-force oracle.

mod active;
mod anneal;
mod bnb;
mod brute;
mod clock;
mod local;
mod neighborhood;

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use anneal::{SA_COOLING, SA_COOLING_PERIOD, SA_REHEAT_AFTER, SA_STALE_REHEATS, SA_TARGET_ACCEPT};
pub use brute::{brute_force_optimum, brute_force_with_bounds, BRUTE_FORCE_MAX_SPEEDS, BRUTE_FORCE_MAX_TASKS};
pub use clock::{Budget, ClockMode, WORK_UNITS_PER_MS};
pub use local::GLS_STALE_RESTARTS;
pub use neighborhood::{enumerate_neighbors, Move, Neighbor};

use crate::error::{Error, Result};
use crate::generator::stream;
use crate::instance::{validate_instance, Instance};
use crate::objective::{normalized_objective, ObjectiveBreakdown};
use crate::schedule::Schedule;
use active::{Model, Partial};
use clock::Clock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SolverId {
    #[serde(rename = "bnb")]
    ExactBnB,
    #[serde(rename = "gls")]
    GreedyLS,
    #[serde(rename = "sa")]
    Anneal,
}

impl SolverId {
    /// Fixed portfolio order; also the label tie-break order.
    pub const ALL: [SolverId; 3] = [SolverId::ExactBnB, SolverId::GreedyLS, SolverId::Anneal];

    pub fn tag(self) -> &'static str {
        match self {
            SolverId::ExactBnB => "bnb",
            SolverId::GreedyLS => "gls",
            SolverId::Anneal => "sa",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SolverId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "bnb" | "ExactBnB" => Ok(SolverId::ExactBnB),
            "gls" | "GreedyLS" => Ok(SolverId::GreedyLS),
            "sa" | "Anneal" => Ok(SolverId::Anneal),
            other => Err(format!("unknown solver `{other}` (expected bnb, gls or sa)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Optimal,
    Satisfied,
    Unresolved,
}

impl SolveStatus {
    pub fn tag(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Satisfied => "satisfied",
            SolveStatus::Unresolved => "unresolved",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SolveStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "optimal" => Ok(SolveStatus::Optimal),
            "satisfied" => Ok(SolveStatus::Satisfied),
            "unresolved" => Ok(SolveStatus::Unresolved),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Incumbent {
    pub elapsed_ms: u64,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub moves_tried: u64,
    /// Random restarts (local search) or reheats (annealing).
    pub restarts: u64,
    pub work_units: u64,
    /// Best-so-far values, strictly decreasing.
    pub incumbents: Vec<Incumbent>,
    pub proof_complete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub solver: SolverId,
    pub status: SolveStatus,
    pub best: Option<Schedule>,
    pub objective: Option<ObjectiveBreakdown>,
    pub solve_time_ms: u64,
    pub budget_ms: u64,
    pub seed: u64,
    pub stats: SearchStats,
}

impl SolveOutcome {
    pub fn value(&self) -> Option<f64> {
        self.objective.map(|o| o.scalarized)
    }
}

const GLS_STREAM: u64 = 11;
const SA_STREAM: u64 = 12;

pub fn solve(solver: SolverId, inst: &Instance, budget: Budget, seed: u64) -> Result<SolveOutcome> {
    let v = validate_instance(inst);
    if !v.is_empty() {
        return Err(Error::InvalidInstance(v));
    }
    let md = Model::new(inst);
    let mut clock = Clock::start(budget);
    let mut stats = SearchStats::default();
    let root_lb = Partial::root(&md).lower_bound(&md);
    let (status, best) = match solver {
        SolverId::ExactBnB => {
            let r = bnb::search(&md, &mut clock, &mut stats);
            stats.proof_complete = r.exhausted;
            match r.best {
                Some((start, speed, _)) => {
                    let st = if r.exhausted {
                        SolveStatus::Optimal
                    } else {
                        SolveStatus::Satisfied
                    };
                    (st, Some(Schedule { start, speed }))
                }
                None => (SolveStatus::Unresolved, None),
            }
        }
        SolverId::GreedyLS => {
            let mut rng: ChaCha8Rng = stream(seed, GLS_STREAM);
            let s = local::search(&md, &mut rng, root_lb, &mut clock, &mut stats);
            (SolveStatus::Satisfied, Some(s))
        }
        SolverId::Anneal => {
            let mut rng: ChaCha8Rng = stream(seed, SA_STREAM);
            let s = anneal::search(&md, &mut rng, root_lb, &mut clock, &mut stats);
            (SolveStatus::Satisfied, Some(s))
        }
    };
    stats.work_units = clock.work();
    let objective = match &best {
        Some(s) => Some(normalized_objective(inst, s)?),
        None => None,
    };
    Ok(SolveOutcome {
        solver,
        status,
        best,
        objective,
        solve_time_ms: clock.elapsed_ms(),
        budget_ms: budget.ms,
        seed,
        stats,
    })
}

pub fn solve_bnb(inst: &Instance, budget: Budget, seed: u64) -> Result<SolveOutcome> {
    solve(SolverId::ExactBnB, inst, budget, seed)
}

pub fn solve_greedy_ls(inst: &Instance, budget: Budget, seed: u64) -> Result<SolveOutcome> {
    solve(SolverId::GreedyLS, inst, budget, seed)
}

pub fn solve_sa(inst: &Instance, budget: Budget, seed: u64) -> Result<SolveOutcome> {
    solve(SolverId::Anneal, inst, budget, seed)
}

/// How the constructor picks among the conflict set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    /// Task and speed with the smallest bound after placement.
    Greedy,
    /// Uniform task and speed, seeded.
    Random { seed: u64 },
}

pub fn giffler_thompson_construct(inst: &Instance, mode: Construction) -> Result<Schedule> {
    let v = validate_instance(inst);
    if !v.is_empty() {
        return Err(Error::InvalidInstance(v));
    }
    let md = Model::new(inst);
    let b = match mode {
        Construction::Greedy => active::construct::<ChaCha8Rng>(&md, None),
        Construction::Random { seed } => {
            let mut rng: ChaCha8Rng = stream(seed, SA_STREAM);
            active::construct(&md, Some(&mut rng))
        }
    };
    Ok(Schedule {
        start: b.start,
        speed: b.speed,
    })
}
