//! The (instance x solver) run matrix with an append-only resume journal.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};

use crate::budget::{allocate_budget, Characteristics};
use crate::error::{Error, Result};
use crate::generator::splitmix64;
use crate::instance::Instance;
use crate::objective::ObjectiveBreakdown;
use crate::solver::{solve, Budget, ClockMode, SolveOutcome, SolveStatus, SolverId};

/// One solver's result on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverCell {
    pub status: SolveStatus,
    pub objective: Option<ObjectiveBreakdown>,
    pub solve_time_ms: u64,
    pub budget_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SolverCell {
    pub fn value(&self) -> Option<f64> {
        self.objective.map(|o| o.scalarized)
    }

    pub fn unresolved(budget_ms: u64, note: impl Into<String>) -> Self {
        SolverCell {
            status: SolveStatus::Unresolved,
            objective: None,
            solve_time_ms: 0,
            budget_ms,
            note: Some(note.into()),
        }
    }
}

impl From<&SolveOutcome> for SolverCell {
    fn from(o: &SolveOutcome) -> Self {
        SolverCell {
            status: o.status,
            objective: o.objective,
            solve_time_ms: o.solve_time_ms,
            budget_ms: o.budget_ms,
            note: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub id: String,
    pub n_jobs: usize,
    pub n_machines: usize,
    pub rddd: u8,
    pub n_speeds: usize,
    /// Indexed by [`SolverId::index`].
    pub cells: [SolverCell; 3],
}

impl ResultRow {
    pub fn cell(&self, s: SolverId) -> &SolverCell {
        &self.cells[s.index()]
    }
}

#[derive(Clone, Debug)]
pub struct MatrixOptions {
    pub solvers: Vec<SolverId>,
    pub parallelism: usize,
    /// Replaces the allocated budget when set.
    pub budget_override: Option<u64>,
    /// Clamps the allocated budget when set.
    pub budget_cap: Option<u64>,
    pub clock: ClockMode,
    /// Mixed into every instance seed to form the solver seed.
    pub seed: u64,
    pub journal: Option<PathBuf>,
}

impl Default for MatrixOptions {
    fn default() -> Self {
        MatrixOptions {
            solvers: SolverId::ALL.to_vec(),
            parallelism: 1,
            budget_override: None,
            budget_cap: None,
            clock: ClockMode::Wall,
            seed: 0,
            journal: None,
        }
    }
}

impl MatrixOptions {
    pub fn budget_for(&self, inst: &Instance) -> u64 {
        if let Some(b) = self.budget_override {
            return b;
        }
        let b = allocate_budget(&Characteristics::from(inst));
        self.budget_cap.map_or(b, |c| b.min(c))
    }

    pub fn solver_seed(&self, inst: &Instance) -> u64 {
        splitmix64(inst.seed ^ splitmix64(self.seed))
    }
}

/// A completed pair, one JSON object per journal line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JournalRecord {
    pub id: String,
    pub solver: SolverId,
    #[serde(flatten)]
    pub cell: SolverCell,
}

/// Completed pairs from a journal. A torn final line (interrupted write) is
/// ignored; any other malformed line is an error.
pub fn read_journal(path: &Path) -> Result<BTreeMap<(String, SolverId), SolverCell>> {
    let mut out = BTreeMap::new();
    let f = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
        Err(e) => return Err(Error::io(path, e)),
    };
    let lines: Vec<String> = BufReader::new(f)
        .lines()
        .collect::<std::io::Result<_>>()
        .map_err(|e| Error::io(path, e))?;
    let n = lines.len();
    for (i, line) in lines.into_iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<JournalRecord>(&line) {
            Ok(r) => {
                out.insert((r.id, r.solver), r.cell);
            }
            Err(_) if i + 1 == n => {}
            Err(e) => return Err(Error::format(path, format!("journal line {}: {e}", i + 1))),
        }
    }
    Ok(out)
}

/// Valid-JSON instance files in `dir`, sorted by instance id.
pub fn load_instances(dir: &Path) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "json") {
            out.push(Instance::read(&path)?);
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = out.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(Error::format(dir, format!("duplicate instance id `{}`", w[0].id)));
    }
    Ok(out)
}

fn run_pair(inst: &Instance, solver: SolverId, opts: &MatrixOptions) -> SolverCell {
    let ms = opts.budget_for(inst);
    let budget = Budget { ms, clock: opts.clock };
    match solve(solver, inst, budget, opts.solver_seed(inst)) {
        Ok(o) => SolverCell::from(&o),
        Err(e) => SolverCell::unresolved(ms, e.to_string()),
    }
}

/// Solves every (instance, solver) pair not already journaled and returns
/// one row per instance in id order. Solvers left out of `opts.solvers`
/// appear as Unresolved cells noted "not run".
pub fn run_matrix_on(instances: &[Instance], opts: &MatrixOptions) -> Result<Vec<ResultRow>> {
    let mut done = match &opts.journal {
        Some(p) => read_journal(p)?,
        None => BTreeMap::new(),
    };
    let mut pending = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        for &s in &opts.solvers {
            if !done.contains_key(&(inst.id.clone(), s)) {
                pending.push((i, s));
            }
        }
    }
    let mut journal = match &opts.journal {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            Some((
                OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(p)
                    .map_err(|e| Error::io(p, e))?,
                p.clone(),
            ))
        }
        None => None,
    };
    let workers = opts.parallelism.max(1).min(pending.len().max(1));
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, SolverId, SolverCell)>();
    let mut write_err = None;
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (next, pending) = (&next, &pending);
            scope.spawn(move || loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, s)) = pending.get(k) else { break };
                let cell = run_pair(&instances[i], s, opts);
                if tx.send((i, s, cell)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (i, s, cell) in rx {
            if let (Some((f, p)), None) = (journal.as_mut(), write_err.as_ref()) {
                let rec = JournalRecord {
                    id: instances[i].id.clone(),
                    solver: s,
                    cell: cell.clone(),
                };
                let line = serde_json::to_string(&rec).expect("journal record serializes");
                if let Err(e) = writeln!(f, "{line}").and_then(|_| f.flush()) {
                    write_err = Some(Error::io(p.as_path(), e));
                }
            }
            done.insert((instances[i].id.clone(), s), cell);
        }
    });
    if let Some(e) = write_err {
        return Err(e);
    }
    Ok(instances
        .iter()
        .map(|inst| {
            let ms = opts.budget_for(inst);
            let cells = SolverId::ALL.map(|s| {
                done.get(&(inst.id.clone(), s))
                    .cloned()
                    .unwrap_or_else(|| SolverCell::unresolved(ms, "not run"))
            });
            ResultRow {
                id: inst.id.clone(),
                n_jobs: inst.n_jobs,
                n_machines: inst.n_machines,
                rddd: inst.rddd_level.as_u8(),
                n_speeds: inst.n_speeds,
                cells,
            }
        })
        .collect())
}

pub fn run_matrix(instance_dir: &Path, opts: &MatrixOptions) -> Result<Vec<ResultRow>> {
    run_matrix_on(&load_instances(instance_dir)?, opts)
}
