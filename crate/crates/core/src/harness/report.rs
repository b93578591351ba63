//! Status counts per solver and mean time / objective per size cell.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::harness::dataset::format_real;
use crate::harness::matrix::ResultRow;
use crate::solver::{SolveStatus, SolverId};

pub const TIMEOUT_MARKER: &str = "Timeout";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StatusCounts {
    pub solver: SolverId,
    pub optimal: usize,
    pub satisfied: usize,
    pub unresolved: usize,
}

impl StatusCounts {
    pub fn total(&self) -> usize {
        self.optimal + self.satisfied + self.unresolved
    }
}

pub fn summarize_status(results: &[ResultRow]) -> Vec<StatusCounts> {
    SolverId::ALL
        .into_iter()
        .map(|solver| {
            let mut c = StatusCounts {
                solver,
                optimal: 0,
                satisfied: 0,
                unresolved: 0,
            };
            for r in results {
                match r.cell(solver).status {
                    SolveStatus::Optimal => c.optimal += 1,
                    SolveStatus::Satisfied => c.satisfied += 1,
                    SolveStatus::Unresolved => c.unresolved += 1,
                }
            }
            c
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellMeans {
    pub mean_ms: f64,
    pub mean_obj: f64,
    pub solved: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeansRow {
    pub n_jobs: usize,
    pub n_machines: usize,
    /// `None` when the solver found no schedule in the group.
    pub per_solver: [Option<CellMeans>; 3],
}

/// Means over solved instances only, grouped by (jobs, machines) ascending.
pub fn summarize_means(results: &[ResultRow]) -> Vec<MeansRow> {
    let mut groups: BTreeMap<(usize, usize), Vec<&ResultRow>> = BTreeMap::new();
    for r in results {
        groups.entry((r.n_jobs, r.n_machines)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((n_jobs, n_machines), rows)| MeansRow {
            n_jobs,
            n_machines,
            per_solver: SolverId::ALL.map(|s| {
                let solved: Vec<_> = rows
                    .iter()
                    .map(|r| r.cell(s))
                    .filter_map(|c| c.value().map(|v| (c.solve_time_ms as f64, v)))
                    .collect();
                if solved.is_empty() {
                    return None;
                }
                let n = solved.len() as f64;
                Some(CellMeans {
                    mean_ms: solved.iter().map(|x| x.0).sum::<f64>() / n,
                    mean_obj: solved.iter().map(|x| x.1).sum::<f64>() / n,
                    solved: solved.len(),
                })
            }),
        })
        .collect()
}

pub fn write_status_counts<W: Write>(w: W, counts: &[StatusCounts]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["solver", "optimal", "satisfied", "unresolved"])?;
    for c in counts {
        wr.write_record([
            c.solver.tag().to_string(),
            c.optimal.to_string(),
            c.satisfied.to_string(),
            c.unresolved.to_string(),
        ])?;
    }
    wr.flush().map_err(|e| Error::io("<status_counts>", e))?;
    Ok(())
}

pub fn write_means<W: Write>(w: W, rows: &[MeansRow]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let mut header = vec!["jobs".to_string(), "machines".to_string()];
    for s in SolverId::ALL {
        header.push(format!("{}_mean_ms", s.tag()));
        header.push(format!("{}_mean_obj", s.tag()));
    }
    wr.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.n_jobs.to_string(), r.n_machines.to_string()];
        for m in &r.per_solver {
            match m {
                Some(m) => {
                    rec.push(format_real(m.mean_ms));
                    rec.push(format_real(m.mean_obj));
                }
                None => {
                    rec.push(TIMEOUT_MARKER.to_string());
                    rec.push(TIMEOUT_MARKER.to_string());
                }
            }
        }
        wr.write_record(&rec)?;
    }
    wr.flush().map_err(|e| Error::io("<means_by_jm>", e))?;
    Ok(())
}
