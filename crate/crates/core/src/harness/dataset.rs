//! Labeled dataset rows and the results / dataset CSV files.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{extract_features, FeatureVector};
use crate::harness::matrix::{ResultRow, SolverCell};
use crate::instance::Instance;
use crate::objective::{ObjectiveBounds, ObjectiveBreakdown};
use crate::solver::{SolveStatus, SolverId};

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Shortest text that reads back as `round12(x)`.
pub fn format_real(x: f64) -> String {
    format!("{}", round12(x))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DatasetCell {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub solve_time_ms: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetRow {
    pub id: String,
    pub features: FeatureVector,
    pub cells: [DatasetCell; 3],
    pub label: SolverId,
}

impl DatasetRow {
    pub fn cell(&self, s: SolverId) -> &DatasetCell {
        &self.cells[s.index()]
    }

    /// Smallest objective on the row.
    pub fn best_objective(&self) -> Option<f64> {
        self.cells.iter().filter_map(|c| c.objective).min_by(f64::total_cmp)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Labeled {
    pub rows: Vec<DatasetRow>,
    /// Result rows dropped because no solver found a schedule.
    pub dropped: usize,
}

/// Lowest objective among solvers that found a schedule; ties go to the
/// shorter solve time, then to portfolio order.
pub fn label_of(cells: &[SolverCell; 3]) -> Option<SolverId> {
    SolverId::ALL
        .into_iter()
        .filter_map(|s| cells[s.index()].value().map(|v| (v, cells[s.index()].solve_time_ms, s)))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)))
        .map(|(_, _, s)| s)
}

fn canonical_features(f: FeatureVector) -> FeatureVector {
    FeatureVector {
        p_max: round12(f.p_max),
        p_mean: round12(f.p_mean),
        p_min: round12(f.p_min),
        e_max: round12(f.e_max),
        e_mean: round12(f.e_mean),
        e_min: round12(f.e_min),
        time_window: round12(f.time_window),
        overlap: round12(f.overlap),
        ..f
    }
}

/// Attaches features and labels. Reals are rounded to the 12 digits the
/// dataset file keeps, so written and re-read rows compare equal.
pub fn label_rows(results: &[ResultRow], instances: &BTreeMap<String, Instance>) -> Result<Labeled> {
    let mut out = Labeled {
        rows: Vec::with_capacity(results.len()),
        dropped: 0,
    };
    for r in results {
        let Some(label) = label_of(&r.cells) else {
            out.dropped += 1;
            continue;
        };
        let inst = instances
            .get(&r.id)
            .ok_or_else(|| Error::Config(format!("no instance for result row `{}`", r.id)))?;
        out.rows.push(DatasetRow {
            id: r.id.clone(),
            features: canonical_features(extract_features(inst)?),
            cells: SolverId::ALL.map(|s| {
                let c = r.cell(s);
                DatasetCell {
                    status: c.status,
                    objective: c.value().map(round12),
                    solve_time_ms: c.solve_time_ms,
                }
            }),
            label,
        });
    }
    Ok(out)
}

pub const DATASET_HEADER: &str = "id,n_jobs,n_machines,rddd,n_speeds,p_max,p_mean,p_min,e_max,e_mean,e_min,mk_ub,mk_lb,en_ub,en_lb,tt_ub,time_window,overlap,bnb_status,bnb_obj,bnb_ms,gls_status,gls_obj,gls_ms,sa_status,sa_obj,sa_ms,label";

fn check_header(found: &csv::StringRecord, expected: &[String], what: &str) -> Result<()> {
    if found.iter().eq(expected.iter().map(String::as_str)) {
        return Ok(());
    }
    let missing: Vec<&str> = expected
        .iter()
        .map(String::as_str)
        .filter(|c| !found.iter().any(|f| f == *c))
        .collect();
    let unknown: Vec<&str> = found.iter().filter(|f| !expected.iter().any(|c| c == f)).collect();
    Err(Error::SchemaMismatch(if missing.is_empty() && unknown.is_empty() {
        format!("{what} columns out of order")
    } else {
        format!("{what}: missing columns {missing:?}, unknown columns {unknown:?}")
    }))
}

fn parse<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    rec[i]
        .parse()
        .map_err(|e| Error::SchemaMismatch(format!("line {line}, column {}: `{}`: {e}", i + 1, &rec[i])))
}

fn parse_opt<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if rec[i].is_empty() {
        Ok(None)
    } else {
        parse(rec, i, line).map(Some)
    }
}

fn opt_real(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

pub fn write_dataset_to<W: Write>(w: W, rows: &[DatasetRow]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(DATASET_HEADER.split(','))?;
    for r in rows {
        let f = &r.features;
        let mut rec = vec![
            r.id.clone(),
            f.n_jobs.to_string(),
            f.n_machines.to_string(),
            f.rddd_level.to_string(),
            f.n_speeds.to_string(),
        ];
        rec.extend([f.p_max, f.p_mean, f.p_min, f.e_max, f.e_mean, f.e_min].map(format_real));
        rec.extend([f.mk_ub, f.mk_lb, f.en_ub, f.en_lb, f.tt_ub].map(|v| v.to_string()));
        rec.push(format_real(f.time_window));
        rec.push(format_real(f.overlap));
        for c in &r.cells {
            rec.push(c.status.tag().to_string());
            rec.push(opt_real(c.objective));
            rec.push(c.solve_time_ms.to_string());
        }
        rec.push(r.label.tag().to_string());
        wr.write_record(&rec)?;
    }
    wr.flush().map_err(|e| Error::io("<dataset>", e))?;
    Ok(())
}

pub fn read_dataset_from<R: Read>(r: R) -> Result<Vec<DatasetRow>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let expected: Vec<String> = DATASET_HEADER.split(',').map(String::from).collect();
    check_header(rd.headers()?, &expected, "dataset")?;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != expected.len() {
            return Err(Error::SchemaMismatch(format!("line {line}: {} fields", rec.len())));
        }
        let mut v = [0.0; 17];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = parse::<f64>(&rec, k + 1, line)?;
        }
        let features = FeatureVector::from_slice(&v)?;
        let mut out_cells = Vec::with_capacity(3);
        for base in [18, 21, 24] {
            out_cells.push(DatasetCell {
                status: parse(&rec, base, line)?,
                objective: parse_opt(&rec, base + 1, line)?,
                solve_time_ms: parse(&rec, base + 2, line)?,
            });
        }
        rows.push(DatasetRow {
            id: rec[0].to_string(),
            features,
            cells: [out_cells[0], out_cells[1], out_cells[2]],
            label: parse(&rec, 27, line)?,
        });
    }
    Ok(rows)
}

pub fn write_dataset(path: &Path, rows: &[DatasetRow]) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset_to(std::io::BufWriter::new(f), rows)
}

pub fn read_dataset(path: &Path) -> Result<Vec<DatasetRow>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset_from(std::io::BufReader::new(f))
}

const RESULT_CELL_COLUMNS: [&str; 8] = [
    "status",
    "obj",
    "makespan",
    "energy",
    "tardiness",
    "ms",
    "budget_ms",
    "note",
];

pub fn results_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "id",
        "n_jobs",
        "n_machines",
        "rddd",
        "n_speeds",
        "mk_ub",
        "mk_lb",
        "en_ub",
        "en_lb",
    ]
    .map(String::from)
    .to_vec();
    for s in SolverId::ALL {
        h.extend(RESULT_CELL_COLUMNS.iter().map(|c| format!("{}_{c}", s.tag())));
    }
    h
}

/// Results keep full float precision so labels computed from the file match
/// labels computed in memory.
pub fn write_results_to<W: Write>(w: W, rows: &[ResultRow]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(results_header())?;
    for r in rows {
        let bounds = r.cells.iter().find_map(|c| c.objective.map(|o| o.bounds));
        let mut rec = vec![
            r.id.clone(),
            r.n_jobs.to_string(),
            r.n_machines.to_string(),
            r.rddd.to_string(),
            r.n_speeds.to_string(),
        ];
        match bounds {
            Some(b) => rec.extend([b.mk_ub, b.mk_lb, b.en_ub, b.en_lb].map(|v| v.to_string())),
            None => rec.extend(std::iter::repeat(String::new()).take(4)),
        }
        for c in &r.cells {
            rec.push(c.status.tag().to_string());
            match &c.objective {
                Some(o) => {
                    rec.push(o.scalarized.to_string());
                    rec.push(o.makespan.to_string());
                    rec.push(o.energy.to_string());
                    rec.push(o.tardiness.to_string());
                }
                None => rec.extend(std::iter::repeat(String::new()).take(4)),
            }
            rec.push(c.solve_time_ms.to_string());
            rec.push(c.budget_ms.to_string());
            rec.push(c.note.clone().unwrap_or_default());
        }
        wr.write_record(&rec)?;
    }
    wr.flush().map_err(|e| Error::io("<results>", e))?;
    Ok(())
}

pub fn read_results_from<R: Read>(r: R) -> Result<Vec<ResultRow>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let expected = results_header();
    check_header(rd.headers()?, &expected, "results")?;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != expected.len() {
            return Err(Error::SchemaMismatch(format!("line {line}: {} fields", rec.len())));
        }
        let bounds = match parse_opt::<i64>(&rec, 5, line)? {
            Some(mk_ub) => Some(ObjectiveBounds {
                mk_ub,
                mk_lb: parse(&rec, 6, line)?,
                en_ub: parse(&rec, 7, line)?,
                en_lb: parse(&rec, 8, line)?,
            }),
            None => None,
        };
        let mut cells = Vec::with_capacity(3);
        for k in 0..3 {
            let b = 9 + 8 * k;
            let objective = match (parse_opt::<f64>(&rec, b + 1, line)?, bounds) {
                (Some(scalarized), Some(bounds)) => Some(ObjectiveBreakdown {
                    makespan: parse(&rec, b + 2, line)?,
                    energy: parse(&rec, b + 3, line)?,
                    tardiness: parse(&rec, b + 4, line)?,
                    scalarized,
                    bounds,
                }),
                (None, _) => None,
                (Some(_), None) => {
                    return Err(Error::SchemaMismatch(format!("line {line}: objective without bounds")));
                }
            };
            cells.push(SolverCell {
                status: parse(&rec, b, line)?,
                objective,
                solve_time_ms: parse(&rec, b + 5, line)?,
                budget_ms: parse(&rec, b + 6, line)?,
                note: Some(rec[b + 7].to_string()).filter(|s| !s.is_empty()),
            });
        }
        rows.push(ResultRow {
            id: rec[0].to_string(),
            n_jobs: parse(&rec, 1, line)?,
            n_machines: parse(&rec, 2, line)?,
            rddd: parse(&rec, 3, line)?,
            n_speeds: parse(&rec, 4, line)?,
            cells: [cells[0].clone(), cells[1].clone(), cells[2].clone()],
        });
    }
    Ok(rows)
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_results_to(std::io::BufWriter::new(f), rows)
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_results_from(std::io::BufReader::new(f))
}
