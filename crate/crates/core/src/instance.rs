//! Energy-aware job-shop instances.
//!
//! Every job visits every machine exactly once. Task `t` of job `j` is the
//! `t`-th operation along the job's route and runs on machine `routes[j][t]`.
//! Processing times and energies are indexed `[job][task][speed]`; speed 0 is
//! the slowest (longest, cheapest) setting and higher indices run faster at a
//! higher energy cost.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integral time unit shared by processing times, starts and windows.
pub type Time = i64;

/// Release/due-date granularity: none, one window per job, or one per task.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum RdddLevel {
    None = 0,
    JobLevel = 1,
    OpLevel = 2,
}

impl RdddLevel {
    pub const ALL: [RdddLevel; 3] = [RdddLevel::None, RdddLevel::JobLevel, RdddLevel::OpLevel];

    pub fn as_u8(self) -> u8 {
        self as u8
    }
}

impl TryFrom<u8> for RdddLevel {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(RdddLevel::None),
            1 => Ok(RdddLevel::JobLevel),
            2 => Ok(RdddLevel::OpLevel),
            other => Err(format!("rddd_level must be 0, 1 or 2, got {other}")),
        }
    }
}

impl From<RdddLevel> for u8 {
    fn from(l: RdddLevel) -> u8 {
        l as u8
    }
}

/// Statistical family the base processing/energy tables were drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    Uniform,
    Normal,
    Exponential,
}

impl Distribution {
    pub const ALL: [Distribution; 3] = [Distribution::Uniform, Distribution::Normal, Distribution::Exponential];

    pub fn name(self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::Normal => "normal",
            Distribution::Exponential => "exponential",
        }
    }
}

impl std::str::FromStr for Distribution {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform" => Ok(Distribution::Uniform),
            "normal" => Ok(Distribution::Normal),
            "exponential" => Ok(Distribution::Exponential),
            other => Err(format!("unknown distribution `{other}`")),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub release: Time,
    pub due: Time,
}

impl Window {
    pub fn new(release: Time, due: Time) -> Self {
        Window { release, due }
    }

    pub fn len(&self) -> Time {
        self.due - self.release
    }
}

/// Time windows at the granularity given by the instance's rddd level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Windows {
    None,
    Job(Vec<Window>),
    Task(Vec<Vec<Window>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    pub n_jobs: usize,
    pub n_machines: usize,
    pub n_speeds: usize,
    pub rddd_level: RdddLevel,
    pub distribution: Distribution,
    pub seed: u64,
    pub routes: Vec<Vec<usize>>,
    pub proc: Vec<Vec<Vec<Time>>>,
    pub energy: Vec<Vec<Vec<i64>>>,
    pub windows: Windows,
}

impl Instance {
    pub fn n_tasks(&self) -> usize {
        self.n_jobs * self.n_machines
    }

    #[inline]
    pub fn machine(&self, job: usize, task: usize) -> usize {
        self.routes[job][task]
    }

    #[inline]
    pub fn p(&self, job: usize, task: usize, speed: usize) -> Time {
        self.proc[job][task][speed]
    }

    #[inline]
    pub fn e(&self, job: usize, task: usize, speed: usize) -> i64 {
        self.energy[job][task][speed]
    }

    pub fn min_p(&self, job: usize, task: usize) -> Time {
        self.proc[job][task].iter().copied().min().unwrap_or(0)
    }

    pub fn max_p(&self, job: usize, task: usize) -> Time {
        self.proc[job][task].iter().copied().max().unwrap_or(0)
    }

    pub fn min_e(&self, job: usize, task: usize) -> i64 {
        self.energy[job][task].iter().copied().min().unwrap_or(0)
    }

    pub fn max_e(&self, job: usize, task: usize) -> i64 {
        self.energy[job][task].iter().copied().max().unwrap_or(0)
    }

    /// Earliest start imposed by the time windows (0 when there are none).
    ///
    /// A job-level release date binds every task of the job; only the first
    /// one can actually be constrained by it.
    pub fn release(&self, job: usize, task: usize) -> Time {
        match &self.windows {
            Windows::None => 0,
            Windows::Job(w) => w[job].release,
            Windows::Task(w) => w[job][task].release,
        }
    }

    /// Due date charged against the completion of `(job, task)`, if any.
    ///
    /// Job-level due dates are charged on the job's final task only.
    pub fn due(&self, job: usize, task: usize) -> Option<Time> {
        match &self.windows {
            Windows::None => None,
            Windows::Job(w) => (task + 1 == self.n_machines).then(|| w[job].due),
            Windows::Task(w) => Some(w[job][task].due),
        }
    }

    /// `pos[j][m]` = index of the task of job `j` that runs on machine `m`.
    /// Only meaningful for valid instances.
    pub fn route_positions(&self) -> Vec<Vec<usize>> {
        self.routes
            .iter()
            .map(|route| {
                let mut pos = vec![0; self.n_machines];
                for (t, &m) in route.iter().enumerate() {
                    if m < self.n_machines {
                        pos[m] = t;
                    }
                }
                pos
            })
            .collect()
    }

    /// Canonical single-line JSON document with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(&InstanceFile::from(self)).expect("instance serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Instance> {
        let file: InstanceFile = serde_json::from_str(text)?;
        file.try_into().map_err(|m: String| Error::format("<instance>", m))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Instance> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: InstanceFile = serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?;
        file.try_into().map_err(|m: String| Error::format(path, m))
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}

/// On-disk layout. `release`/`due` are null (rddd 0), one integer per job
/// (rddd 1) or one array per job with one integer per task (rddd 2).
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    id: String,
    n_jobs: usize,
    n_machines: usize,
    n_speeds: usize,
    rddd_level: RdddLevel,
    distribution: Distribution,
    seed: u64,
    routes: Vec<Vec<usize>>,
    proc: Vec<Vec<Vec<Time>>>,
    energy: Vec<Vec<Vec<i64>>>,
    release: Option<WindowField>,
    due: Option<WindowField>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WindowField {
    Job(Vec<Time>),
    Task(Vec<Vec<Time>>),
}

impl From<&Instance> for InstanceFile {
    fn from(i: &Instance) -> Self {
        let (release, due) = match &i.windows {
            Windows::None => (None, None),
            Windows::Job(w) => (
                Some(WindowField::Job(w.iter().map(|x| x.release).collect())),
                Some(WindowField::Job(w.iter().map(|x| x.due).collect())),
            ),
            Windows::Task(w) => (
                Some(WindowField::Task(
                    w.iter().map(|r| r.iter().map(|x| x.release).collect()).collect(),
                )),
                Some(WindowField::Task(
                    w.iter().map(|r| r.iter().map(|x| x.due).collect()).collect(),
                )),
            ),
        };
        InstanceFile {
            id: i.id.clone(),
            n_jobs: i.n_jobs,
            n_machines: i.n_machines,
            n_speeds: i.n_speeds,
            rddd_level: i.rddd_level,
            distribution: i.distribution,
            seed: i.seed,
            routes: i.routes.clone(),
            proc: i.proc.clone(),
            energy: i.energy.clone(),
            release,
            due,
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = String;

    fn try_from(f: InstanceFile) -> std::result::Result<Self, String> {
        let windows = match (f.release, f.due) {
            (None, None) => Windows::None,
            (Some(WindowField::Job(r)), Some(WindowField::Job(d))) => {
                if r.len() != d.len() {
                    return Err("release and due have different lengths".into());
                }
                Windows::Job(r.into_iter().zip(d).map(|(r, d)| Window::new(r, d)).collect())
            }
            (Some(WindowField::Task(r)), Some(WindowField::Task(d))) => {
                if r.len() != d.len() || r.iter().zip(&d).any(|(a, b)| a.len() != b.len()) {
                    return Err("release and due have different shapes".into());
                }
                Windows::Task(
                    r.into_iter()
                        .zip(d)
                        .map(|(r, d)| r.into_iter().zip(d).map(|(r, d)| Window::new(r, d)).collect())
                        .collect(),
                )
            }
            _ => return Err("release and due must both be null or share one shape".into()),
        };
        Ok(Instance {
            id: f.id,
            n_jobs: f.n_jobs,
            n_machines: f.n_machines,
            n_speeds: f.n_speeds,
            rddd_level: f.rddd_level,
            distribution: f.distribution,
            seed: f.seed,
            routes: f.routes,
            proc: f.proc,
            energy: f.energy,
            windows,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    Shape,
    RouteNotPermutation,
    NonPositiveTime,
    NegativeEnergy,
    SpeedMonotonicity,
    WindowShape,
    WindowOrder,
    WindowTooShort,
    SpeedOutOfRange,
    NegativeStart,
    ReleaseDate,
    RoutePrecedence,
    MachineOverlap,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::Shape => "shape mismatch",
            ViolationKind::RouteNotPermutation => "route not a permutation",
            ViolationKind::NonPositiveTime => "non-positive processing time",
            ViolationKind::NegativeEnergy => "negative energy",
            ViolationKind::SpeedMonotonicity => "speed monotonicity",
            ViolationKind::WindowShape => "window shape",
            ViolationKind::WindowOrder => "due not after release",
            ViolationKind::WindowTooShort => "window shorter than minimum duration",
            ViolationKind::SpeedOutOfRange => "speed out of range",
            ViolationKind::NegativeStart => "negative start",
            ViolationKind::ReleaseDate => "start before release",
            ViolationKind::RoutePrecedence => "route precedence",
            ViolationKind::MachineOverlap => "machine overlap",
        }
    }
}

/// One broken invariant, located by (job, task, speed) where applicable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub kind: ViolationKind,
    pub job: Option<usize>,
    pub task: Option<usize>,
    pub speed: Option<usize>,
    pub detail: String,
}

impl Violation {
    pub(crate) fn new(
        kind: ViolationKind,
        job: Option<usize>,
        task: Option<usize>,
        speed: Option<usize>,
        detail: impl Into<String>,
    ) -> Self {
        Violation {
            kind,
            job,
            task,
            speed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        let idx: Vec<String> = [("j", self.job), ("t", self.task), ("s", self.speed)]
            .iter()
            .filter_map(|(n, v)| v.map(|v| format!("{n}={v}")))
            .collect();
        if !idx.is_empty() {
            write!(f, " [{}]", idx.join(","))?;
        }
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

/// Every violated instance invariant, sorted by (kind, job, task, speed).
pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Vec::new();
    let (nj, nm, ns) = (inst.n_jobs, inst.n_machines, inst.n_speeds);

    if nj == 0 || nm == 0 || ns == 0 {
        out.push(Violation::new(
            Shape,
            None,
            None,
            None,
            format!("dimensions must be positive, got {nj}x{nm}x{ns}"),
        ));
        return out;
    }

    let tensor_ok = |name: &str, t: &Vec<Vec<Vec<i64>>>, out: &mut Vec<Violation>| -> bool {
        let mut ok = true;
        if t.len() != nj {
            out.push(Violation::new(
                Shape,
                None,
                None,
                None,
                format!("{name} has {} jobs", t.len()),
            ));
            return false;
        }
        for (j, row) in t.iter().enumerate() {
            if row.len() != nm {
                out.push(Violation::new(
                    Shape,
                    Some(j),
                    None,
                    None,
                    format!("{name} has {} tasks", row.len()),
                ));
                ok = false;
                continue;
            }
            for (tk, cell) in row.iter().enumerate() {
                if cell.len() != ns {
                    out.push(Violation::new(
                        Shape,
                        Some(j),
                        Some(tk),
                        None,
                        format!("{name} has {} speeds", cell.len()),
                    ));
                    ok = false;
                }
            }
        }
        ok
    };
    let proc_ok = tensor_ok("proc", &inst.proc, &mut out);
    let energy_ok = tensor_ok("energy", &inst.energy, &mut out);

    if inst.routes.len() != nj {
        out.push(Violation::new(
            Shape,
            None,
            None,
            None,
            format!("routes has {} jobs", inst.routes.len()),
        ));
    } else {
        for (j, route) in inst.routes.iter().enumerate() {
            let mut seen = vec![false; nm];
            let perm = route.len() == nm && route.iter().all(|&m| m < nm && !std::mem::replace(&mut seen[m], true));
            if !perm {
                out.push(Violation::new(
                    RouteNotPermutation,
                    Some(j),
                    None,
                    None,
                    format!("{route:?} is not a permutation of 0..{nm}"),
                ));
            }
        }
    }

    if proc_ok {
        for j in 0..nj {
            for t in 0..nm {
                for s in 0..ns {
                    let p = inst.proc[j][t][s];
                    if p < 1 {
                        out.push(Violation::new(
                            NonPositiveTime,
                            Some(j),
                            Some(t),
                            Some(s),
                            format!("P={p}"),
                        ));
                    }
                    if s > 0 && p > inst.proc[j][t][s - 1] {
                        out.push(Violation::new(
                            SpeedMonotonicity,
                            Some(j),
                            Some(t),
                            Some(s),
                            format!("P increases from {} to {p}", inst.proc[j][t][s - 1]),
                        ));
                    }
                }
            }
        }
    }
    if energy_ok {
        for j in 0..nj {
            for t in 0..nm {
                for s in 0..ns {
                    let e = inst.energy[j][t][s];
                    if e < 0 {
                        out.push(Violation::new(
                            NegativeEnergy,
                            Some(j),
                            Some(t),
                            Some(s),
                            format!("E={e}"),
                        ));
                    }
                    if s > 0 && e < inst.energy[j][t][s - 1] {
                        out.push(Violation::new(
                            SpeedMonotonicity,
                            Some(j),
                            Some(t),
                            Some(s),
                            format!("E decreases from {} to {e}", inst.energy[j][t][s - 1]),
                        ));
                    }
                }
            }
        }
    }

    let check_window = |w: &Window, j: usize, t: Option<usize>, min_len: Option<Time>, out: &mut Vec<Violation>| {
        if w.due <= w.release {
            out.push(Violation::new(
                WindowOrder,
                Some(j),
                t,
                None,
                format!("release {} due {}", w.release, w.due),
            ));
        } else if let Some(min_len) = min_len {
            if w.len() < min_len {
                out.push(Violation::new(
                    WindowTooShort,
                    Some(j),
                    t,
                    None,
                    format!("window {} < minimum duration {min_len}", w.len()),
                ));
            }
        }
    };
    match (&inst.windows, inst.rddd_level) {
        (Windows::None, RdddLevel::None) => {}
        (Windows::Job(w), RdddLevel::JobLevel) if w.len() == nj => {
            for (j, win) in w.iter().enumerate() {
                let min_len = proc_ok.then(|| (0..nm).map(|t| inst.min_p(j, t)).sum());
                check_window(win, j, None, min_len, &mut out);
            }
        }
        (Windows::Task(w), RdddLevel::OpLevel) if w.len() == nj && w.iter().all(|r| r.len() == nm) => {
            for (j, row) in w.iter().enumerate() {
                for (t, win) in row.iter().enumerate() {
                    let min_len = proc_ok.then(|| inst.min_p(j, t));
                    check_window(win, j, Some(t), min_len, &mut out);
                }
            }
        }
        (w, level) => {
            let got = match w {
                Windows::None => "none".to_string(),
                Windows::Job(v) => format!("{} job windows", v.len()),
                Windows::Task(v) => format!("task windows for {} jobs", v.len()),
            };
            out.push(Violation::new(
                WindowShape,
                None,
                None,
                None,
                format!("rddd_level {} but {got}", level.as_u8()),
            ));
        }
    }

    out.sort();
    out
}
