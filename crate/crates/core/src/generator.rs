//! Seeded benchmark generation over a configuration grid.
//!
//! Every instance is a pure function of its [`GeneratorConfig`]. Independent
//! ChaCha streams of the instance seed drive the routes, the base processing
//! times, the base energies and the time windows, so changing one table never
//! perturbs another.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Distribution, Instance, RdddLevel, Time, Window, Windows};

const STREAM_ROUTES: u64 = 1;
const STREAM_PROC: u64 = 2;
const STREAM_ENERGY: u64 = 3;
const STREAM_WINDOWS: u64 = 4;

/// Fixed 64-bit finalizer (SplitMix64) used for all seed derivation.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Window construction knobs. Defaults: release dates up to half the job's
/// slowest-speed work, window length 1.0–1.5 times that work.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowParams {
    pub release_fraction: f64,
    pub tightness_min: f64,
    pub tightness_max: f64,
}

impl Default for WindowParams {
    fn default() -> Self {
        WindowParams {
            release_fraction: 0.5,
            tightness_min: 1.0,
            tightness_max: 1.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub n_jobs: usize,
    pub n_machines: usize,
    pub rddd_level: RdddLevel,
    pub n_speeds: usize,
    pub distribution: Distribution,
    pub seed: u64,
    pub windows: WindowParams,
}

impl GeneratorConfig {
    pub fn new(
        n_jobs: usize,
        n_machines: usize,
        rddd_level: RdddLevel,
        n_speeds: usize,
        distribution: Distribution,
        seed: u64,
    ) -> Self {
        GeneratorConfig {
            n_jobs,
            n_machines,
            rddd_level,
            n_speeds,
            distribution,
            seed,
            windows: WindowParams::default(),
        }
    }

    /// `J{j}_M{m}_R{r}_S{s}_{dist}_{seed}`; also the instance file stem.
    pub fn id(&self) -> String {
        format!(
            "J{}_M{}_R{}_S{}_{}_{}",
            self.n_jobs,
            self.n_machines,
            self.rddd_level.as_u8(),
            self.n_speeds,
            self.distribution,
            self.seed
        )
    }
}

/// The six axes of a benchmark grid plus the replicate count and master seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkGrid {
    pub jobs: Vec<usize>,
    pub machines: Vec<usize>,
    pub rddd: Vec<RdddLevel>,
    pub speeds: Vec<usize>,
    pub distributions: Vec<Distribution>,
    pub seeds_per_cell: usize,
    #[serde(default)]
    pub master_seed: u64,
}

impl BenchmarkGrid {
    /// 6 x 6 x 3 x 3 x 3 x 10 = 9720 configurations.
    pub fn paper() -> Self {
        BenchmarkGrid {
            jobs: vec![5, 10, 20, 25, 50, 100],
            machines: vec![5, 10, 20, 25, 50, 100],
            rddd: RdddLevel::ALL.to_vec(),
            speeds: vec![1, 3, 5],
            distributions: Distribution::ALL.to_vec(),
            seeds_per_cell: 10,
            master_seed: 0,
        }
    }

    /// Desk-scale grid: 3 x 3 x 3 x 2 x 3 x 10 = 1620 configurations.
    pub fn desk() -> Self {
        BenchmarkGrid {
            jobs: vec![3, 5, 8],
            machines: vec![3, 5, 8],
            rddd: RdddLevel::ALL.to_vec(),
            speeds: vec![1, 3],
            distributions: Distribution::ALL.to_vec(),
            seeds_per_cell: 10,
            master_seed: 0,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.jobs.len()
            * self.machines.len()
            * self.rddd.len()
            * self.speeds.len()
            * self.distributions.len()
            * self.seeds_per_cell
    }

    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("jobs", self.jobs.is_empty()),
            ("machines", self.machines.is_empty()),
            ("rddd", self.rddd.is_empty()),
            ("speeds", self.speeds.is_empty()),
            ("distributions", self.distributions.is_empty()),
        ];
        if let Some((axis, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::Config(format!("grid axis `{axis}` is empty")));
        }
        if self.seeds_per_cell == 0 {
            return Err(Error::Config("seeds_per_cell must be at least 1".into()));
        }
        if self
            .jobs
            .iter()
            .chain(&self.machines)
            .chain(&self.speeds)
            .any(|&v| v == 0)
        {
            return Err(Error::Config("jobs, machines and speeds must be positive".into()));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let grid: BenchmarkGrid = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::format(path, e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("grid serialization cannot fail")
    }
}

/// Seed of the `replicate`-th instance of a grid cell.
pub fn replicate_seed(
    master_seed: u64,
    n_jobs: usize,
    n_machines: usize,
    rddd: RdddLevel,
    n_speeds: usize,
    dist: Distribution,
    replicate: usize,
) -> u64 {
    let cell = [
        n_jobs as u64,
        n_machines as u64,
        rddd.as_u8() as u64,
        n_speeds as u64,
        dist as u64,
    ]
    .iter()
    .fold(splitmix64(master_seed), |h, &v| splitmix64(h ^ v));
    splitmix64(cell ^ splitmix64(replicate as u64))
}

/// Cartesian product in (jobs, machines, rddd, speeds, dist, replicate) order.
pub fn enumerate_grid(grid: &BenchmarkGrid) -> Vec<GeneratorConfig> {
    let mut out = Vec::with_capacity(grid.cardinality());
    for &j in &grid.jobs {
        for &m in &grid.machines {
            for &r in &grid.rddd {
                for &s in &grid.speeds {
                    for &d in &grid.distributions {
                        for q in 0..grid.seeds_per_cell {
                            let seed = replicate_seed(grid.master_seed, j, m, r, s, d, q);
                            out.push(GeneratorConfig::new(j, m, r, s, d, seed));
                        }
                    }
                }
            }
        }
    }
    out
}

/// One draw from the distribution family, as a positive integer.
pub fn sample_value<R: Rng>(dist: Distribution, rng: &mut R) -> i64 {
    match dist {
        Distribution::Uniform => rng.gen_range(1..=99),
        Distribution::Normal => {
            let n = Normal::new(50.0f64, 15.0).expect("valid normal");
            (n.sample(rng).round() as i64).clamp(1, 99)
        }
        Distribution::Exponential => {
            let e = Exp::new(1.0f64 / 50.0).expect("valid exponential");
            (e.sample(rng).round() as i64).clamp(1, 297)
        }
    }
}

/// Base (speed-independent) processing times and energies, `[job][task]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseTables {
    pub proc: Vec<Vec<i64>>,
    pub energy: Vec<Vec<i64>>,
}

pub fn sample_base_tables(config: &GeneratorConfig) -> BaseTables {
    let draw = |id| {
        let mut rng = stream(config.seed, id);
        (0..config.n_jobs)
            .map(|_| {
                (0..config.n_machines)
                    .map(|_| sample_value(config.distribution, &mut rng))
                    .collect()
            })
            .collect()
    };
    BaseTables {
        proc: draw(STREAM_PROC),
        energy: draw(STREAM_ENERGY),
    }
}

/// Speed `s` runs `1 + 0.5 s` times faster and costs that factor squared in
/// energy. A repair pass keeps time non-increasing and energy non-decreasing
/// in the speed index after rounding.
pub fn build_speed_tables(
    base_proc: &[Vec<i64>],
    base_energy: &[Vec<i64>],
    n_speeds: usize,
) -> (Vec<Vec<Vec<Time>>>, Vec<Vec<Vec<i64>>>) {
    let factors: Vec<f64> = (0..n_speeds).map(|s| 1.0 + 0.5 * s as f64).collect();
    let proc = base_proc
        .iter()
        .map(|row| {
            row.iter()
                .map(|&p| {
                    let mut v: Vec<Time> = factors
                        .iter()
                        .map(|f| ((p as f64 / f).round() as Time).max(1))
                        .collect();
                    for s in 1..v.len() {
                        v[s] = v[s].min(v[s - 1]);
                    }
                    v
                })
                .collect()
        })
        .collect();
    let energy = base_energy
        .iter()
        .map(|row| {
            row.iter()
                .map(|&e| {
                    let mut v: Vec<i64> = factors.iter().map(|f| (e as f64 * f * f).round() as i64).collect();
                    for s in 1..v.len() {
                        v[s] = v[s].max(v[s - 1]);
                    }
                    v
                })
                .collect()
        })
        .collect();
    (proc, energy)
}

fn job_window<R: Rng>(work: Time, params: &WindowParams, rng: &mut R) -> Window {
    let max_release = (work as f64 * params.release_fraction).floor() as Time;
    let release = rng.gen_range(0..=max_release.max(0));
    let tau = if params.tightness_max > params.tightness_min {
        rng.gen_range(params.tightness_min..params.tightness_max)
    } else {
        params.tightness_min
    };
    let len = ((tau * work as f64).ceil() as Time).max(1);
    Window::new(release, release + len)
}

/// Release/due dates for an instance whose routes and speed tables are set.
pub fn generate_windows<R: Rng>(
    proc: &[Vec<Vec<Time>>],
    rddd: RdddLevel,
    params: &WindowParams,
    rng: &mut R,
) -> Windows {
    let slowest = |row: &Vec<Vec<Time>>| -> Vec<Time> { row.iter().map(|p| p[0]).collect() };
    match rddd {
        RdddLevel::None => Windows::None,
        RdddLevel::JobLevel => Windows::Job(
            proc.iter()
                .map(|row| job_window(slowest(row).iter().sum(), params, rng))
                .collect(),
        ),
        RdddLevel::OpLevel => Windows::Task(
            proc.iter()
                .map(|row| {
                    let p = slowest(row);
                    let work: Time = p.iter().sum();
                    let job = job_window(work, params, rng);
                    slice_window(job, &p, row)
                })
                .collect(),
        ),
    }
}

/// Cuts a job window into consecutive task windows proportional to the
/// cumulative slowest-speed work, widening any slice shorter than the task's
/// fastest duration.
fn slice_window(job: Window, slow: &[Time], speeds: &[Vec<Time>]) -> Vec<Window> {
    let work: Time = slow.iter().sum();
    let len = job.len() as i128;
    let mut cum: Time = 0;
    slow.iter()
        .zip(speeds)
        .map(|(&p, row)| {
            let lo = job.release + (len * cum as i128 / work as i128) as Time;
            cum += p;
            let hi = job.release + ((len * cum as i128 + work as i128 - 1) / work as i128) as Time;
            let min_p = row.iter().copied().min().unwrap_or(1);
            Window::new(lo, hi.max(lo + min_p))
        })
        .collect()
}

pub fn generate_instance(config: &GeneratorConfig) -> Instance {
    let mut route_rng = stream(config.seed, STREAM_ROUTES);
    let routes = (0..config.n_jobs)
        .map(|_| {
            let mut r: Vec<usize> = (0..config.n_machines).collect();
            r.shuffle(&mut route_rng);
            r
        })
        .collect();
    let base = sample_base_tables(config);
    let (proc, energy) = build_speed_tables(&base.proc, &base.energy, config.n_speeds);
    let windows = generate_windows(
        &proc,
        config.rddd_level,
        &config.windows,
        &mut stream(config.seed, STREAM_WINDOWS),
    );
    Instance {
        id: config.id(),
        n_jobs: config.n_jobs,
        n_machines: config.n_machines,
        n_speeds: config.n_speeds,
        rddd_level: config.rddd_level,
        distribution: config.distribution,
        seed: config.seed,
        routes,
        proc,
        energy,
        windows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::validate_instance;

    #[test]
    fn paper_grid_has_9720_cells() {
        assert_eq!(enumerate_grid(&BenchmarkGrid::paper()).len(), 9720);
    }

    #[test]
    fn desk_grid_has_1620_cells() {
        let g = BenchmarkGrid::desk();
        assert_eq!(enumerate_grid(&g).len(), 1620);
        assert_eq!(g.cardinality(), 3 * 3 * 3 * 2 * 3 * 10);
    }

    #[test]
    fn singleton_grid() {
        let g = BenchmarkGrid {
            jobs: vec![4],
            machines: vec![2],
            rddd: vec![RdddLevel::None],
            speeds: vec![1],
            distributions: vec![Distribution::Normal],
            seeds_per_cell: 1,
            master_seed: 3,
        };
        let cfgs = enumerate_grid(&g);
        assert_eq!(cfgs.len(), 1);
        assert_eq!(cfgs[0].n_jobs, 4);
    }

    #[test]
    fn grid_order_is_lexicographic() {
        let g = BenchmarkGrid::desk();
        let cfgs = enumerate_grid(&g);
        assert_eq!(cfgs[0].n_jobs, 3);
        assert_eq!(cfgs[1].n_jobs, 3);
        assert_ne!(cfgs[0].seed, cfgs[1].seed);
        assert_eq!(cfgs[10].distribution, Distribution::Normal);
        assert_eq!(cfgs.last().unwrap().n_jobs, 8);
        assert_eq!(cfgs.last().unwrap().distribution, Distribution::Exponential);
    }

    #[test]
    fn grid_toml_round_trip() {
        let g = BenchmarkGrid::desk();
        assert_eq!(BenchmarkGrid::from_toml(&g.to_toml()).unwrap(), g);
        let bad = g.to_toml().replace("seeds_per_cell = 10", "seeds_per_cell = 0");
        assert!(BenchmarkGrid::from_toml(&bad).is_err());
    }

    #[test]
    fn speed_law_example() {
        let (p, e) = build_speed_tables(&[vec![10]], &[vec![4]], 3);
        assert_eq!(p[0][0], vec![10, 7, 5]);
        assert_eq!(e[0][0], vec![4, 9, 16]);
        let (p, e) = build_speed_tables(&[vec![13]], &[vec![6]], 1);
        assert_eq!((p[0][0].clone(), e[0][0].clone()), (vec![13], vec![6]));
    }

    #[test]
    fn uniform_draws_in_range_with_expected_mean() {
        let mut rng = stream(99, 0);
        let draws: Vec<i64> = (0..10_000)
            .map(|_| sample_value(Distribution::Uniform, &mut rng))
            .collect();
        assert!(draws.iter().all(|&v| (1..=99).contains(&v)));
        let mean = draws.iter().sum::<i64>() as f64 / draws.len() as f64;
        assert!((mean - 50.0).abs() <= 2.0, "mean {mean}");
    }

    #[test]
    fn clamped_families() {
        let mut rng = stream(5, 0);
        for _ in 0..10_000 {
            assert!((1..=99).contains(&sample_value(Distribution::Normal, &mut rng)));
            assert!((1..=297).contains(&sample_value(Distribution::Exponential, &mut rng)));
        }
    }

    #[test]
    fn base_tables_deterministic() {
        let c = GeneratorConfig::new(4, 3, RdddLevel::None, 1, Distribution::Exponential, 42);
        assert_eq!(sample_base_tables(&c), sample_base_tables(&c));
        let mut d = c.clone();
        d.seed = 43;
        assert_ne!(sample_base_tables(&c), sample_base_tables(&d));
    }

    #[test]
    fn single_task_job_window() {
        // W = 7, release drawn as 3, tightness 1.0 -> due 10.
        let w = slice_window(Window::new(3, 10), &[7], &[vec![7]]);
        assert_eq!(w, vec![Window::new(3, 10)]);
        let params = WindowParams {
            release_fraction: 0.5,
            tightness_min: 1.0,
            tightness_max: 1.0,
        };
        let mut rng = stream(1, 0);
        for _ in 0..50 {
            let w = job_window(7, &params, &mut rng);
            assert!((0..=3).contains(&w.release));
            assert_eq!(w.len(), 7);
        }
    }

    #[test]
    fn no_windows_at_level_zero() {
        let i = generate_instance(&GeneratorConfig::new(
            3,
            3,
            RdddLevel::None,
            3,
            Distribution::Uniform,
            8,
        ));
        assert_eq!(i.windows, Windows::None);
    }

    #[test]
    fn generated_instances_validate() {
        let i = generate_instance(&GeneratorConfig::new(
            2,
            2,
            RdddLevel::None,
            1,
            Distribution::Uniform,
            1,
        ));
        assert!(validate_instance(&i).is_empty());
        let i = generate_instance(&GeneratorConfig::new(
            5,
            5,
            RdddLevel::OpLevel,
            3,
            Distribution::Normal,
            7,
        ));
        assert!(validate_instance(&i).is_empty(), "{:?}", validate_instance(&i));
        assert_eq!(i.id, "J5_M5_R2_S3_normal_7");
    }

    #[test]
    fn generation_is_byte_identical() {
        let c = GeneratorConfig::new(6, 4, RdddLevel::JobLevel, 5, Distribution::Normal, 1234);
        assert_eq!(generate_instance(&c).to_json(), generate_instance(&c).to_json());
    }
}
