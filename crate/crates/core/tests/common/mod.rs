//! Independent straight-line recomputations used as test oracles, plus
//! seeded instance and sequencing builders.
#![allow(dead_code)]

use greenjsp::{generate_instance, Distribution, GeneratorConfig, Instance, RdddLevel, Schedule, Windows};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seeded instance with the given maxima on jobs, machines and speeds.
pub fn small_instance(seed: u64, max_j: usize, max_m: usize, max_s: usize) -> Instance {
    let mut r = rng(seed ^ 0x5eed);
    let cfg = GeneratorConfig::new(
        r.gen_range(1..=max_j),
        r.gen_range(1..=max_m),
        RdddLevel::ALL[r.gen_range(0..3)],
        r.gen_range(1..=max_s),
        Distribution::ALL[r.gen_range(0..3)],
        seed,
    );
    generate_instance(&cfg)
}

pub fn instance_of(j: usize, m: usize, rddd: u8, s: usize, seed: u64) -> Instance {
    let cfg = GeneratorConfig::new(
        j,
        m,
        RdddLevel::ALL[rddd as usize],
        s,
        Distribution::ALL[(seed % 3) as usize],
        seed,
    );
    generate_instance(&cfg)
}

/// Machine orders from a random dispatch sequence, which is always acyclic,
/// plus uniformly random speeds.
pub fn random_sequencing<R: Rng>(inst: &Instance, r: &mut R) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut next = vec![0; inst.n_jobs];
    let mut orders = vec![Vec::new(); inst.n_machines];
    let mut open: Vec<usize> = (0..inst.n_jobs).collect();
    while !open.is_empty() {
        let k = r.gen_range(0..open.len());
        let j = open[k];
        orders[inst.routes[j][next[j]]].push(j);
        next[j] += 1;
        if next[j] == inst.n_machines {
            open.swap_remove(k);
        }
    }
    let speeds = (0..inst.n_jobs)
        .map(|_| (0..inst.n_machines).map(|_| r.gen_range(0..inst.n_speeds)).collect())
        .collect();
    (orders, speeds)
}

/// Random starts and speeds, no attempt at feasibility.
pub fn random_schedule<R: Rng>(inst: &Instance, horizon: i64, r: &mut R) -> Schedule {
    Schedule {
        start: (0..inst.n_jobs)
            .map(|_| (0..inst.n_machines).map(|_| r.gen_range(0..=horizon)).collect())
            .collect(),
        speed: (0..inst.n_jobs)
            .map(|_| (0..inst.n_machines).map(|_| r.gen_range(0..inst.n_speeds)).collect())
            .collect(),
    }
}

fn release(inst: &Instance, j: usize, t: usize) -> i64 {
    match &inst.windows {
        Windows::None => 0,
        Windows::Job(w) => w[j].release,
        Windows::Task(w) => w[j][t].release,
    }
}

/// Pairwise interval check of every constraint.
pub fn oracle_feasible(inst: &Instance, s: &Schedule) -> bool {
    let (nj, nm) = (inst.n_jobs, inst.n_machines);
    let mut tasks = Vec::new();
    for j in 0..nj {
        for t in 0..nm {
            let sp = s.speed[j][t];
            if sp >= inst.n_speeds || s.start[j][t] < 0 {
                return false;
            }
            let st = s.start[j][t];
            let c = st + inst.proc[j][t][sp];
            if st < release(inst, j, t) {
                return false;
            }
            if t > 0 {
                let prev = s.start[j][t - 1] + inst.proc[j][t - 1][s.speed[j][t - 1]];
                if st < prev {
                    return false;
                }
            }
            tasks.push((inst.routes[j][t], st, c));
        }
    }
    for a in 0..tasks.len() {
        for b in a + 1..tasks.len() {
            let (ma, sa, ca) = tasks[a];
            let (mb, sb, cb) = tasks[b];
            if ma == mb && sa < cb && sb < ca {
                return false;
            }
        }
    }
    true
}

/// (makespan, energy, tardiness)
pub fn oracle_components(inst: &Instance, s: &Schedule) -> (i64, i64, i64) {
    let mut mk = 0;
    let mut en = 0;
    let mut tt = 0;
    for j in 0..inst.n_jobs {
        for t in 0..inst.n_machines {
            let sp = s.speed[j][t];
            let c = s.start[j][t] + inst.proc[j][t][sp];
            mk = mk.max(c);
            en += inst.energy[j][t][sp];
            match &inst.windows {
                Windows::None => {}
                Windows::Job(w) => {
                    if t + 1 == inst.n_machines {
                        tt += (c - w[j].due).max(0);
                    }
                }
                Windows::Task(w) => tt += (c - w[j][t].due).max(0),
            }
        }
    }
    (mk, en, tt)
}

/// (mk_ub, mk_lb, en_ub, en_lb)
pub fn oracle_bounds(inst: &Instance) -> (i64, i64, i64, i64) {
    let (mut mk_ub, mut mk_lb, mut en_ub, mut en_lb) = (0, 0, 0, 0);
    for j in 0..inst.n_jobs {
        let mut job_min = 0;
        for t in 0..inst.n_machines {
            let p = &inst.proc[j][t];
            let e = &inst.energy[j][t];
            mk_ub += p.iter().max().unwrap();
            job_min += p.iter().min().unwrap();
            en_ub += e.iter().max().unwrap();
            en_lb += e.iter().min().unwrap();
        }
        mk_lb = mk_lb.max(job_min);
    }
    (mk_ub, mk_lb, en_ub, en_lb)
}

pub fn oracle_scalarized(inst: &Instance, s: &Schedule) -> f64 {
    let (mk, en, tt) = oracle_components(inst, s);
    let (mk_ub, mk_lb, en_ub, en_lb) = oracle_bounds(inst);
    let term = |v: i64, lo: i64, hi: i64| {
        if hi == lo {
            0.0
        } else {
            (v - lo) as f64 / (hi - lo) as f64
        }
    };
    let tard = if mk_ub == 0 { 0.0 } else { tt as f64 / mk_ub as f64 };
    term(mk, mk_lb, mk_ub) + term(en, en_lb, en_ub) + tard
}

/// The 17 features from the raw tensors.
pub fn oracle_features(inst: &Instance) -> [f64; 17] {
    let (nj, nm) = (inst.n_jobs, inst.n_machines);
    let all_p: Vec<f64> = inst.proc.iter().flatten().flatten().map(|&v| v as f64).collect();
    let all_e: Vec<f64> = inst.energy.iter().flatten().flatten().map(|&v| v as f64).collect();
    let max = |v: &[f64]| v.iter().copied().fold(f64::MIN, f64::max);
    let min = |v: &[f64]| v.iter().copied().fold(f64::MAX, f64::min);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mk_ub, mk_lb, en_ub, en_lb) = oracle_bounds(inst);
    let slow = |j: usize, t: usize| inst.proc[j][t][0] as f64;
    let overlap = |a: (i64, i64), b: (i64, i64)| (a.1.min(b.1) - a.0.max(b.0)).max(0) as f64 / (a.1 - a.0) as f64;
    let (tt_ub, tw, ov) = match &inst.windows {
        Windows::None => (-1.0, -1.0, -1.0),
        Windows::Job(w) => {
            let tw = (0..nj)
                .map(|j| w[j].len() as f64 / (0..nm).map(|t| slow(j, t)).sum::<f64>())
                .sum::<f64>()
                / nj as f64;
            let mut total = 0.0;
            for a in 0..nj {
                for b in 0..nj {
                    if a != b {
                        total += overlap((w[a].release, w[a].due), (w[b].release, w[b].due));
                    }
                }
            }
            let ov = if nj < 2 { 0.0 } else { total / (nj * (nj - 1)) as f64 };
            (mk_ub as f64, tw, ov)
        }
        Windows::Task(w) => {
            let mut tw = 0.0;
            for j in 0..nj {
                for t in 0..nm {
                    tw += w[j][t].len() as f64 / slow(j, t);
                }
            }
            tw /= (nj * nm) as f64;
            let mut total = 0.0;
            for m in 0..nm {
                for a in 0..nj {
                    for b in 0..nj {
                        if a == b {
                            continue;
                        }
                        let ta = inst.routes[a].iter().position(|&x| x == m).unwrap();
                        let tb = inst.routes[b].iter().position(|&x| x == m).unwrap();
                        let (wa, wb) = (w[a][ta], w[b][tb]);
                        total += overlap((wa.release, wa.due), (wb.release, wb.due));
                    }
                }
            }
            let ov = if nj < 2 {
                0.0
            } else {
                total / (nj * (nj - 1) * nm) as f64
            };
            (mk_ub as f64, tw, ov)
        }
    };
    [
        nj as f64,
        nm as f64,
        inst.rddd_level.as_u8() as f64,
        inst.n_speeds as f64,
        max(&all_p),
        mean(&all_p),
        min(&all_p),
        max(&all_e),
        mean(&all_e),
        min(&all_e),
        mk_ub as f64,
        mk_lb as f64,
        en_ub as f64,
        en_lb as f64,
        tt_ub,
        tw,
        ov,
    ]
}

/// Exact for integer-valued entries, 1e-12 relative otherwise.
pub fn features_match(a: &[f64; 17], b: &[f64; 17]) -> bool {
    a.iter().zip(b).enumerate().all(|(i, (x, y))| {
        let integral = !matches!(i, 5 | 8 | 15 | 16);
        if integral {
            x == y
        } else {
            (x - y).abs() <= 1e-12 * x.abs().max(1.0)
        }
    })
}

pub fn shuffle<T, R: Rng>(v: &mut [T], r: &mut R) {
    v.shuffle(r);
}

/// Largest relative gap between the analytic MLP gradient and central
/// differences on `x, y`.
pub fn mlp_gradient_gap(net: &greenjsp::ml::mlp::Mlp, x: &[Vec<f64>], y: &[usize]) -> f64 {
    let analytic = net.gradient(x, y).params();
    let base = net.params();
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for i in 0..base.len() {
        let mut probe = net.clone();
        let mut p = base.clone();
        p[i] = base[i] + h;
        probe.set_params(&p);
        let up = probe.loss(x, y);
        p[i] = base[i] - h;
        probe.set_params(&p);
        let down = probe.loss(x, y);
        let numeric = (up - down) / (2.0 * h);
        let gap = (numeric - analytic[i]).abs() / (numeric.abs() + analytic[i].abs()).max(1e-7);
        worst = worst.max(gap);
    }
    worst
}

/// Two Gaussian-ish blobs per label in `d` dimensions.
pub fn blobs(n_per_class: usize, d: usize, classes: &[greenjsp::SolverId], seed: u64) -> greenjsp::LabeledDataset {
    let mut r = rng(seed);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (c, &label) in classes.iter().enumerate() {
        for _ in 0..n_per_class {
            x.push(
                (0..d)
                    .map(|k| if k % classes.len() == c { 6.0 } else { 0.0 } + r.gen_range(-1.0..1.0))
                    .collect(),
            );
            y.push(label);
        }
    }
    greenjsp::LabeledDataset::new(x, y).unwrap()
}
