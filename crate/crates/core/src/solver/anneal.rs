//! Simulated annealing over the critical-swap / speed neighborhood.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::active::{construct, Model};
use super::clock::Clock;
use super::neighborhood::{Move, Walker};
use super::{Incumbent, SearchStats};
use crate::schedule::{Schedule, Sequencing};

pub const SA_TARGET_ACCEPT: f64 = 0.8;
pub const SA_CALIBRATION_SAMPLES: usize = 30;
pub const SA_COOLING: f64 = 0.97;
pub const SA_COOLING_PERIOD: u64 = 100;
pub const SA_REHEAT_AFTER: u64 = 2000;
/// Reheats in a row without a new best before the search counts as converged.
pub const SA_STALE_REHEATS: u64 = 12;

const EPS: f64 = 1e-12;

/// Samples uphill deltas along a short accept-everything random walk from the
/// current state, then restores it. The temperature accepts the mean uphill
/// delta with the target probability.
fn initial_temperature(w: &mut Walker, moves: &mut Vec<Move>, rng: &mut ChaCha8Rng, clock: &mut Clock) -> f64 {
    let tasks = w.md.n_tasks() as u64;
    let saved = (w.seq.clone(), w.start.clone(), w.comps);
    let mut uphill = Vec::with_capacity(SA_CALIBRATION_SAMPLES);
    let mut any = Vec::new();
    for _ in 0..SA_CALIBRATION_SAMPLES * 10 {
        if uphill.len() == SA_CALIBRATION_SAMPLES || moves.is_empty() {
            break;
        }
        let mv = moves[rng.gen_range(0..moves.len())];
        clock.charge(tasks * 3);
        if w.try_move(mv) {
            let d = w.trial_value - w.value;
            if d > 0.0 {
                uphill.push(d);
            } else if d < 0.0 {
                any.push(-d);
            }
            w.accept();
            w.moves(moves);
            clock.charge(tasks * 4);
        }
    }
    w.reset(saved.0, saved.1, saved.2);
    w.moves(moves);
    let pool = if uphill.is_empty() { &any } else { &uphill };
    if pool.is_empty() {
        return 1e-3;
    }
    let mean = pool.iter().sum::<f64>() / pool.len() as f64;
    -mean / SA_TARGET_ACCEPT.ln()
}

pub(crate) fn search(
    md: &Model,
    rng: &mut ChaCha8Rng,
    root_lb: f64,
    clock: &mut Clock,
    stats: &mut SearchStats,
) -> Schedule {
    let tasks = md.n_tasks() as u64;
    let b = construct(md, Some(rng));
    clock.charge(tasks * md.nj as u64);
    let seq = Sequencing {
        machine_orders: b.orders,
        speeds: b.speed,
    };
    let mut w = Walker::new(md, seq, b.start, b.comps);
    let mut best = w.schedule();
    let mut best_value = w.value;
    stats.incumbents.push(Incumbent {
        elapsed_ms: clock.elapsed_ms(),
        value: best_value,
    });
    if best_value <= root_lb + EPS {
        return best;
    }
    let mut moves = Vec::new();
    w.moves(&mut moves);
    let mut t0 = None;
    let mut temp = 0.0;
    let (mut proposals, mut stale, mut stale_reheats) = (0u64, 0u64, 0u64);
    loop {
        if clock.tick() {
            break;
        }
        if moves.is_empty() {
            // Dead end: no move applies here. Start over from a fresh
            // construction; this counts as a reheat.
            stale_reheats += 1;
            stats.restarts += 1;
            if stale_reheats >= SA_STALE_REHEATS {
                break;
            }
            let b = construct(md, Some(rng));
            clock.charge(tasks * md.nj as u64);
            w.reset(
                Sequencing {
                    machine_orders: b.orders,
                    speeds: b.speed,
                },
                b.start,
                b.comps,
            );
            w.moves(&mut moves);
            clock.charge(tasks * 4);
            stale = 0;
            if w.value < best_value {
                best_value = w.value;
                best = w.schedule();
                stale_reheats = 0;
                stats.incumbents.push(Incumbent {
                    elapsed_ms: clock.elapsed_ms(),
                    value: best_value,
                });
                if best_value <= root_lb + EPS {
                    break;
                }
            }
            continue;
        }
        let t0 = match t0 {
            Some(t) => t,
            None => {
                temp = initial_temperature(&mut w, &mut moves, rng, clock);
                t0 = Some(temp);
                temp
            }
        };
        let mv = moves[rng.gen_range(0..moves.len())];
        proposals += 1;
        stats.moves_tried += 1;
        clock.charge(tasks * 3);
        if proposals % SA_COOLING_PERIOD == 0 {
            temp *= SA_COOLING;
        }
        if w.try_move(mv) {
            let delta = w.trial_value - w.value;
            if delta <= 0.0 || rng.gen::<f64>() < (-delta / temp).exp() {
                w.accept();
                w.moves(&mut moves);
                clock.charge(tasks * 4);
            } else {
                w.reject(mv);
            }
        }
        if w.value < best_value {
            best_value = w.value;
            best = w.schedule();
            stale = 0;
            stale_reheats = 0;
            stats.incumbents.push(Incumbent {
                elapsed_ms: clock.elapsed_ms(),
                value: best_value,
            });
            if best_value <= root_lb + EPS {
                break;
            }
        } else {
            stale += 1;
        }
        if stale >= SA_REHEAT_AFTER {
            temp = t0;
            stale = 0;
            stale_reheats += 1;
            stats.restarts += 1;
            if stale_reheats >= SA_STALE_REHEATS {
                break;
            }
        }
    }
    best
}
