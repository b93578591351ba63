//! Greedy construction followed by first-improvement descent with random
//! restarts.

use rand_chacha::ChaCha8Rng;

use super::active::{construct, Built, Model};
use super::clock::Clock;
use super::neighborhood::{Move, Walker};
use super::{Incumbent, SearchStats};
use crate::schedule::{Schedule, Sequencing};

/// Restarts in a row without a new best before the search counts as converged.
pub const GLS_STALE_RESTARTS: u64 = 40;

const EPS: f64 = 1e-12;

fn sequencing(b: &Built) -> Sequencing {
    Sequencing {
        machine_orders: b.orders.clone(),
        speeds: b.speed.clone(),
    }
}

pub(crate) fn search(
    md: &Model,
    rng: &mut ChaCha8Rng,
    root_lb: f64,
    clock: &mut Clock,
    stats: &mut SearchStats,
) -> Schedule {
    let tasks = md.n_tasks() as u64;
    let b = construct::<ChaCha8Rng>(md, None);
    clock.charge(tasks * md.nj as u64 * md.ns as u64 * 4);
    let mut w = Walker::new(md, sequencing(&b), b.start, b.comps);
    let mut best = w.schedule();
    let mut best_value = w.value;
    stats.incumbents.push(Incumbent {
        elapsed_ms: clock.elapsed_ms(),
        value: best_value,
    });
    let mut moves: Vec<Move> = Vec::new();
    let mut stale = 0;
    'outer: while best_value > root_lb + EPS && !clock.expired() {
        // Descend to a local optimum.
        loop {
            w.moves(&mut moves);
            clock.charge(tasks * 4);
            let mut improved = false;
            for &mv in &moves {
                stats.moves_tried += 1;
                clock.charge(tasks * 3);
                if clock.tick() {
                    break 'outer;
                }
                if !w.try_move(mv) {
                    continue;
                }
                if w.trial_value < w.value {
                    w.accept();
                    improved = true;
                    break;
                }
                w.reject(mv);
            }
            if w.value < best_value {
                best_value = w.value;
                best = w.schedule();
                stale = 0;
                stats.incumbents.push(Incumbent {
                    elapsed_ms: clock.elapsed_ms(),
                    value: best_value,
                });
                if best_value <= root_lb + EPS {
                    break 'outer;
                }
            }
            if !improved {
                break;
            }
        }
        stale += 1;
        if stale >= GLS_STALE_RESTARTS {
            break;
        }
        stats.restarts += 1;
        let b = construct(md, Some(rng));
        clock.charge(tasks * md.nj as u64);
        w.reset(sequencing(&b), b.start, b.comps);
    }
    best
}
