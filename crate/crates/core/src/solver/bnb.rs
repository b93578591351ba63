//! Depth-first branch-and-bound over active schedules and speed choices.

use super::active::{Model, Partial, Step};
use super::clock::Clock;
use super::{Incumbent, SearchStats};
use crate::instance::Time;
use crate::objective::Components;

const PRUNE_EPS: f64 = 1e-12;

struct Frame {
    node: Partial,
    steps: Vec<(f64, Step)>,
    next: usize,
    depth: usize,
}

pub(crate) struct BnbResult {
    pub best: Option<(Vec<Vec<Time>>, Vec<Vec<usize>>, Components)>,
    pub exhausted: bool,
}

fn expand(
    md: &Model,
    node: &Partial,
    scratch: &mut Partial,
    buf: &mut Vec<Step>,
    clock: &mut Clock,
) -> Vec<(f64, Step)> {
    node.branch(md, buf);
    let mut steps: Vec<(f64, Step)> = buf
        .iter()
        .map(|&st| {
            scratch.clone_from(node);
            scratch.apply(md, st);
            (scratch.lower_bound(md), st)
        })
        .collect();
    clock.charge((steps.len() * (md.n_tasks() + md.nm + md.nj)) as u64 + md.nj as u64);
    steps.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    steps
}

pub(crate) fn search(md: &Model, clock: &mut Clock, stats: &mut SearchStats) -> BnbResult {
    let root = Partial::root(md);
    let mut scratch = root.clone();
    let mut buf = Vec::new();
    let mut path: Vec<(usize, usize, usize, Time)> = Vec::with_capacity(md.n_tasks());
    let mut best_value = f64::INFINITY;
    let mut best = None;

    let steps = expand(md, &root, &mut scratch, &mut buf, clock);
    let mut stack = vec![Frame {
        node: root,
        steps,
        next: 0,
        depth: 0,
    }];
    stats.nodes_expanded += 1;
    let mut exhausted = true;
    while let Some(top) = stack.last_mut() {
        if clock.tick() {
            exhausted = false;
            break;
        }
        if top.next == top.steps.len() {
            stack.pop();
            continue;
        }
        let (lb, step) = top.steps[top.next];
        top.next += 1;
        if lb >= best_value - PRUNE_EPS {
            // Children are sorted by bound; the rest are pruned too.
            top.next = top.steps.len();
            continue;
        }
        path.truncate(top.depth);
        let mut child = top.node.clone();
        if let Some(placed) = child.apply(md, step) {
            path.push(placed);
        }
        if child.is_complete(md) {
            let comps = child.components();
            let value = md.norm.scalarize(comps);
            if value < best_value {
                best_value = value;
                let mut start = vec![vec![0; md.nm]; md.nj];
                let mut speed = vec![vec![0; md.nm]; md.nj];
                for &(j, t, s, st) in &path {
                    start[j][t] = st;
                    speed[j][t] = s;
                }
                best = Some((start, speed, comps));
                stats.incumbents.push(Incumbent {
                    elapsed_ms: clock.elapsed_ms(),
                    value,
                });
            }
            continue;
        }
        let steps = expand(md, &child, &mut scratch, &mut buf, clock);
        stats.nodes_expanded += 1;
        let depth = path.len();
        stack.push(Frame {
            node: child,
            steps,
            next: 0,
            depth,
        });
    }
    BnbResult { best, exhausted }
}
