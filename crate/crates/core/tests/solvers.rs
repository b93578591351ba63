mod common;

use common::*;
use greenjsp::solver::{
    brute_force_optimum, brute_force_with_bounds, enumerate_neighbors, giffler_thompson_construct, solve_bnb,
    solve_greedy_ls, solve_sa, Construction,
};
use greenjsp::{
    check_feasibility, normalized_objective, objective_bounds, solve, Budget, Instance, SolveStatus, SolverId,
};
use proptest::prelude::*;
use rand::Rng;

fn oracle_sized(seed: u64) -> Instance {
    let mut r = rng(seed);
    let (j, m) = loop {
        let (j, m) = (r.gen_range(1..=3), r.gen_range(1..=3));
        if j * m <= 6 {
            break (j, m);
        }
    };
    instance_of(j, m, r.gen_range(0..3), r.gen_range(1..=2), seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn bnb_optimum_equals_brute_force(seed in any::<u64>()) {
        let inst = oracle_sized(seed);
        let out = solve_bnb(&inst, Budget::wall(10_000), seed).unwrap();
        let (_, opt) = brute_force_optimum(&inst).unwrap();
        prop_assert_eq!(out.status, SolveStatus::Optimal);
        prop_assert!((out.value().unwrap() - opt.scalarized).abs() <= 1e-12);
    }

    #[test]
    fn dominated_speed_leaves_optimum_unchanged(seed in any::<u64>()) {
        let inst = instance_of(2, 2, (seed % 3) as u8, 1, seed);
        let mut more = inst.clone();
        more.n_speeds = 2;
        for (pj, ej) in more.proc.iter_mut().zip(more.energy.iter_mut()) {
            for (p, e) in pj.iter_mut().zip(ej.iter_mut()) {
                p.push(p[0]);
                e.push(e[0] + 1);
            }
        }
        let (_, a) = brute_force_optimum(&inst).unwrap();
        let (_, b) = brute_force_with_bounds(&more, objective_bounds(&inst)).unwrap();
        prop_assert!((a.scalarized - b.scalarized).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn returned_schedules_are_feasible(seed in any::<u64>()) {
        let inst = small_instance(seed, 6, 5, 3);
        for s in SolverId::ALL {
            let out = solve(s, &inst, Budget::work(2), seed).unwrap();
            prop_assert_eq!(out.best.is_none(), out.status == SolveStatus::Unresolved);
            if let Some(b) = &out.best {
                prop_assert!(check_feasibility(&inst, b).is_empty());
                prop_assert!(oracle_feasible(&inst, b));
                let o = normalized_objective(&inst, b).unwrap();
                prop_assert_eq!(Some(o.scalarized), out.value());
            }
            if s != SolverId::ExactBnB {
                prop_assert!(out.status != SolveStatus::Optimal);
            }
        }
    }

    #[test]
    fn doubling_the_budget_never_hurts(seed in any::<u64>()) {
        let inst = small_instance(seed, 6, 6, 3);
        for s in SolverId::ALL {
            let mut last = f64::INFINITY;
            for ms in [1, 2, 4] {
                let v = solve(s, &inst, Budget::work(ms), seed).unwrap().value().unwrap_or(f64::INFINITY);
                prop_assert!(v <= last, "{s} at {ms} ms: {v} > {last}");
                last = v;
            }
        }
    }

    #[test]
    fn incumbents_strictly_decrease(seed in any::<u64>()) {
        let inst = small_instance(seed, 5, 5, 3);
        for s in SolverId::ALL {
            let out = solve(s, &inst, Budget::work(3), seed).unwrap();
            let trace = &out.stats.incumbents;
            prop_assert!(trace.windows(2).all(|w| w[1].value < w[0].value));
            if let Some(last) = trace.last() {
                prop_assert_eq!(Some(last.value), out.value());
            }
        }
    }
}

#[test]
fn optimum_has_no_improving_neighbor() {
    for seed in 0..40u64 {
        let inst = instance_of(2, 2, (seed % 3) as u8, 2, seed);
        let (best, opt) = brute_force_optimum(&inst).unwrap();
        for n in enumerate_neighbors(&inst, &best).unwrap() {
            assert!(check_feasibility(&inst, &n.schedule).is_empty());
            assert!(
                n.objective.scalarized >= opt.scalarized - 1e-12,
                "seed {seed} {:?}",
                n.mv
            );
        }
    }
}

#[test]
fn neighbors_are_feasible_on_larger_instances() {
    for seed in 0..40u64 {
        let inst = small_instance(seed, 6, 6, 3);
        let s = giffler_thompson_construct(&inst, Construction::Random { seed }).unwrap();
        for n in enumerate_neighbors(&inst, &s).unwrap() {
            assert!(check_feasibility(&inst, &n.schedule).is_empty());
        }
    }
}

#[test]
fn single_task_neighborhood() {
    let one = instance_of(1, 1, 0, 1, 3);
    let s = giffler_thompson_construct(&one, Construction::Greedy).unwrap();
    assert!(enumerate_neighbors(&one, &s).unwrap().is_empty());
    let three = instance_of(1, 1, 0, 3, 3);
    let s = giffler_thompson_construct(&three, Construction::Greedy).unwrap();
    let n = enumerate_neighbors(&three, &s).unwrap();
    assert!(!n.is_empty() && n.len() <= 2);
}

#[test]
fn construction_is_deterministic() {
    for seed in 0..20u64 {
        let inst = small_instance(seed, 6, 6, 3);
        let a = giffler_thompson_construct(&inst, Construction::Greedy).unwrap();
        let b = giffler_thompson_construct(&inst, Construction::Greedy).unwrap();
        assert_eq!(a, b);
        assert!(check_feasibility(&inst, &a).is_empty());
    }
}

#[test]
fn trivial_instance_statuses() {
    let inst = instance_of(1, 1, 0, 1, 5);
    let b = solve_bnb(&inst, Budget::wall(1000), 0).unwrap();
    assert_eq!((b.status, b.value()), (SolveStatus::Optimal, Some(0.0)));
    for out in [
        solve_greedy_ls(&inst, Budget::wall(1000), 0).unwrap(),
        solve_sa(&inst, Budget::wall(1000), 0).unwrap(),
    ] {
        assert_eq!((out.status, out.value()), (SolveStatus::Satisfied, Some(0.0)));
    }
}

#[test]
fn bnb_cannot_prove_a_large_instance_in_one_ms() {
    let inst = instance_of(10, 10, 1, 3, 11);
    let out = solve_bnb(&inst, Budget::wall(1), 0).unwrap();
    assert_ne!(out.status, SolveStatus::Optimal);
}

#[test]
fn greedy_ls_is_sandwiched() {
    for seed in 0..20u64 {
        let inst = instance_of(2, 2, (seed % 3) as u8, 2, seed);
        let (_, opt) = brute_force_optimum(&inst).unwrap();
        let c = giffler_thompson_construct(&inst, Construction::Greedy).unwrap();
        let cv = normalized_objective(&inst, &c).unwrap().scalarized;
        let out = solve_greedy_ls(&inst, Budget::wall(2000), seed).unwrap();
        let v = out.value().unwrap();
        assert!(v >= opt.scalarized - 1e-12 && v <= cv + 1e-12, "seed {seed}");
        let again = solve_greedy_ls(&inst, Budget::wall(2000), seed).unwrap();
        assert_eq!(again.best, out.best);
    }
}

#[test]
fn anneal_finds_the_small_optimum() {
    let mut hits = 0;
    for seed in 0..100u64 {
        let inst = instance_of(2, 2, (seed % 3) as u8, 1, seed);
        let (_, opt) = brute_force_optimum(&inst).unwrap();
        let v = solve_sa(&inst, Budget::wall(500), seed).unwrap().value().unwrap();
        assert!(v >= opt.scalarized - 1e-12);
        hits += ((v - opt.scalarized).abs() <= 1e-12) as usize;
    }
    assert!(hits >= 95, "{hits}/100");
}
