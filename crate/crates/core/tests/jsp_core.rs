mod common;

use common::*;
use greenjsp::objective::Normalizer;
use greenjsp::{
    check_feasibility, decode_schedule, normalized_objective, objective_bounds, objective_components, Distribution,
    Instance, RdddLevel, Schedule, ViolationKind, Windows,
};
use proptest::prelude::*;

fn hand(routes: Vec<Vec<usize>>, proc: Vec<Vec<Vec<i64>>>, energy: Vec<Vec<Vec<i64>>>) -> Instance {
    Instance {
        id: "hand".into(),
        n_jobs: routes.len(),
        n_machines: routes[0].len(),
        n_speeds: proc[0][0].len(),
        rddd_level: RdddLevel::None,
        distribution: Distribution::Uniform,
        seed: 0,
        routes,
        proc,
        energy,
        windows: Windows::None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn decoded_sequencings_are_feasible(seed in any::<u64>()) {
        let inst = small_instance(seed, 5, 4, 3);
        let (orders, speeds) = random_sequencing(&inst, &mut rng(seed));
        let s = decode_schedule(&inst, &orders, &speeds).unwrap();
        prop_assert!(check_feasibility(&inst, &s).is_empty());
        prop_assert!(oracle_feasible(&inst, &s));
    }

    #[test]
    fn makespan_never_below_parallel_bound(seed in any::<u64>()) {
        let inst = small_instance(seed, 5, 4, 3);
        let (orders, speeds) = random_sequencing(&inst, &mut rng(seed));
        let s = decode_schedule(&inst, &orders, &speeds).unwrap();
        let c = objective_components(&inst, &s).unwrap();
        let b = objective_bounds(&inst);
        prop_assert!(c.makespan >= b.mk_lb);
        if inst.rddd_level == RdddLevel::None {
            prop_assert!(c.makespan <= b.mk_ub);
        }
    }

    #[test]
    fn bounds_are_ordered(seed in any::<u64>()) {
        let inst = small_instance(seed, 6, 6, 5);
        let b = objective_bounds(&inst);
        prop_assert!(b.mk_ub >= b.mk_lb);
        prop_assert!(b.en_ub >= b.en_lb);
        prop_assert_eq!((b.mk_ub, b.mk_lb, b.en_ub, b.en_lb), oracle_bounds(&inst));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn zero_terms_exactly_at_lower_bounds(seed in any::<u64>()) {
        let inst = small_instance(seed, 3, 3, 3);
        let (orders, speeds) = random_sequencing(&inst, &mut rng(seed));
        let s = decode_schedule(&inst, &orders, &speeds).unwrap();
        let o = normalized_objective(&inst, &s).unwrap();
        let b = objective_bounds(&inst);
        let n = Normalizer::new(b);
        if b.mk_ub > b.mk_lb {
            prop_assert_eq!(n.makespan_term(o.makespan) == 0.0, o.makespan == b.mk_lb);
        }
        if b.en_ub > b.en_lb {
            prop_assert_eq!(n.energy_term(o.energy) == 0.0, o.energy == b.en_lb);
        }
    }

    #[test]
    fn scalarized_matches_oracle(seed in any::<u64>()) {
        let inst = small_instance(seed, 4, 4, 3);
        let (orders, speeds) = random_sequencing(&inst, &mut rng(seed));
        let s = decode_schedule(&inst, &orders, &speeds).unwrap();
        let o = normalized_objective(&inst, &s).unwrap();
        prop_assert_eq!((o.makespan, o.energy, o.tardiness), oracle_components(&inst, &s));
        prop_assert!((o.scalarized - oracle_scalarized(&inst, &s)).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fastest_speeds_never_hurt_makespan(seed in any::<u64>()) {
        let inst = small_instance(seed, 5, 4, 5);
        let (orders, speeds) = random_sequencing(&inst, &mut rng(seed));
        let fast: Vec<Vec<usize>> = speeds.iter().map(|r| vec![inst.n_speeds - 1; r.len()]).collect();
        let a = objective_components(&inst, &decode_schedule(&inst, &orders, &speeds).unwrap()).unwrap();
        let b = objective_components(&inst, &decode_schedule(&inst, &orders, &fast).unwrap()).unwrap();
        prop_assert!(b.makespan <= a.makespan);
        prop_assert!(b.energy >= a.energy);
    }
}

#[test]
fn feasibility_agrees_with_interval_oracle() {
    let mut feasible = 0;
    for seed in 0..100u64 {
        let inst = instance_of(3, 3, (seed % 3) as u8, 2, seed);
        let mut r = rng(seed);
        let (orders, speeds) = random_sequencing(&inst, &mut r);
        let decoded = decode_schedule(&inst, &orders, &speeds).unwrap();
        let mk = objective_components(&inst, &decoded).unwrap().makespan;
        // Half the samples are jittered decodes, half are random start times.
        let s = if seed % 2 == 0 {
            let mut s = decoded.clone();
            let (j, t) = ((seed / 2 % 3) as usize, (seed / 6 % 3) as usize);
            s.start[j][t] = (s.start[j][t] + (seed as i64 % 7) - 3).max(0);
            s
        } else {
            random_schedule(&inst, mk, &mut r)
        };
        let ours = check_feasibility(&inst, &s).is_empty();
        assert_eq!(ours, oracle_feasible(&inst, &s), "seed {seed}");
        feasible += ours as usize;
    }
    assert!(feasible > 0 && feasible < 100);
}

#[test]
fn overlapping_tasks_give_one_violation() {
    let inst = hand(
        vec![vec![0], vec![0]],
        vec![vec![vec![3]], vec![vec![4]]],
        vec![vec![vec![1]], vec![vec![1]]],
    );
    let s = Schedule {
        start: vec![vec![0], vec![2]],
        speed: vec![vec![0], vec![0]],
    };
    let v = check_feasibility(&inst, &s);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].kind, ViolationKind::MachineOverlap);
}

#[test]
fn shared_machine_decode() {
    let inst = hand(
        vec![vec![0], vec![0]],
        vec![vec![vec![3]], vec![vec![4]]],
        vec![vec![vec![1]], vec![vec![1]]],
    );
    let s = decode_schedule(&inst, &[vec![0, 1]], &[vec![0], vec![0]]).unwrap();
    assert_eq!(s.start, vec![vec![0], vec![3]]);
    assert_eq!(objective_components(&inst, &s).unwrap().makespan, 7);
}

#[test]
fn serial_and_parallel_bounds_by_hand() {
    let inst = hand(
        vec![vec![0], vec![0]],
        vec![vec![vec![4]], vec![vec![5]]],
        vec![vec![vec![2]], vec![vec![3]]],
    );
    let b = objective_bounds(&inst);
    assert_eq!((b.mk_ub, b.mk_lb, b.en_ub, b.en_lb), (9, 5, 5, 5));
}

#[test]
fn single_task_is_degenerate() {
    let inst = hand(vec![vec![0]], vec![vec![vec![7]]], vec![vec![vec![3]]]);
    let s = decode_schedule(&inst, &[vec![0]], &[vec![0]]).unwrap();
    let o = normalized_objective(&inst, &s).unwrap();
    assert_eq!((o.makespan, o.energy, o.tardiness), (7, 3, 0));
    assert_eq!(o.scalarized, 0.0);
}

#[test]
fn two_by_two_by_two_against_oracle() {
    for seed in 0..20u64 {
        for rddd in 0..3u8 {
            let inst = instance_of(2, 2, rddd, 2, seed);
            let (orders, speeds) = random_sequencing(&inst, &mut rng(seed + 99));
            let s = decode_schedule(&inst, &orders, &speeds).unwrap();
            let c = objective_components(&inst, &s).unwrap();
            assert_eq!((c.makespan, c.energy, c.tardiness), oracle_components(&inst, &s));
            let o = normalized_objective(&inst, &s).unwrap();
            assert!((o.scalarized - oracle_scalarized(&inst, &s)).abs() <= 1e-12);
        }
    }
}

#[test]
fn infeasible_schedule_is_rejected_by_objective() {
    let inst = hand(
        vec![vec![0], vec![0]],
        vec![vec![vec![3]], vec![vec![4]]],
        vec![vec![vec![1]], vec![vec![1]]],
    );
    let s = Schedule {
        start: vec![vec![0], vec![0]],
        speed: vec![vec![0], vec![0]],
    };
    assert!(objective_components(&inst, &s).is_err());
}

#[test]
fn instance_json_round_trip() {
    for seed in 0..30u64 {
        let inst = small_instance(seed, 4, 4, 3);
        let text = inst.to_json();
        let back = Instance::from_json(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_json(), text);
    }
}
