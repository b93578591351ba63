mod common;

use common::*;
use greenjsp::features::{overlap_feature, time_window_feature};
use greenjsp::{extract_features, Distribution, Instance, RdddLevel, Window, Windows};
use proptest::prelude::*;

fn scaled(inst: &Instance, k: i64) -> Instance {
    let mut out = inst.clone();
    for v in out.proc.iter_mut().flatten().flatten() {
        *v *= k;
    }
    out.windows = match &inst.windows {
        Windows::None => Windows::None,
        Windows::Job(w) => Windows::Job(w.iter().map(|w| Window::new(w.release * k, w.due * k)).collect()),
        Windows::Task(w) => Windows::Task(
            w.iter()
                .map(|job| job.iter().map(|w| Window::new(w.release * k, w.due * k)).collect())
                .collect(),
        ),
    };
    out
}

#[test]
fn matches_oracle_on_seeded_instances() {
    for seed in 0..200u64 {
        let inst = small_instance(seed, 8, 8, 5);
        let ours = extract_features(&inst).unwrap().to_array();
        let theirs = oracle_features(&inst);
        assert!(features_match(&ours, &theirs), "seed {seed}: {ours:?} vs {theirs:?}");
        let sentinel = inst.rddd_level == RdddLevel::None;
        assert_eq!(ours[14] == -1.0, sentinel);
        assert_eq!(ours[15] == -1.0, sentinel);
        assert_eq!(ours[16] == -1.0, sentinel);
    }
}

proptest! {
    #[test]
    fn scaling_time_scales_time_features(seed in any::<u64>(), k in 2i64..6) {
        let inst = small_instance(seed, 5, 5, 3);
        let a = extract_features(&inst).unwrap();
        let b = extract_features(&scaled(&inst, k)).unwrap();
        let kf = k as f64;
        prop_assert_eq!(b.p_max, a.p_max * kf);
        prop_assert_eq!(b.p_min, a.p_min * kf);
        prop_assert!((b.p_mean - a.p_mean * kf).abs() <= 1e-9 * b.p_mean);
        prop_assert_eq!(b.mk_ub, a.mk_ub * k);
        prop_assert_eq!(b.mk_lb, a.mk_lb * k);
        if a.tt_ub != -1 {
            prop_assert_eq!(b.tt_ub, a.tt_ub * k);
        }
        prop_assert!((b.time_window - a.time_window).abs() <= 1e-12 * a.time_window.abs().max(1.0));
        prop_assert!((b.overlap - a.overlap).abs() <= 1e-12);
        prop_assert_eq!((b.e_max, b.en_ub), (a.e_max, a.en_ub));
    }

    #[test]
    fn features_are_finite(seed in any::<u64>()) {
        let inst = small_instance(seed, 8, 8, 5);
        let f = extract_features(&inst).unwrap().to_array();
        prop_assert!(f.iter().all(|v| v.is_finite()));
        prop_assert!(f[6] <= f[5] && f[5] <= f[4]);
        prop_assert!(f[9] <= f[8] && f[8] <= f[7]);
    }
}

fn one_machine(windows: Windows, rddd: RdddLevel, proc: Vec<i64>) -> Instance {
    let n = proc.len();
    Instance {
        id: "hand".into(),
        n_jobs: n,
        n_machines: 1,
        n_speeds: 1,
        rddd_level: rddd,
        distribution: Distribution::Uniform,
        seed: 0,
        routes: vec![vec![0]; n],
        proc: proc.iter().map(|&p| vec![vec![p]]).collect(),
        energy: vec![vec![vec![1]]; n],
        windows,
    }
}

#[test]
fn three_job_overlap_by_hand() {
    // Windows [0,10), [5,15), [20,30): pair overlaps 5/10 and 5/10, the rest 0.
    let w = vec![Window::new(0, 10), Window::new(5, 15), Window::new(20, 30)];
    let inst = one_machine(Windows::Job(w), RdddLevel::JobLevel, vec![2, 2, 2]);
    assert!((overlap_feature(&inst).unwrap() - 1.0 / 6.0).abs() <= 1e-15);
    assert!((time_window_feature(&inst).unwrap() - 5.0).abs() <= 1e-15);
}

#[test]
fn task_level_time_window_by_hand() {
    let w = vec![vec![Window::new(0, 8)], vec![Window::new(2, 5)]];
    let inst = one_machine(Windows::Task(w), RdddLevel::OpLevel, vec![4, 3]);
    // (8/4 + 3/3) / 2
    assert!((time_window_feature(&inst).unwrap() - 1.5).abs() <= 1e-15);
    // 3/8 and 3/3 over 2 ordered pairs on one machine.
    assert!((overlap_feature(&inst).unwrap() - (3.0 / 8.0 + 1.0) / 2.0).abs() <= 1e-15);
}

#[test]
fn no_windows_gives_sentinels() {
    let inst = one_machine(Windows::None, RdddLevel::None, vec![3]);
    assert_eq!(time_window_feature(&inst).unwrap(), -1.0);
    assert_eq!(overlap_feature(&inst).unwrap(), -1.0);
    assert_eq!(extract_features(&inst).unwrap().tt_ub, -1);
}
