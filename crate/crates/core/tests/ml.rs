mod common;

use common::*;
use greenjsp::ml::mlp::Mlp;
use greenjsp::ml::tree::{grow_classifier, TreeParams};
use greenjsp::ml::{cross_validate, evaluate, kfold, stratified_split, sweep, EvalReport, Standardizer};
use greenjsp::{fit, Family, LabeledDataset, ModelSpec, SolverId, TrainedModel};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const ALL: [SolverId; 3] = SolverId::ALL;

#[test]
fn mlp_gradient_matches_central_differences() {
    let mut r = rng(5);
    let net = Mlp::init(4, 6, 3, &mut r);
    let x: Vec<Vec<f64>> = (0..5)
        .map(|_| (0..4).map(|_| r.gen_range(-2.0..2.0)).collect())
        .collect();
    let y = vec![0, 1, 2, 1, 0];
    assert!(mlp_gradient_gap(&net, &x, &y) <= 1e-4);
}

#[test]
fn single_tree_forest_is_a_decision_tree() {
    let ds = blobs(30, 5, &ALL, 3);
    for depth in [Some(2), Some(6), None] {
        let dt = fit(
            &ModelSpec::new(
                Family::DecisionTree {
                    max_depth: depth,
                    min_split: 2,
                },
                1,
            ),
            &ds,
        )
        .unwrap();
        let rf = fit(
            &ModelSpec::new(
                Family::RandomForest {
                    n_trees: 1,
                    max_depth: depth,
                    max_features: None,
                    bootstrap: false,
                },
                1,
            ),
            &ds,
        )
        .unwrap();
        let probe = blobs(20, 5, &ALL, 77);
        assert_eq!(dt.predict_all(&probe.x).unwrap(), rf.predict_all(&probe.x).unwrap());
    }
}

#[test]
fn zero_rate_boosting_predicts_the_prior() {
    let mut ds = blobs(10, 3, &ALL, 4);
    ds.x.extend(blobs(10, 3, &[SolverId::GreedyLS], 9).x);
    ds.y.extend([SolverId::GreedyLS; 10]);
    let m = fit(
        &ModelSpec::new(
            Family::GradientBoostedTrees {
                rounds: 5,
                max_depth: 3,
                learning_rate: 0.0,
            },
            0,
        ),
        &ds,
    )
    .unwrap();
    assert!(m.predict_all(&ds.x).unwrap().iter().all(|&s| s == SolverId::GreedyLS));
}

proptest! {
    #[test]
    fn standardized_columns_have_unit_moments(rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 2..40)) {
        let s = Standardizer::fit(&rows);
        let z = s.transform(&rows);
        for c in 0..3 {
            let n = z.len() as f64;
            let mean = z.iter().map(|r| r[c]).sum::<f64>() / n;
            let var = z.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / n;
            prop_assert!(mean.abs() <= 1e-9);
            prop_assert!(var.abs() <= 1e-9 || (var - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn unlimited_tree_memorizes(seed in any::<u64>(), n in 2usize..60) {
        let mut r = rng(seed);
        let mut x: Vec<Vec<f64>> = Vec::new();
        while x.len() < n {
            let row: Vec<f64> = (0..3).map(|_| r.gen_range(0..8) as f64).collect();
            if !x.contains(&row) {
                x.push(row);
            }
        }
        let mut y: Vec<SolverId> = (0..n).map(|_| ALL[r.gen_range(0..3)]).collect();
        y[0] = SolverId::ExactBnB;
        y[1] = SolverId::Anneal;
        let ds = LabeledDataset::new(x, y).unwrap();
        let m = fit(&ModelSpec::new(Family::DecisionTree { max_depth: None, min_split: 2 }, 0), &ds).unwrap();
        prop_assert_eq!(m.predict_all(&ds.x).unwrap(), ds.y);
    }
}

#[test]
fn naive_bayes_separates_distant_classes() {
    let mut r = rng(8);
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (mean, label) in [(0.0, SolverId::ExactBnB), (100.0, SolverId::Anneal)] {
        for _ in 0..50 {
            x.push(vec![mean + r.gen_range(-1.7..1.7)]);
            y.push(label);
        }
    }
    let ds = LabeledDataset::new(x, y).unwrap();
    let m = fit(&ModelSpec::named("gaussian_nb", 0).unwrap(), &ds).unwrap();
    assert_eq!(m.predict_all(&ds.x).unwrap(), ds.y);
}

#[test]
fn one_neighbour_returns_the_stored_label() {
    let ds = blobs(15, 4, &ALL, 12);
    let m = fit(&ModelSpec::new(Family::Knn { k: 1 }, 0), &ds).unwrap();
    assert_eq!(m.predict_all(&ds.x).unwrap(), ds.y);
}

#[test]
fn stump_routes_on_the_midpoint() {
    let x = vec![vec![1.0], vec![2.0], vec![10.0], vec![11.0]];
    let y = vec![0, 0, 1, 1];
    let p = TreeParams {
        max_depth: Some(1),
        min_split: 2,
        max_features: None,
    };
    let t = grow_classifier::<ChaCha8Rng>(&x, &y, 2, (0..4).collect(), p, None);
    assert_eq!(t.depth(), 1);
    assert_eq!(t.predict_class(&[6.0]), 0);
    assert_eq!(t.predict_class(&[6.000001]), 1);
}

#[test]
fn training_is_byte_deterministic() {
    let ds = blobs(20, 17, &ALL, 6);
    for family in Family::all_defaults() {
        let spec = ModelSpec::new(family, 42);
        let a = fit(&spec, &ds).unwrap().to_json();
        let b = fit(&spec, &ds).unwrap().to_json();
        assert_eq!(a, b, "{}", spec.family.name());
        let back = TrainedModel::from_json(&a).unwrap();
        assert_eq!(back.to_json(), a);
        assert_eq!(
            back.predict_all(&ds.x).unwrap(),
            fit(&spec, &ds).unwrap().predict_all(&ds.x).unwrap()
        );
    }
}

#[test]
fn sweep_covers_every_family_regardless_of_order() {
    let ds = blobs(15, 6, &ALL, 21);
    let a = sweep(&ds, 5, 3).unwrap();
    assert_eq!(a.len(), 7);
    let mut names: Vec<&str> = a.iter().map(|r| r.family.as_str()).collect();
    names.sort();
    let mut expected = greenjsp::ml::FAMILY_NAMES.to_vec();
    expected.sort();
    assert_eq!(names, expected);
    assert!(a.windows(2).all(|w| w[0].mean >= w[1].mean));
    // Each family's score is the same as cross-validating it alone.
    for r in &a {
        let alone = cross_validate(&ModelSpec::named(&r.family, 3).unwrap(), &ds, 5, 3).unwrap();
        assert_eq!(alone.fold_accuracies, r.fold_accuracies);
    }
}

#[test]
fn constant_labels_are_rejected_and_absent_labels_never_predicted() {
    let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
    let one = LabeledDataset::new(x.clone(), vec![SolverId::Anneal; 10]).unwrap();
    assert!(fit(&ModelSpec::named("logistic", 0).unwrap(), &one).is_err());
    let two = LabeledDataset::new(
        x,
        (0..10)
            .map(|i| if i < 9 { SolverId::Anneal } else { SolverId::GreedyLS })
            .collect(),
    )
    .unwrap();
    for family in Family::all_defaults() {
        let m = fit(&ModelSpec::new(family, 0), &two).unwrap();
        assert!(m.predict_all(&two.x).unwrap().iter().all(|&s| s != SolverId::ExactBnB));
    }
}

#[test]
fn folds_and_split_are_stratified() {
    let mut ds = blobs(23, 3, &ALL, 30);
    ds.x.truncate(23 + 23 + 7);
    ds.y.truncate(23 + 23 + 7);
    let counts = ds.class_counts();
    let folds = kfold(&ds, 5, 1).unwrap();
    let mut seen = vec![0; ds.len()];
    for (train, val) in &folds {
        assert_eq!(train.len() + val.len(), ds.len());
        for &i in val {
            seen[i] += 1;
            assert!(!train.contains(&i));
        }
        let sub = ds.subset(val).class_counts();
        for c in 0..3 {
            let ideal = counts[c] as f64 / 5.0;
            assert!((sub[c] as f64 - ideal).abs() <= 1.0);
        }
    }
    assert!(seen.iter().all(|&n| n == 1));
    let (train, test) = stratified_split(&ds, 0.2, 1).unwrap();
    assert_eq!(train.len() + test.len(), ds.len());
    let sub = ds.subset(&test).class_counts();
    for c in 0..3 {
        assert!((sub[c] as f64 - counts[c] as f64 * 0.2).abs() <= 1.0);
    }
}

#[test]
fn evaluation_counts_match_the_test_set() {
    let ds = blobs(20, 4, &ALL, 13);
    let (train, test) = stratified_split(&ds, 0.25, 2).unwrap();
    let m = fit(&ModelSpec::named("logistic", 0).unwrap(), &ds.subset(&train)).unwrap();
    let test = ds.subset(&test);
    let r = evaluate(&m, &test).unwrap();
    let counts = test.class_counts();
    for (i, l) in r.labels.iter().enumerate() {
        assert_eq!(r.confusion[i].iter().sum::<usize>(), counts[l.index()]);
    }
    let hand = EvalReport::from_confusion(
        vec![SolverId::ExactBnB, SolverId::GreedyLS],
        vec![vec![8, 2], vec![3, 7]],
    );
    assert!((hand.accuracy - 0.75).abs() <= 1e-12);
    assert!((hand.precision[0] - 8.0 / 11.0).abs() <= 1e-12);
    assert!((hand.recall[0] - 0.8).abs() <= 1e-12);
}
