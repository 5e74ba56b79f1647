mod common;

use afsdf::seed::rng_for;
use afsdf::tree::{
    best_split, fit_tree, gini_impurity, tree_importance, tree_predict_proba, MaxFeatures, Node,
    NodeSamples, Split, SplitMode, TreeParams,
};
use afsdf::Matrix;
use proptest::prelude::*;

fn exhaustive(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    weights: &[f64],
    min_leaf: f64,
) -> Option<Split> {
    let rows: Vec<usize> = (0..x.n_rows()).filter(|&r| weights[r] > 0.0).collect();
    let node = NodeSamples {
        x,
        y,
        n_classes,
        rows: &rows,
        weights,
    };
    let candidates: Vec<usize> = (0..x.n_cols()).collect();
    best_split(
        &node,
        &candidates,
        SplitMode::Exhaustive,
        min_leaf,
        &mut rng_for(0, &[]),
    )
}

#[test]
fn exhaustive_split_matches_brute_force_on_six_points() {
    let x = Matrix::from_rows(&[
        [0.3, 2.0],
        [1.1, 1.0],
        [0.7, 0.5],
        [2.2, 1.5],
        [1.9, 0.1],
        [0.2, 2.5],
    ])
    .unwrap();
    let y = [0, 1, 0, 1, 1, 0];
    let w = [1.0; 6];
    let got = exhaustive(&x, &y, 2, &w, 1.0).unwrap();
    let want = common::brute_force_split(&x, &y, 2, &w, 1.0).unwrap();
    assert_eq!((got.feature, got.threshold), (want.feature, want.threshold));
    assert!((got.gain - want.gain).abs() < 1e-12);
    // x0 <= 0.9 separates the classes perfectly; feature 0 wins the tie with x1 <= 1.25.
    assert_eq!((got.feature, got.threshold), (0, 0.9));
    assert!((got.gain - 0.5).abs() < 1e-15);
}

#[test]
fn exhaustive_split_matches_brute_force_on_random_instances() {
    for seed in 0..300 {
        let n_classes = 2 + (seed % 2) as usize;
        let (x, y) = common::random_instance(seed, 50, 6, n_classes);
        let mut r = common::rng(seed + 10_000);
        use rand::Rng;
        let weights: Vec<f64> = if seed % 3 == 0 {
            (0..x.n_rows())
                .map(|_| r.random_range(0..3) as f64)
                .collect()
        } else {
            vec![1.0; x.n_rows()]
        };
        if weights.iter().all(|&w| w == 0.0) {
            continue;
        }
        let min_leaf = 1.0 + (seed % 3) as f64;
        let got = exhaustive(&x, &y, n_classes, &weights, min_leaf);
        let want = common::brute_force_split(&x, &y, n_classes, &weights, min_leaf);
        match (got, want) {
            (None, None) => {}
            (Some(g), Some(w)) => {
                assert_eq!(
                    (g.feature, g.threshold),
                    (w.feature, w.threshold),
                    "seed {seed}"
                );
                assert!((g.gain - w.gain).abs() < 1e-12, "seed {seed}");
            }
            (g, w) => panic!("seed {seed}: got {g:?}, oracle {w:?}"),
        }
    }
}

#[test]
fn pure_input_gives_single_leaf() {
    let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
    let tree = fit_tree(&x, &[1, 1, 1], 2, None, &TreeParams::default()).unwrap();
    assert_eq!(tree.n_nodes(), 1);
    assert_eq!(tree.importance_raw(), &[0.0, 0.0]);
    assert_eq!(tree_importance(&tree), vec![0.5, 0.5]);
}

#[test]
fn xor_is_fit_exactly() {
    let x = Matrix::from_rows(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
    let y = [0, 1, 1, 0];
    let tree = fit_tree(&x, &y, 2, None, &TreeParams::default()).unwrap();
    assert!(tree.n_nodes() >= 3);
    for (i, &l) in y.iter().enumerate() {
        assert_eq!(tree.predict_label(x.row(i)).unwrap(), l);
    }
}

#[test]
fn fitting_is_deterministic() {
    let (x, y) = common::random_instance(5, 50, 6, 3);
    for mode in [SplitMode::Exhaustive, SplitMode::RandomThreshold] {
        let params = TreeParams {
            max_features: MaxFeatures::Sqrt,
            split_mode: mode,
            seed: 99,
            ..TreeParams::default()
        };
        let a = fit_tree(&x, &y, 3, None, &params).unwrap();
        let b = fit_tree(&x, &y, 3, None, &params).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn single_leaf_distribution() {
    let x = Matrix::from_rows(&[[1.0], [1.0], [1.0]]).unwrap();
    let tree = fit_tree(&x, &[0, 0, 1], 2, None, &TreeParams::default()).unwrap();
    for v in [-10.0, 1.0, 99.0] {
        let p = tree_predict_proba(&tree, &[v]).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-15 && (p[1] - 1.0 / 3.0).abs() < 1e-15);
    }
}

#[test]
fn depth_one_separator() {
    let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0]]).unwrap();
    let params = TreeParams {
        max_depth: Some(1),
        ..TreeParams::default()
    };
    let tree = fit_tree(&x, &[0, 0, 1, 1], 2, None, &params).unwrap();
    assert_eq!(tree_predict_proba(&tree, &[1.2]).unwrap(), vec![1.0, 0.0]);
    assert_eq!(tree_predict_proba(&tree, &[1.5]).unwrap(), vec![1.0, 0.0]);
    assert_eq!(tree_predict_proba(&tree, &[1.6]).unwrap(), vec![0.0, 1.0]);
    assert!(tree_predict_proba(&tree, &[1.0, 2.0]).is_err());
}

#[test]
fn routing_follows_hand_trace() {
    // Root splits x0 at 1.5; the right child splits x1 at 0.5.
    //   (0,*) -> left leaf [1,0]; (2,0) -> right-left; (2,1) -> right-right
    let x = Matrix::from_rows(&[
        [0.0, 0.0],
        [1.0, 1.0],
        [2.0, 0.0],
        [3.0, 0.0],
        [2.0, 1.0],
        [3.0, 1.0],
    ])
    .unwrap();
    let y = [0, 0, 1, 1, 2, 2];
    let tree = fit_tree(&x, &y, 3, None, &TreeParams::default()).unwrap();
    match &tree.nodes()[0] {
        Node::Split {
            feature, threshold, ..
        } => assert_eq!((*feature, *threshold), (0, 1.5)),
        other => panic!("root is {other:?}"),
    }
    assert_eq!(tree.n_nodes(), 5);
    assert_eq!(
        tree_predict_proba(&tree, &[0.5, 9.0]).unwrap(),
        vec![1.0, 0.0, 0.0]
    );
    assert_eq!(
        tree_predict_proba(&tree, &[2.5, 0.2]).unwrap(),
        vec![0.0, 1.0, 0.0]
    );
    assert_eq!(
        tree_predict_proba(&tree, &[2.5, 0.7]).unwrap(),
        vec![0.0, 0.0, 1.0]
    );
}

#[test]
fn importance_of_a_single_split() {
    let x = Matrix::from_rows(&[
        [5.0, 1.0, 0.0, 3.0],
        [5.0, 2.0, 1.0, 3.0],
        [5.0, 1.0, 2.0, 3.0],
        [5.0, 2.0, 3.0, 3.0],
    ])
    .unwrap();
    let params = TreeParams {
        max_depth: Some(1),
        ..TreeParams::default()
    };
    let tree = fit_tree(&x, &[0, 0, 1, 1], 2, None, &params).unwrap();
    assert_eq!(tree_importance(&tree), vec![0.0, 0.0, 1.0, 0.0]);
}

#[test]
fn gini_examples() {
    assert_eq!(gini_impurity(&[4.0, 0.0]).unwrap(), 0.0);
    assert_eq!(gini_impurity(&[2.0, 2.0]).unwrap(), 0.5);
    assert!(
        (gini_impurity(&[1.0, 3.0]).unwrap() - (1.0 - (1.0 / 16.0 + 9.0 / 16.0))).abs() < 1e-15
    );
}

#[test]
fn weight_length_mismatch() {
    let x = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
    assert!(fit_tree(&x, &[0, 1], 2, Some(&[1.0]), &TreeParams::default()).is_err());
}

#[test]
fn bootstrap_weights_match_duplicated_rows() {
    let (x, y) = common::random_instance(77, 40, 4, 2);
    let weights: Vec<f64> = (0..x.n_rows()).map(|i| (i % 3) as f64).collect();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, &w) in weights.iter().enumerate() {
        for _ in 0..w as usize {
            rows.push(x.row(i).to_vec());
            labels.push(y[i]);
        }
    }
    let dup = Matrix::from_rows(&rows).unwrap();
    let a = fit_tree(&x, &y, 2, Some(&weights), &TreeParams::default()).unwrap();
    let b = fit_tree(&dup, &labels, 2, None, &TreeParams::default()).unwrap();
    assert_eq!(a.nodes(), b.nodes());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn importance_and_probabilities_are_normalized(seed in 0u64..10_000, random in any::<bool>()) {
        let (x, y) = common::random_instance(seed, 50, 6, 3);
        let params = TreeParams {
            max_features: MaxFeatures::Sqrt,
            split_mode: if random { SplitMode::RandomThreshold } else { SplitMode::Exhaustive },
            seed,
            ..TreeParams::default()
        };
        let tree = fit_tree(&x, &y, 3, None, &params).unwrap();
        let imp = tree_importance(&tree);
        prop_assert!(imp.iter().all(|&v| v >= 0.0));
        prop_assert!((imp.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for node in tree.nodes() {
            match node {
                Node::Leaf { distribution } => {
                    prop_assert!(distribution.iter().all(|&p| p >= 0.0));
                    prop_assert!((distribution.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                }
                Node::Split { feature, left, right, .. } => {
                    prop_assert!(*feature < x.n_cols());
                    prop_assert!(*left < tree.n_nodes() && *right < tree.n_nodes());
                }
            }
        }
    }

    #[test]
    fn exhaustive_trees_ignore_row_order(seed in 0u64..10_000, shift in 1usize..49) {
        let (x, y) = common::random_instance(seed, 50, 5, 2);
        let n = x.n_rows();
        let perm: Vec<usize> = (0..n).map(|i| (i * 7 + shift) % n).collect();
        prop_assume!({ let mut p = perm.clone(); p.sort(); p.dedup(); p.len() == n });
        let xp = x.select_rows(&perm);
        let yp: Vec<usize> = perm.iter().map(|&i| y[i]).collect();
        let params = TreeParams { seed: 3, ..TreeParams::default() };
        let a = fit_tree(&x, &y, 2, None, &params).unwrap();
        let b = fit_tree(&xp, &yp, 2, None, &params).unwrap();
        prop_assert_eq!(a, b);
    }
}
