//! Classification trees (CART and extremely randomized) with Gini splits,
//! plus the second-order regression trees used by gradient boosting.

mod regression;
mod split;

pub use regression::{fit_regression_tree, RegressionTree};
pub use split::{best_split, gini_impurity, NodeSamples, Split, SplitMode, MIN_GAIN};

use split::scan_splits;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed::rng_for;

/// Number of candidate features examined at each node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    All,
    /// `ceil(sqrt(d))`
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> Result<usize> {
        let m = match self {
            MaxFeatures::All => n_features,
            MaxFeatures::Sqrt => (n_features as f64).sqrt().ceil() as usize,
            MaxFeatures::Count(c) => c,
        };
        if m == 0 || m > n_features {
            return Err(Error::InvalidConfig(format!(
                "mtry {m} outside [1, {n_features}]"
            )));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until the other limits stop it.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
    pub split_mode: SplitMode,
    pub seed: u64,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_leaf: 1,
            min_samples_split: 2,
            max_features: MaxFeatures::All,
            split_mode: SplitMode::Exhaustive,
            seed: 0,
        }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_leaf < 1 {
            return Err(Error::InvalidConfig(
                "min_samples_leaf must be at least 1".into(),
            ));
        }
        if self.min_samples_split < 2 {
            return Err(Error::InvalidConfig(
                "min_samples_split must be at least 2".into(),
            ));
        }
        Ok(())
    }
}

/// Tree node; children are indices into [`DecisionTree::nodes`].
/// Samples with `value <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        distribution: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    n_features_in: usize,
    n_classes: usize,
    importance_raw: Vec<f64>,
}

impl DecisionTree {
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_features_in(&self) -> usize {
        self.n_features_in
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Accumulated `w·gini − w_l·gini_l − w_r·gini_r` per feature.
    pub fn importance_raw(&self) -> &[f64] {
        &self.importance_raw
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    #[inline]
    pub(crate) fn leaf_for(&self, sample: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { distribution } => return distribution,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if sample[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    pub fn predict_proba(&self, sample: &[f64]) -> Result<&[f64]> {
        if sample.len() != self.n_features_in {
            return Err(Error::DimensionMismatch {
                expected: self.n_features_in,
                found: sample.len(),
            });
        }
        Ok(self.leaf_for(sample))
    }

    /// Argmax of the leaf distribution, lowest class on ties.
    pub fn predict_label(&self, sample: &[f64]) -> Result<usize> {
        Ok(argmax(self.predict_proba(sample)?))
    }

    /// Raw importance normalized to sum 1; uniform when the tree never split.
    pub fn importance(&self) -> Vec<f64> {
        normalize_or_uniform(&self.importance_raw)
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn normalize_or_uniform(raw: &[f64]) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        raw.iter().map(|v| v / total).collect()
    } else {
        vec![1.0 / raw.len() as f64; raw.len()]
    }
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [usize],
    weights: Vec<f64>,
    n_classes: usize,
    params: &'a TreeParams,
    mtry: usize,
    nodes: Vec<Node>,
    importance_raw: Vec<f64>,
}

impl Builder<'_> {
    fn leaf(counts: &[f64], total: f64) -> Node {
        Node::Leaf {
            distribution: counts.iter().map(|c| c / total).collect(),
        }
    }

    fn build(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let node = NodeSamples {
            x: self.x,
            y: self.y,
            n_classes: self.n_classes,
            rows: &rows,
            weights: &self.weights,
        };
        let (counts, total) = node.class_counts();
        let pure = counts.iter().filter(|&&c| c > 0.0).count() <= 1;
        let too_deep = self.params.max_depth.is_some_and(|m| depth >= m);
        if pure || too_deep || total < self.params.min_samples_split as f64 {
            self.nodes.push(Self::leaf(&counts, total));
            return id;
        }

        let d = self.x.n_cols();
        let mut rng = rng_for(self.params.seed, &[id as u64]);
        let candidates: Vec<usize> = if self.mtry < d {
            index::sample(&mut rng, d, self.mtry).into_vec()
        } else {
            (0..d).collect()
        };
        // A zero-gain split is taken only when nothing better exists: impure
        // nodes such as XOR need one before any gain appears.
        let split = scan_splits(
            &node,
            &candidates,
            self.params.split_mode,
            self.params.min_samples_leaf as f64,
            &mut rng,
            -MIN_GAIN,
        );
        let Some(split) = split else {
            self.nodes.push(Self::leaf(&counts, total));
            return id;
        };

        self.importance_raw[split.feature] += total * split.gain;
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.x.get(r, split.feature) <= split.threshold);
        drop(rows);
        self.nodes.push(Node::Leaf {
            distribution: Vec::new(),
        });
        let left = self.build(left_rows, depth + 1);
        let right = self.build(right_rows, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }
}

/// Grows a classification tree.
///
/// `sample_weights` act as row multiplicities (a bootstrap resample is a
/// weight vector of draw counts); rows with zero weight are ignored. Node
/// randomness comes from a stream keyed by `(params.seed, node index)`,
/// with nodes numbered in pre-order.
pub fn fit_tree(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    sample_weights: Option<&[f64]>,
    params: &TreeParams,
) -> Result<DecisionTree> {
    params.validate()?;
    if x.n_rows() == 0 {
        return Err(Error::Empty("cannot fit a tree on zero samples"));
    }
    if y.len() != x.n_rows() {
        return Err(Error::DimensionMismatch {
            expected: x.n_rows(),
            found: y.len(),
        });
    }
    if let Some(&bad) = y.iter().find(|&&l| l >= n_classes) {
        return Err(Error::InvalidDataset(format!(
            "label {bad} out of range for {n_classes} classes"
        )));
    }
    let weights = match sample_weights {
        Some(w) if w.len() != x.n_rows() => {
            return Err(Error::DimensionMismatch {
                expected: x.n_rows(),
                found: w.len(),
            })
        }
        Some(w) => {
            if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidConfig(
                    "sample weights must be finite and non-negative".into(),
                ));
            }
            w.to_vec()
        }
        None => vec![1.0; x.n_rows()],
    };
    let rows: Vec<usize> = (0..x.n_rows()).filter(|&r| weights[r] > 0.0).collect();
    if rows.is_empty() {
        return Err(Error::Empty("all sample weights are zero"));
    }
    let mtry = params.max_features.resolve(x.n_cols())?;
    let mut builder = Builder {
        x,
        y,
        weights,
        n_classes,
        params,
        mtry,
        nodes: Vec::new(),
        importance_raw: vec![0.0; x.n_cols()],
    };
    builder.build(rows, 0);
    Ok(DecisionTree {
        nodes: builder.nodes,
        n_features_in: x.n_cols(),
        n_classes,
        importance_raw: builder.importance_raw,
    })
}

/// Probability vector for one sample.
pub fn tree_predict_proba(tree: &DecisionTree, sample: &[f64]) -> Result<Vec<f64>> {
    tree.predict_proba(sample).map(<[f64]>::to_vec)
}

pub fn tree_importance(tree: &DecisionTree) -> Vec<f64> {
    tree.importance()
}
