use serde::{Deserialize, Serialize};

use super::split::MIN_GAIN;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub(crate) const HESSIAN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

/// Regression tree over boosting residuals. Leaves hold Newton steps
/// `Σ residual / Σ hessian`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<RegNode>,
    n_features_in: usize,
    gain_raw: Vec<f64>,
}

impl RegressionTree {
    #[inline]
    pub fn predict(&self, sample: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                RegNode::Leaf { value } => return *value,
                RegNode::Split {
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

    pub fn nodes(&self) -> &[RegNode] {
        &self.nodes
    }

    pub fn n_features_in(&self) -> usize {
        self.n_features_in
    }

    /// Total variance-reduction gain per feature.
    pub fn gain_raw(&self) -> &[f64] {
        &self.gain_raw
    }
}

struct RegBuilder<'a> {
    x: &'a Matrix,
    residuals: &'a [f64],
    hessians: &'a [f64],
    max_depth: usize,
    nodes: Vec<RegNode>,
    gain_raw: Vec<f64>,
}

struct RegSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl RegBuilder<'_> {
    fn leaf_value(&self, rows: &[usize]) -> f64 {
        let g: f64 = rows.iter().map(|&r| self.residuals[r]).sum();
        let h: f64 = rows.iter().map(|&r| self.hessians[r]).sum();
        g / h.max(HESSIAN_FLOOR)
    }

    fn best_split(&self, rows: &[usize]) -> Option<RegSplit> {
        let n = rows.len() as f64;
        let total: f64 = rows.iter().map(|&r| self.residuals[r]).sum();
        let parent = total * total / n;
        let mut best: Option<RegSplit> = None;
        let mut column: Vec<(f64, f64)> = Vec::with_capacity(rows.len());
        for f in 0..self.x.n_cols() {
            column.clear();
            column.extend(rows.iter().map(|&r| (self.x.get(r, f), self.residuals[r])));
            column.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut sum_left = 0.0;
            for i in 0..column.len() - 1 {
                let (v, g) = column[i];
                sum_left += g;
                let next = column[i + 1].0;
                if next <= v {
                    continue;
                }
                let n_left = (i + 1) as f64;
                let n_right = n - n_left;
                let sum_right = total - sum_left;
                let gain = sum_left * sum_left / n_left + sum_right * sum_right / n_right - parent;
                if gain > MIN_GAIN && best.as_ref().is_none_or(|b| gain > b.gain) {
                    let mid = 0.5 * (v + next);
                    best = Some(RegSplit {
                        feature: f,
                        threshold: if mid < next { mid } else { v },
                        gain,
                    });
                }
            }
        }
        best
    }

    fn build(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let split = if depth < self.max_depth && rows.len() >= 2 {
            self.best_split(&rows)
        } else {
            None
        };
        let Some(split) = split else {
            let value = self.leaf_value(&rows);
            self.nodes.push(RegNode::Leaf { value });
            return id;
        };
        self.gain_raw[split.feature] += split.gain;
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| self.x.get(r, split.feature) <= split.threshold);
        self.nodes.push(RegNode::Leaf { value: 0.0 });
        let left = self.build(left_rows, depth + 1);
        let right = self.build(right_rows, depth + 1);
        self.nodes[id] = RegNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }
}

/// Fits a depth-limited regression tree to `residuals` (negative gradients)
/// by variance reduction, with Newton-step leaf values.
pub fn fit_regression_tree(
    x: &Matrix,
    residuals: &[f64],
    hessians: &[f64],
    max_depth: usize,
) -> Result<RegressionTree> {
    if x.n_rows() == 0 {
        return Err(Error::Empty("cannot fit a regression tree on zero samples"));
    }
    for len in [residuals.len(), hessians.len()] {
        if len != x.n_rows() {
            return Err(Error::DimensionMismatch {
                expected: x.n_rows(),
                found: len,
            });
        }
    }
    let mut builder = RegBuilder {
        x,
        residuals,
        hessians,
        max_depth,
        nodes: Vec::new(),
        gain_raw: vec![0.0; x.n_cols()],
    };
    builder.build((0..x.n_rows()).collect(), 0);
    Ok(RegressionTree {
        nodes: builder.nodes,
        n_features_in: x.n_cols(),
        gain_raw: builder.gain_raw,
    })
}
