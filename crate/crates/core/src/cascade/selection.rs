use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted indices of the input columns a layer passes on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionMask {
    kept_indices: Vec<usize>,
}

impl SelectionMask {
    pub fn new(mut kept_indices: Vec<usize>, input_dim: usize) -> Result<Self> {
        kept_indices.sort_unstable();
        kept_indices.dedup();
        if kept_indices.is_empty() {
            return Err(Error::InvalidConfig("selection mask is empty".into()));
        }
        if kept_indices.last().is_some_and(|&i| i >= input_dim) {
            return Err(Error::DimensionMismatch {
                expected: input_dim,
                found: kept_indices[kept_indices.len() - 1] + 1,
            });
        }
        Ok(SelectionMask { kept_indices })
    }

    pub fn all(input_dim: usize) -> Self {
        SelectionMask {
            kept_indices: (0..input_dim).collect(),
        }
    }

    pub fn kept_indices(&self) -> &[usize] {
        &self.kept_indices
    }

    pub fn len(&self) -> usize {
        self.kept_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept_indices.is_empty()
    }
}

/// Elementwise mean of the per-forest importance vectors.
pub fn aggregate_importance(per_forest: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = per_forest
        .first()
        .ok_or(Error::Empty("no importance vectors"))?;
    let d = first.len();
    let mut mean = vec![0.0; d];
    for v in per_forest {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    let n = per_forest.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    Ok(mean)
}

/// Number of columns that survive a discard step.
///
/// `d - floor(ratio·d)` equals `ceil((1 - ratio)·d)`; the small slack keeps
/// products like `0.29 * 100` from rounding down to the wrong integer.
pub fn kept_count(d: usize, discard_ratio: f64, min_features: usize) -> usize {
    let discard = (discard_ratio * d as f64 + 1e-9).floor() as usize;
    (d - discard.min(d)).max(min_features.min(d))
}

/// Keeps the highest-importance columns; ties favour the lower index.
pub fn select_features(
    importance: &[f64],
    discard_ratio: f64,
    min_features: usize,
) -> Result<SelectionMask> {
    if importance.is_empty() {
        return Err(Error::Empty("no features to select from"));
    }
    if !(0.0..1.0).contains(&discard_ratio) {
        return Err(Error::InvalidConfig(format!(
            "discard_ratio {discard_ratio} outside [0, 1)"
        )));
    }
    let d = importance.len();
    let keep = kept_count(d, discard_ratio, min_features);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| importance[b].total_cmp(&importance[a]).then(a.cmp(&b)));
    order.truncate(keep);
    SelectionMask::new(order, d)
}
