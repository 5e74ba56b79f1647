use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Gains at or below this are treated as no improvement.
pub const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    /// Scan every midpoint between consecutive distinct values.
    Exhaustive,
    /// One uniform threshold in (min, max) per candidate feature.
    RandomThreshold,
}

/// Gini impurity `1 - Σ p_c²` of (possibly weighted) class counts.
pub fn gini_impurity(class_counts: &[f64]) -> Result<f64> {
    let total: f64 = class_counts.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::Empty("gini impurity of an empty node"));
    }
    Ok(gini(class_counts, total))
}

#[inline]
pub(crate) fn gini(counts: &[f64], total: f64) -> f64 {
    1.0 - counts
        .iter()
        .map(|&c| (c / total) * (c / total))
        .sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Weighted Gini decrease normalized by the node weight.
    pub gain: f64,
}

/// Rows reaching a node, with their sample weights (parallel arrays).
pub struct NodeSamples<'a> {
    pub x: &'a Matrix,
    pub y: &'a [usize],
    pub n_classes: usize,
    pub rows: &'a [usize],
    pub weights: &'a [f64],
}

impl NodeSamples<'_> {
    pub(crate) fn class_counts(&self) -> (Vec<f64>, f64) {
        let mut counts = vec![0.0; self.n_classes];
        for &r in self.rows {
            counts[self.y[r]] += self.weights[r];
        }
        let total = counts.iter().sum();
        (counts, total)
    }
}

fn split_gain(parent: f64, left: &[f64], w_left: f64, right: &[f64], w_right: f64) -> f64 {
    let w = w_left + w_right;
    parent - (w_left / w) * gini(left, w_left) - (w_right / w) * gini(right, w_right)
}

/// Best Gini split among `candidates`.
///
/// Candidates are visited in ascending feature order and a later split
/// replaces the incumbent only on strictly larger gain, so ties resolve to
/// the lowest feature and then the lowest threshold. Splits leaving less than
/// `min_samples_leaf` weight on either side are skipped.
pub fn best_split<R: Rng>(
    node: &NodeSamples<'_>,
    candidates: &[usize],
    mode: SplitMode,
    min_samples_leaf: f64,
    rng: &mut R,
) -> Option<Split> {
    scan_splits(node, candidates, mode, min_samples_leaf, rng, MIN_GAIN)
}

/// As [`best_split`], accepting any split whose gain exceeds `gain_floor`.
pub(crate) fn scan_splits<R: Rng>(
    node: &NodeSamples<'_>,
    candidates: &[usize],
    mode: SplitMode,
    min_samples_leaf: f64,
    rng: &mut R,
    gain_floor: f64,
) -> Option<Split> {
    let (counts, total) = node.class_counts();
    if total <= 0.0 {
        return None;
    }
    let parent = gini(&counts, total);
    let mut sorted_candidates = candidates.to_vec();
    sorted_candidates.sort_unstable();

    let mut best: Option<Split> = None;
    let mut consider = |s: Split| {
        if s.gain > gain_floor && best.is_none_or(|b| s.gain > b.gain) {
            best = Some(s);
        }
    };
    let mut column: Vec<(f64, usize, f64)> = Vec::with_capacity(node.rows.len());
    for &f in &sorted_candidates {
        match mode {
            SplitMode::Exhaustive => {
                column.clear();
                column.extend(
                    node.rows
                        .iter()
                        .map(|&r| (node.x.get(r, f), node.y[r], node.weights[r])),
                );
                column.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut left = vec![0.0; node.n_classes];
                let mut w_left = 0.0;
                for i in 0..column.len() - 1 {
                    let (v, label, w) = column[i];
                    left[label] += w;
                    w_left += w;
                    let next = column[i + 1].0;
                    if next <= v {
                        continue;
                    }
                    let w_right = total - w_left;
                    if w_left < min_samples_leaf || w_right < min_samples_leaf {
                        continue;
                    }
                    let right: Vec<f64> = counts.iter().zip(&left).map(|(c, l)| c - l).collect();
                    let mid = 0.5 * (v + next);
                    let threshold = if mid < next { mid } else { v };
                    consider(Split {
                        feature: f,
                        threshold,
                        gain: split_gain(parent, &left, w_left, &right, w_right),
                    });
                }
            }
            SplitMode::RandomThreshold => {
                let (lo, hi) =
                    node.rows
                        .iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                            let v = node.x.get(r, f);
                            (lo.min(v), hi.max(v))
                        });
                if hi.is_nan() || lo.is_nan() || hi <= lo {
                    continue;
                }
                let threshold = rng.random_range(lo..hi);
                let mut left = vec![0.0; node.n_classes];
                let mut w_left = 0.0;
                for &r in node.rows {
                    if node.x.get(r, f) <= threshold {
                        left[node.y[r]] += node.weights[r];
                        w_left += node.weights[r];
                    }
                }
                let w_right = total - w_left;
                if w_left < min_samples_leaf
                    || w_right < min_samples_leaf
                    || w_left <= 0.0
                    || w_right <= 0.0
                {
                    continue;
                }
                let right: Vec<f64> = counts.iter().zip(&left).map(|(c, l)| c - l).collect();
                consider(Split {
                    feature: f,
                    threshold,
                    gain: split_gain(parent, &left, w_left, &right, w_right),
                });
            }
        }
    }
    best
}
