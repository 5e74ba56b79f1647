use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_inputs, ForestBody, ForestConfig, ForestKind, ForestModel};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::tree::{fit_regression_tree, normalize_or_uniform, RegressionTree};

const PRIOR_CLAMP: f64 = 1e-12;
const MAX_HALVINGS: usize = 40;

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
#[inline]
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn mean_log_loss(scores: &[f64], targets: &[bool]) -> f64 {
    let total: f64 = scores
        .iter()
        .zip(targets)
        .map(|(&s, &t)| if t { softplus(-s) } else { softplus(s) })
        .sum();
    total / scores.len() as f64
}

/// One boosting round: a regression tree and the factor its leaf values
/// are scaled by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub weight: f64,
    pub tree: RegressionTree,
}

/// Binary logistic booster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Booster {
    pub base_score: f64,
    pub stages: Vec<Stage>,
    /// Mean training log-loss before the first stage and after each stage.
    pub train_loss: Vec<f64>,
}

impl Booster {
    #[inline]
    pub fn score(&self, sample: &[f64]) -> f64 {
        self.stages.iter().fold(self.base_score, |acc, s| {
            acc + s.weight * s.tree.predict(sample)
        })
    }

    /// Fits on boolean targets; returns the booster and per-feature gain.
    fn fit(x: &Matrix, targets: &[bool], config: &ForestConfig) -> Result<(Booster, Vec<f64>)> {
        let n = targets.len();
        let positives = targets.iter().filter(|&&t| t).count();
        let prior = (positives as f64 / n as f64).clamp(PRIOR_CLAMP, 1.0 - PRIOR_CLAMP);
        let base_score = (prior / (1.0 - prior)).ln();
        let mut scores = vec![base_score; n];
        let mut loss = mean_log_loss(&scores, targets);
        let mut train_loss = vec![loss];
        let mut stages = Vec::with_capacity(config.n_trees);
        let mut gains = vec![0.0; x.n_cols()];
        let mut residuals = vec![0.0; n];
        let mut hessians = vec![0.0; n];
        let mut candidate = vec![0.0; n];

        for _ in 0..config.n_trees {
            for i in 0..n {
                let p = sigmoid(scores[i]);
                residuals[i] = if targets[i] { 1.0 - p } else { -p };
                hessians[i] = p * (1.0 - p);
            }
            let tree = fit_regression_tree(x, &residuals, &hessians, config.gbdt_depth)?;
            let steps: Vec<f64> = (0..n).map(|i| tree.predict(x.row(i))).collect();

            // Backtrack so the stage never raises the training loss.
            let mut weight = config.learning_rate;
            let mut halvings = 0;
            let new_loss = loop {
                for i in 0..n {
                    candidate[i] = scores[i] + weight * steps[i];
                }
                let l = mean_log_loss(&candidate, targets);
                if l <= loss {
                    break l;
                }
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    weight = 0.0;
                    candidate.copy_from_slice(&scores);
                    break loss;
                }
                weight *= 0.5;
            };
            std::mem::swap(&mut scores, &mut candidate);
            loss = new_loss;
            train_loss.push(loss);
            for (g, v) in gains.iter_mut().zip(tree.gain_raw()) {
                *g += v;
            }
            stages.push(Stage { weight, tree });
        }
        Ok((
            Booster {
                base_score,
                stages,
                train_loss,
            },
            gains,
        ))
    }
}

/// Gradient-boosted trees with logistic loss and Newton leaf values.
///
/// Binary tasks boost the log-odds of class 1; with more classes one
/// booster per class is fit one-vs-rest and the sigmoids are normalized at
/// prediction time. Importance is the total split gain per feature.
pub fn fit_gbdt(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    config: &ForestConfig,
) -> Result<ForestModel> {
    config.validate()?;
    check_inputs(x, y, n_classes)?;
    let positive_classes: Vec<usize> = if n_classes == 2 {
        vec![1]
    } else {
        (0..n_classes).collect()
    };
    let fitted = positive_classes
        .par_iter()
        .map(|&c| {
            let targets: Vec<bool> = y.iter().map(|&l| l == c).collect();
            Booster::fit(x, &targets, config)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut gains = vec![0.0; x.n_cols()];
    let mut boosters = Vec::with_capacity(fitted.len());
    for (b, g) in fitted {
        for (acc, v) in gains.iter_mut().zip(&g) {
            *acc += v;
        }
        boosters.push(b);
    }
    Ok(ForestModel {
        kind: ForestKind::Gbdt,
        n_features_in: x.n_cols(),
        n_classes,
        importance: normalize_or_uniform(&gains),
        body: ForestBody::Boosted { boosters },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_and_softplus_are_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
        assert!((softplus(800.0) - 800.0).abs() < 1e-9);
        assert!(softplus(-800.0) >= 0.0);
    }
}
