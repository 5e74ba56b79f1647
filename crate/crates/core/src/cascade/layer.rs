use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{CascadeConfig, MaskScope, ValidationMetric};
use super::selection::{aggregate_importance, select_features, SelectionMask};
use crate::dataset::FoldAssignment;
use crate::error::{Error, Result};
use crate::evaluation::auc_mann_whitney;
use crate::forest::{fit_forest, ForestConfig, ForestModel};
use crate::matrix::Matrix;
use crate::seed::derive_seed;
use crate::tree::argmax;

/// One cascade layer: N deployed forests, their mean importance over the
/// layer input, and the mask applied to that input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerModel {
    pub forests: Vec<ForestModel>,
    pub importance_mean: Vec<f64>,
    pub mask: SelectionMask,
    pub input_dim: usize,
    /// Leading input columns that are carried features; the remainder is the
    /// previous layer's probability block.
    pub carried_dim: usize,
    pub output_dim: usize,
}

impl LayerModel {
    pub fn n_forests(&self) -> usize {
        self.forests.len()
    }

    pub fn forest_probas(&self, input: &Matrix) -> Result<Vec<Matrix>> {
        self.forests
            .iter()
            .map(|f| f.predict_proba(input))
            .collect()
    }

    /// `[input[:, mask] ‖ p_1 ‖ … ‖ p_N]`
    pub fn transform(&self, input: &Matrix) -> Result<Matrix> {
        if input.n_cols() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                found: input.n_cols(),
            });
        }
        let probas = self.forest_probas(input)?;
        assemble_output(input, &self.mask, &probas)
    }

    /// Unweighted mean of the N forest distributions.
    pub fn predict_proba(&self, input: &Matrix) -> Result<Matrix> {
        if input.n_cols() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                found: input.n_cols(),
            });
        }
        Ok(average_probas(&self.forest_probas(input)?))
    }
}

pub(crate) fn assemble_output(
    input: &Matrix,
    mask: &SelectionMask,
    probas: &[Matrix],
) -> Result<Matrix> {
    let kept = input.select_columns(mask.kept_indices());
    let mut blocks: Vec<&Matrix> = Vec::with_capacity(1 + probas.len());
    blocks.push(&kept);
    blocks.extend(probas.iter());
    Matrix::hconcat(&blocks)
}

pub(crate) fn average_probas(probas: &[Matrix]) -> Matrix {
    let mut out = Matrix::zeros(probas[0].n_rows(), probas[0].n_cols());
    for p in probas {
        for i in 0..p.n_rows() {
            for (o, v) in out.row_mut(i).iter_mut().zip(p.row(i)) {
                *o += v;
            }
        }
    }
    let n = probas.len() as f64;
    for i in 0..out.n_rows() {
        out.row_mut(i).iter_mut().for_each(|v| *v /= n);
    }
    out
}

/// Result of fitting one layer.
#[derive(Debug, Clone)]
pub struct LayerFit {
    pub model: LayerModel,
    /// Training rows mapped through the layer using out-of-fold
    /// probabilities: `[kept columns ‖ N·C cross-fit probabilities]`.
    pub augmented: Matrix,
    /// Out-of-fold class probabilities, one matrix per forest.
    pub oof_probas: Vec<Matrix>,
    /// Mean over folds of the validation metric of the averaged OOF
    /// probabilities.
    pub score: f64,
}

fn forest_seed(config: &CascadeConfig, layer: usize, forest: usize, fold: usize) -> u64 {
    derive_seed(config.seed, &[layer as u64, forest as u64, fold as u64])
}

/// Fits one layer on `x` (layer input) with cross-fitted augmentation.
///
/// For every forest, each fold is predicted by a copy trained on the other
/// folds; a final copy trained on all rows is kept for deployment and
/// supplies the importances. `carried_dim` is the number of leading input
/// columns that are carried features.
pub fn fit_layer(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    config: &CascadeConfig,
    layer_index: usize,
    carried_dim: usize,
    folds: &FoldAssignment,
) -> Result<LayerFit> {
    if y.len() != x.n_rows() || folds.fold_of_sample.len() != x.n_rows() {
        return Err(Error::DimensionMismatch {
            expected: x.n_rows(),
            found: y.len(),
        });
    }
    if carried_dim == 0 || carried_dim > x.n_cols() {
        return Err(Error::InvalidConfig(format!(
            "carried_dim {carried_dim} outside [1, {}]",
            x.n_cols()
        )));
    }
    let k = folds.k;
    let n_forests = config.forests.len();
    let fold_rows: Vec<(Vec<usize>, Vec<usize>)> = (0..k)
        .map(|f| (folds.train_indices(f), folds.test_indices(f)))
        .collect();
    let fold_data: Vec<(Matrix, Vec<usize>, Matrix)> = fold_rows
        .iter()
        .map(|(train, test)| {
            (
                x.select_rows(train),
                train.iter().map(|&i| y[i]).collect(),
                x.select_rows(test),
            )
        })
        .collect();

    // Jobs (forest, fold); fold == k is the deployment refit on all rows.
    let jobs: Vec<(usize, usize)> = (0..n_forests)
        .flat_map(|n| (0..=k).map(move |f| (n, f)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(n, f)| {
            let cfg = ForestConfig {
                seed: forest_seed(config, layer_index, n, f),
                ..config.forests[n].clone()
            };
            if f == k {
                fit_forest(x, y, n_classes, &cfg).map(|m| (m, None))
            } else {
                let (train_x, train_y, test_x) = &fold_data[f];
                let m = fit_forest(train_x, train_y, n_classes, &cfg)?;
                let p = m.predict_proba(test_x)?;
                Ok((m, Some(p)))
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut forests = Vec::with_capacity(n_forests);
    let mut oof_probas = vec![Matrix::zeros(x.n_rows(), n_classes); n_forests];
    for (&(n, f), (model, held_out)) in jobs.iter().zip(results) {
        match held_out {
            None => forests.push(model),
            Some(p) => {
                for (r, &row) in fold_rows[f].1.iter().enumerate() {
                    oof_probas[n].row_mut(row).copy_from_slice(p.row(r));
                }
            }
        }
    }

    let per_forest: Vec<Vec<f64>> = forests.iter().map(|f| f.importance().to_vec()).collect();
    let importance_mean = aggregate_importance(&per_forest)?;
    let mask = match config.mask_scope {
        MaskScope::CarriedOnly => select_features(
            &importance_mean[..carried_dim],
            config.discard_ratio,
            config.min_features,
        )?,
        MaskScope::FullInput => {
            select_features(&importance_mean, config.discard_ratio, config.min_features)?
        }
    };
    let augmented = assemble_output(x, &mask, &oof_probas)?;
    let averaged = average_probas(&oof_probas);
    let score = validation_score(&averaged, y, &fold_rows, config.validation_metric)?;
    let output_dim = mask.len() + n_forests * n_classes;
    Ok(LayerFit {
        model: LayerModel {
            forests,
            importance_mean,
            mask,
            input_dim: x.n_cols(),
            carried_dim,
            output_dim,
        },
        augmented,
        oof_probas,
        score,
    })
}

fn validation_score(
    probas: &Matrix,
    y: &[usize],
    fold_rows: &[(Vec<usize>, Vec<usize>)],
    metric: ValidationMetric,
) -> Result<f64> {
    let mut total = 0.0;
    for (_, test) in fold_rows {
        total += match metric {
            ValidationMetric::Accuracy => {
                let correct = test
                    .iter()
                    .filter(|&&i| argmax(probas.row(i)) == y[i])
                    .count();
                correct as f64 / test.len() as f64
            }
            ValidationMetric::Auc => {
                if probas.n_cols() != 2 {
                    return Err(Error::NotBinary(probas.n_cols()));
                }
                let scores: Vec<f64> = test.iter().map(|&i| probas.get(i, 1)).collect();
                let labels: Vec<usize> = test.iter().map(|&i| y[i]).collect();
                auc_mann_whitney(&scores, &labels, 1)?
            }
        };
    }
    Ok(total / fold_rows.len() as f64)
}
