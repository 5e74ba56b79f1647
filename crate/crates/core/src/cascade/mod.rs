//! The adaptive-feature-selection deep forest.
//!
//! Layer ℓ receives `[carried features ‖ previous probability block]`,
//! fits N forests, averages their importances over that input, keeps the
//! top `1 - discard_ratio` share of the (scope-dependent) columns and emits
//! `[kept columns ‖ N·C fresh probabilities]`. Layers are added while the
//! cross-validated score improves; the final prediction averages the last
//! layer's forests and takes the argmax.

mod config;
mod layer;
mod selection;

pub use config::{default_forests, CascadeConfig, MaskScope, ValidationMetric};
pub use layer::{fit_layer, LayerFit, LayerModel};
pub use selection::{aggregate_importance, kept_count, select_features, SelectionMask};

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, StandardizerStats};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tree::argmax;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub layer: usize,
    pub score: f64,
    pub input_dim: usize,
    pub n_kept: usize,
    pub output_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeModel {
    pub layers: Vec<LayerModel>,
    pub n_original_features: usize,
    pub n_classes: usize,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    pub standardizer: StandardizerStats,
    /// Every fitted layer, including those dropped by truncation.
    pub training_log: Vec<LayerRecord>,
    pub config: CascadeConfig,
}

/// Where a column of some layer's input came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnOrigin {
    Original(usize),
    Probability {
        layer: usize,
        forest: usize,
        class: usize,
    },
}

/// A fitted cascade plus the cross-fitted output of its last layer on the
/// training rows.
#[derive(Debug, Clone)]
pub struct CascadeFit {
    pub model: CascadeModel,
    pub train_output: Matrix,
}

/// Grows a cascade greedily on `data`.
pub fn fit_cascade(data: &Dataset, config: &CascadeConfig) -> Result<CascadeModel> {
    fit_cascade_with_output(data, config).map(|f| f.model)
}

pub fn fit_cascade_with_output(data: &Dataset, config: &CascadeConfig) -> Result<CascadeFit> {
    config.validate()?;
    if config.validation_metric == ValidationMetric::Auc && data.n_classes() != 2 {
        return Err(Error::NotBinary(data.n_classes()));
    }
    let folds = data.stratified_folds(config.n_aug_folds, config.seed)?;
    let standardizer = StandardizerStats::fit(data.features())?;
    let mut input = standardizer.apply(data.features())?;
    let mut carried_dim = input.n_cols();

    let mut layers: Vec<LayerModel> = Vec::new();
    let mut training_log = Vec::new();
    let mut best: Option<(usize, f64, Matrix)> = None;
    let mut stale = 0;
    for layer_index in 0..config.max_layers {
        let fit = fit_layer(
            &input,
            data.labels(),
            data.n_classes(),
            config,
            layer_index,
            carried_dim,
            &folds,
        )?;
        training_log.push(LayerRecord {
            layer: layer_index,
            score: fit.score,
            input_dim: fit.model.input_dim,
            n_kept: fit.model.mask.len(),
            output_dim: fit.model.output_dim,
        });
        carried_dim = fit.model.mask.len();
        layers.push(fit.model);
        let improved = best.as_ref().is_none_or(|(_, s, _)| fit.score > *s);
        if improved {
            best = Some((layer_index, fit.score, fit.augmented.clone()));
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                break;
            }
        }
        input = fit.augmented;
    }
    let (best_layer, _, train_output) = best.expect("max_layers >= 1");
    layers.truncate(best_layer + 1);
    Ok(CascadeFit {
        model: CascadeModel {
            layers,
            n_original_features: data.n_features(),
            n_classes: data.n_classes(),
            feature_names: data.feature_names().to_vec(),
            class_names: data.class_names().to_vec(),
            standardizer,
            training_log,
            config: config.clone(),
        },
        train_output,
    })
}

impl CascadeModel {
    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn last_layer(&self) -> &LayerModel {
        self.layers.last().expect("cascade has at least one layer")
    }

    /// Score of the kept prefix (the best logged score).
    pub fn best_score(&self) -> f64 {
        self.training_log[self.layers.len() - 1].score
    }

    fn check_width(&self, samples: &Matrix) -> Result<()> {
        if samples.n_cols() != self.n_original_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_original_features,
                found: samples.n_cols(),
            });
        }
        Ok(())
    }

    /// Standardized samples pushed through every layer but the last.
    pub fn last_layer_input(&self, samples: &Matrix) -> Result<Matrix> {
        self.check_width(samples)?;
        let mut x = self.standardizer.apply(samples)?;
        for layer in &self.layers[..self.layers.len() - 1] {
            x = layer.transform(&x)?;
        }
        Ok(x)
    }

    /// Output of the last layer: kept columns followed by N·C probabilities.
    pub fn transform(&self, samples: &Matrix) -> Result<Matrix> {
        self.last_layer()
            .transform(&self.last_layer_input(samples)?)
    }

    pub fn predict_proba(&self, samples: &Matrix) -> Result<Matrix> {
        self.last_layer()
            .predict_proba(&self.last_layer_input(samples)?)
    }

    /// MAP label per row; ties go to the lower class index.
    pub fn predict_label(&self, samples: &Matrix) -> Result<Vec<usize>> {
        let p = self.predict_proba(samples)?;
        Ok(p.rows().map(argmax).collect())
    }

    /// Origin of every input column of layer `layer`.
    pub fn input_origins(&self, layer: usize) -> Vec<ColumnOrigin> {
        let mut origins: Vec<ColumnOrigin> = (0..self.n_original_features)
            .map(ColumnOrigin::Original)
            .collect();
        for (l, model) in self.layers.iter().enumerate().take(layer) {
            origins = output_origins(&origins, model, l, self.n_classes);
        }
        origins
    }

    /// Origin of every column of the last layer's output.
    pub fn output_origins(&self) -> Vec<ColumnOrigin> {
        let last = self.layers.len() - 1;
        output_origins(
            &self.input_origins(last),
            &self.layers[last],
            last,
            self.n_classes,
        )
    }

    /// Original feature indices still carried in the last layer's output.
    pub fn carried_original_features(&self) -> Vec<usize> {
        self.output_origins()
            .into_iter()
            .filter_map(|o| match o {
                ColumnOrigin::Original(j) => Some(j),
                ColumnOrigin::Probability { .. } => None,
            })
            .collect()
    }

    /// Last-layer importance mass attributed to each original feature.
    /// Mass on probability columns is not attributed; features discarded
    /// by earlier masks get zero.
    pub fn original_feature_importance(&self) -> Vec<f64> {
        let last = self.layers.len() - 1;
        let mut out = vec![0.0; self.n_original_features];
        for (origin, &imp) in self
            .input_origins(last)
            .iter()
            .zip(&self.layers[last].importance_mean)
        {
            if let ColumnOrigin::Original(j) = origin {
                out[*j] += imp;
            }
        }
        out
    }
}

fn output_origins(
    input: &[ColumnOrigin],
    layer: &LayerModel,
    index: usize,
    n_classes: usize,
) -> Vec<ColumnOrigin> {
    let mut out: Vec<ColumnOrigin> = layer
        .mask
        .kept_indices()
        .iter()
        .map(|&i| input[i])
        .collect();
    for forest in 0..layer.forests.len() {
        for class in 0..n_classes {
            out.push(ColumnOrigin::Probability {
                layer: index,
                forest,
                class,
            });
        }
    }
    out
}

pub fn cascade_transform(model: &CascadeModel, samples: &Matrix) -> Result<Matrix> {
    model.transform(samples)
}

pub fn cascade_predict_proba(model: &CascadeModel, samples: &Matrix) -> Result<Matrix> {
    model.predict_proba(samples)
}

pub fn cascade_predict_label(model: &CascadeModel, samples: &Matrix) -> Result<Vec<usize>> {
    model.predict_label(samples)
}
