//! Tabular datasets: loading, standardization, stratified folds and a
//! synthetic generator with known feature roles.

mod csv_io;
mod folds;
mod standardize;
mod synth;

pub use csv_io::{load_csv, load_csv_with_schema, load_feature_matrix};
pub use folds::{stratified_folds, stratified_holdout, FoldAssignment};
pub use standardize::{standardize_apply, standardize_fit, StandardizerStats, STDEV_FLOOR};
pub use synth::{synth_generate, FeatureRole, SyntheticSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Feature matrix with integer class labels and column/class names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        features: Matrix,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if features.n_rows() == 0 {
            return Err(Error::Empty("dataset has no samples"));
        }
        if features.n_cols() == 0 {
            return Err(Error::Empty("dataset has no feature columns"));
        }
        if labels.len() != features.n_rows() {
            return Err(Error::DimensionMismatch {
                expected: features.n_rows(),
                found: labels.len(),
            });
        }
        if feature_names.len() != features.n_cols() {
            return Err(Error::InvalidDataset(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                features.n_cols()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::InvalidDataset(format!(
                "label {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        if let Some(pos) = features.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite value at row {}, column {}",
                pos / features.n_cols(),
                pos % features.n_cols()
            )));
        }
        Ok(Dataset {
            features,
            labels,
            feature_names,
            class_names,
        })
    }

    /// Dataset with generated names `x0..` and `class_0..`.
    pub fn from_parts(features: Matrix, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        let feature_names = (0..features.n_cols()).map(|j| format!("x{j}")).collect();
        let class_names = (0..n_classes).map(|c| format!("class_{c}")).collect();
        Dataset::new(features, labels, feature_names, class_names)
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn n_samples(&self) -> usize {
        self.features.n_rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_cols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at `indices`, keeping names and the full class list.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        Dataset::new(
            self.features.select_rows(indices),
            indices.iter().map(|&i| self.labels[i]).collect(),
            self.feature_names.clone(),
            self.class_names.clone(),
        )
    }

    /// Same labels and names with a replacement feature matrix of equal shape.
    pub fn with_features(&self, features: Matrix) -> Result<Dataset> {
        if features.n_cols() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: features.n_cols(),
            });
        }
        Dataset::new(
            features,
            self.labels.clone(),
            self.feature_names.clone(),
            self.class_names.clone(),
        )
    }
}
