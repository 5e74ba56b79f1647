use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::ForestConfig;

/// Which part of a layer's input the selection unit may discard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskScope {
    /// Only the carried features are ranked and pruned; the previous
    /// layer's probability block is consumed and replaced by the fresh one.
    CarriedOnly,
    /// Every input column, previous probability columns included, competes
    /// for a place in the next layer.
    FullInput,
}

impl std::str::FromStr for MaskScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "carried-only" | "carried_only" => Ok(MaskScope::CarriedOnly),
            "full-input" | "full_input" => Ok(MaskScope::FullInput),
            other => Err(Error::InvalidConfig(format!(
                "unknown mask scope '{other}'"
            ))),
        }
    }
}

/// Score used to decide whether another layer helps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationMetric {
    Accuracy,
    /// Binary tasks only; scored on class 1.
    Auc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeConfig {
    pub forests: Vec<ForestConfig>,
    pub discard_ratio: f64,
    pub n_aug_folds: usize,
    pub max_layers: usize,
    pub patience: usize,
    pub min_features: usize,
    pub mask_scope: MaskScope,
    pub validation_metric: ValidationMetric,
    pub seed: u64,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        CascadeConfig {
            forests: default_forests(),
            discard_ratio: 0.2,
            n_aug_folds: 5,
            max_layers: 10,
            patience: 1,
            min_features: 16,
            mask_scope: MaskScope::CarriedOnly,
            validation_metric: ValidationMetric::Accuracy,
            seed: 0,
        }
    }
}

/// Boosting with 20 trees, a 20-tree random forest and extra-trees with 20
/// and 50 trees.
pub fn default_forests() -> Vec<ForestConfig> {
    vec![
        ForestConfig::gbdt(20),
        ForestConfig::random_forest(20),
        ForestConfig::extra_trees(20),
        ForestConfig::extra_trees(50),
    ]
}

impl CascadeConfig {
    /// The same cascade with the selection unit switched off.
    pub fn without_selection(&self) -> CascadeConfig {
        CascadeConfig {
            discard_ratio: 0.0,
            ..self.clone()
        }
    }

    pub fn selection_enabled(&self) -> bool {
        self.discard_ratio > 0.0
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.forests.is_empty() {
            return Err(Error::InvalidConfig(
                "a cascade layer needs at least one forest".into(),
            ));
        }
        for f in &self.forests {
            f.validate()?;
        }
        if !(0.0..1.0).contains(&self.discard_ratio) {
            return Err(Error::InvalidConfig(format!(
                "discard_ratio {} outside [0, 1)",
                self.discard_ratio
            )));
        }
        if self.n_aug_folds < 2 {
            return Err(Error::InvalidConfig(
                "n_aug_folds must be at least 2".into(),
            ));
        }
        if self.max_layers < 1 || self.patience < 1 || self.min_features < 1 {
            return Err(Error::InvalidConfig(
                "max_layers, patience and min_features must be at least 1".into(),
            ));
        }
        Ok(())
    }
}
