//! The forest families a cascade layer is built from: random forests,
//! extremely randomized trees and gradient-boosted trees. All three expose
//! class probabilities and a normalized importance vector.

mod bagging;
mod boosting;

pub use bagging::{fit_extra_trees, fit_random_forest};
pub use boosting::{fit_gbdt, Booster, Stage};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tree::{DecisionTree, MaxFeatures, SplitMode, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForestKind {
    RandomForest,
    ExtraTrees,
    Gbdt,
}

impl ForestKind {
    pub fn short_name(self) -> &'static str {
        match self {
            ForestKind::RandomForest => "rf",
            ForestKind::ExtraTrees => "et",
            ForestKind::Gbdt => "gbdt",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub kind: ForestKind,
    pub n_trees: usize,
    pub tree_params: TreeParams,
    pub bootstrap: bool,
    pub learning_rate: f64,
    pub gbdt_depth: usize,
    pub seed: u64,
}

impl ForestConfig {
    /// Bootstrap resampling, `ceil(sqrt(d))` exhaustive candidates per node.
    pub fn random_forest(n_trees: usize) -> Self {
        ForestConfig {
            kind: ForestKind::RandomForest,
            n_trees,
            tree_params: TreeParams {
                max_features: MaxFeatures::Sqrt,
                ..TreeParams::default()
            },
            bootstrap: true,
            learning_rate: 0.1,
            gbdt_depth: 3,
            seed: 0,
        }
    }

    /// Full sample per tree, random thresholds over `ceil(sqrt(d))` candidates.
    pub fn extra_trees(n_trees: usize) -> Self {
        ForestConfig {
            kind: ForestKind::ExtraTrees,
            n_trees,
            tree_params: TreeParams {
                max_features: MaxFeatures::Sqrt,
                split_mode: SplitMode::RandomThreshold,
                ..TreeParams::default()
            },
            bootstrap: false,
            learning_rate: 0.1,
            gbdt_depth: 3,
            seed: 0,
        }
    }

    /// Logistic-loss boosting with depth-3 trees and learning rate 0.1.
    pub fn gbdt(n_trees: usize) -> Self {
        ForestConfig {
            kind: ForestKind::Gbdt,
            n_trees,
            tree_params: TreeParams::default(),
            bootstrap: false,
            learning_rate: 0.1,
            gbdt_depth: 3,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.tree_params.validate()?;
        match self.kind {
            ForestKind::Gbdt => {
                if !(0.0..=1.0).contains(&self.learning_rate) {
                    return Err(Error::InvalidConfig(format!(
                        "learning_rate {} outside [0, 1]",
                        self.learning_rate
                    )));
                }
            }
            ForestKind::RandomForest | ForestKind::ExtraTrees => {
                if self.n_trees == 0 {
                    return Err(Error::InvalidConfig(
                        "a bagged forest needs at least one tree".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for ForestConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.short_name(), self.n_trees)
    }
}

impl FromStr for ForestConfig {
    type Err = Error;

    /// Parses `kind:n_trees` with kind one of `gbdt`, `rf`, `et`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, count) = s.trim().split_once(':').ok_or_else(|| {
            Error::InvalidConfig(format!("forest entry '{s}' is not kind:n_trees"))
        })?;
        let n_trees: usize = count
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad tree count in forest entry '{s}'")))?;
        let config = match kind.trim() {
            "gbdt" | "xgb" => ForestConfig::gbdt(n_trees),
            "rf" => ForestConfig::random_forest(n_trees),
            "et" => ForestConfig::extra_trees(n_trees),
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown forest kind '{other}'"
                )))
            }
        };
        config.validate()?;
        Ok(config)
    }
}

/// Parses a comma-separated roster such as `gbdt:20,rf:20,et:20,et:50`.
pub fn parse_roster(s: &str) -> Result<Vec<ForestConfig>> {
    let forests = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<_>>>()?;
    if forests.is_empty() {
        return Err(Error::InvalidConfig("forest roster is empty".into()));
    }
    Ok(forests)
}

pub fn roster_string(forests: &[ForestConfig]) -> String {
    forests
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForestBody {
    Bagged {
        trees: Vec<DecisionTree>,
    },
    /// One booster for binary tasks, one per class (one-vs-rest) otherwise.
    Boosted {
        boosters: Vec<Booster>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    kind: ForestKind,
    n_features_in: usize,
    n_classes: usize,
    importance: Vec<f64>,
    body: ForestBody,
}

impl ForestModel {
    pub fn kind(&self) -> ForestKind {
        self.kind
    }

    pub fn n_features_in(&self) -> usize {
        self.n_features_in
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn body(&self) -> &ForestBody {
        &self.body
    }

    /// Normalized importance: entries ≥ 0 summing to 1.
    pub fn importance(&self) -> &[f64] {
        &self.importance
    }

    pub fn trees(&self) -> &[DecisionTree] {
        match &self.body {
            ForestBody::Bagged { trees } => trees,
            ForestBody::Boosted { .. } => &[],
        }
    }

    /// Per-stage training loss of each booster (empty for bagged forests).
    pub fn training_loss(&self) -> Vec<&[f64]> {
        match &self.body {
            ForestBody::Bagged { .. } => Vec::new(),
            ForestBody::Boosted { boosters } => {
                boosters.iter().map(|b| b.train_loss.as_slice()).collect()
            }
        }
    }

    /// Writes the class distribution of `sample` into `out` (length C).
    pub(crate) fn proba_into(&self, sample: &[f64], out: &mut [f64]) {
        match &self.body {
            ForestBody::Bagged { trees } => {
                out.iter_mut().for_each(|v| *v = 0.0);
                for t in trees {
                    for (o, p) in out.iter_mut().zip(t.leaf_for(sample)) {
                        *o += p;
                    }
                }
                let n = trees.len() as f64;
                out.iter_mut().for_each(|v| *v /= n);
            }
            ForestBody::Boosted { boosters } => {
                if boosters.len() == 1 {
                    let p1 = boosting::sigmoid(boosters[0].score(sample));
                    out[0] = 1.0 - p1;
                    out[1] = p1;
                } else {
                    for (o, b) in out.iter_mut().zip(boosters) {
                        *o = boosting::sigmoid(b.score(sample));
                    }
                    let total: f64 = out.iter().sum();
                    if total > 0.0 {
                        out.iter_mut().for_each(|v| *v /= total);
                    } else {
                        let u = 1.0 / out.len() as f64;
                        out.iter_mut().for_each(|v| *v = u);
                    }
                }
            }
        }
    }

    pub fn predict_proba(&self, samples: &Matrix) -> Result<Matrix> {
        if samples.n_cols() != self.n_features_in {
            return Err(Error::DimensionMismatch {
                expected: self.n_features_in,
                found: samples.n_cols(),
            });
        }
        let mut out = Matrix::zeros(samples.n_rows(), self.n_classes);
        for i in 0..samples.n_rows() {
            self.proba_into(samples.row(i), out.row_mut(i));
        }
        Ok(out)
    }
}

/// Fits whichever family `config.kind` names.
pub fn fit_forest(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    config: &ForestConfig,
) -> Result<ForestModel> {
    match config.kind {
        ForestKind::RandomForest => fit_random_forest(x, y, n_classes, config),
        ForestKind::ExtraTrees => fit_extra_trees(x, y, n_classes, config),
        ForestKind::Gbdt => fit_gbdt(x, y, n_classes, config),
    }
}

pub fn forest_predict_proba(model: &ForestModel, samples: &Matrix) -> Result<Matrix> {
    model.predict_proba(samples)
}

pub fn forest_importance(model: &ForestModel) -> Vec<f64> {
    model.importance.clone()
}

fn check_inputs(x: &Matrix, y: &[usize], n_classes: usize) -> Result<()> {
    if x.n_rows() == 0 || x.n_cols() == 0 {
        return Err(Error::Empty("forest input has no rows or no columns"));
    }
    if y.len() != x.n_rows() {
        return Err(Error::DimensionMismatch {
            expected: x.n_rows(),
            found: y.len(),
        });
    }
    let mut present = vec![false; n_classes];
    for &l in y {
        if l >= n_classes {
            return Err(Error::InvalidDataset(format!(
                "label {l} out of range for {n_classes} classes"
            )));
        }
        present[l] = true;
    }
    if present.iter().filter(|&&p| p).count() < 2 {
        let only = y.first().copied().unwrap_or(0);
        return Err(Error::SingleClass(format!("class index {only}")));
    }
    Ok(())
}
