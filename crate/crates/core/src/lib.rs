//! Adaptive feature selection guided deep forest (AFS-DF).
//!
//! A cascade of heterogeneous forests for tabular classification. Every
//! layer fits N forests, appends their out-of-fold class-probability
//! vectors to the propagated features, averages the per-forest feature
//! importances and discards the least important input columns before the
//! next layer. Depth is chosen by cross-validated accuracy.
//!
//! Module map:
//!
//! - [`dataset`]: CSV loading, standardization, stratified folds, synthetic data.
//! - [`tree`]: CART / extremely randomized classification trees and the
//!   regression trees used by boosting.
//! - [`forest`]: random forest, extra-trees and gradient boosting.
//! - [`cascade`]: the layered model itself.
//! - [`evaluation`]: confusion metrics, ROC/AUC, logistic regression and
//!   the k-fold protocol.
//! - [`persistence`]: versioned JSON model archives.

pub mod cascade;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod forest;
pub mod matrix;
pub mod persistence;
pub mod seed;
pub mod tree;

pub use cascade::{CascadeConfig, CascadeModel, MaskScope};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use forest::{ForestConfig, ForestKind, ForestModel};
pub use matrix::Matrix;
pub use tree::{DecisionTree, TreeParams};
