//! Binary classification metrics, ROC analysis, the logistic-regression
//! baseline and the stratified k-fold evaluation protocol.

mod crossval;
mod logreg;
mod metrics;
mod roc;

pub use crossval::{
    crossval_evaluate, crossval_evaluate_with, CvReport, FoldMetrics, MetricSummary, ModelSpec,
};
pub use logreg::{fit_logreg, logreg_objective, logreg_predict_proba, LogRegConfig, LogRegModel};
pub use metrics::{
    acc, confusion, evaluate_probabilities, sen, spe, ConfusionMatrix, EvaluationReport,
};
pub use roc::{auc_mann_whitney, roc_auc, RocCurve, RocPoint};

/// Class index treated as positive unless stated otherwise.
pub const DEFAULT_POSITIVE_CLASS: usize = 1;
