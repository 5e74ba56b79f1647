use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::logreg::{fit_logreg, logreg_predict_proba, LogRegConfig};
use super::metrics::evaluate_probabilities;
use super::DEFAULT_POSITIVE_CLASS;
use crate::cascade::{fit_cascade_with_output, CascadeConfig};
use crate::dataset::{Dataset, StandardizerStats};
use crate::error::{Error, Result};
use crate::forest::{fit_forest, ForestConfig};
use crate::matrix::Matrix;
use crate::seed::derive_seed;

/// A model recipe evaluated fold by fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSpec {
    Cascade(CascadeConfig),
    Forest(ForestConfig),
    LogReg(LogRegConfig),
    /// Logistic regression on the cascade's last-layer output. Training
    /// rows use the cross-fitted output, test rows the deployed transform.
    CascadeLogReg {
        cascade: CascadeConfig,
        logreg: LogRegConfig,
    },
}

impl ModelSpec {
    /// Cascade with the default roster and 0.2 discard ratio.
    pub fn afs_df() -> Self {
        ModelSpec::Cascade(CascadeConfig::default())
    }

    /// The same cascade without feature selection.
    pub fn df() -> Self {
        ModelSpec::Cascade(CascadeConfig::default().without_selection())
    }

    pub fn label(&self) -> String {
        match self {
            ModelSpec::Cascade(c) if c.selection_enabled() => "AFS-DF".into(),
            ModelSpec::Cascade(_) => "DF".into(),
            ModelSpec::Forest(f) => format!("{}:{}", f.kind.short_name().to_uppercase(), f.n_trees),
            ModelSpec::LogReg(_) => "LR".into(),
            ModelSpec::CascadeLogReg { .. } => "AFSDF-LR".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub acc: f64,
    pub sen: f64,
    pub spe: f64,
    pub auc: f64,
}

pub type MetricSummary = FoldMetrics;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub model: String,
    pub k: usize,
    pub per_fold: Vec<FoldMetrics>,
    pub mean: MetricSummary,
    /// Population standard deviation over folds.
    pub std: MetricSummary,
    /// Held-out positive-class score of every sample.
    pub oof_scores: Vec<f64>,
    pub labels: Vec<usize>,
}

fn summarize(per_fold: &[FoldMetrics]) -> (MetricSummary, MetricSummary) {
    let k = per_fold.len() as f64;
    let pick: [fn(&FoldMetrics) -> f64; 4] = [|m| m.acc, |m| m.sen, |m| m.spe, |m| m.auc];
    let mut mean = [0.0; 4];
    let mut std = [0.0; 4];
    for (j, f) in pick.iter().enumerate() {
        let mu = per_fold.iter().map(f).sum::<f64>() / k;
        mean[j] = mu;
        std[j] = (per_fold.iter().map(|m| (f(m) - mu).powi(2)).sum::<f64>() / k).sqrt();
    }
    let make = |v: [f64; 4]| FoldMetrics {
        acc: v[0],
        sen: v[1],
        spe: v[2],
        auc: v[3],
    };
    (make(mean), make(std))
}

/// Fits `spec` on standardized training rows and returns test probabilities.
fn fit_and_score(
    spec: &ModelSpec,
    train: &Dataset,
    test: &Matrix,
    model_seed: u64,
) -> Result<Matrix> {
    let stats = StandardizerStats::fit(train.features())?;
    let train = train.with_features(stats.apply(train.features())?)?;
    let test = stats.apply(test)?;
    match spec {
        ModelSpec::Cascade(cfg) => {
            let cfg = cfg.clone().with_seed(derive_seed(cfg.seed, &[model_seed]));
            let fit = fit_cascade_with_output(&train, &cfg)?;
            fit.model.predict_proba(&test)
        }
        ModelSpec::Forest(cfg) => {
            let cfg = cfg.clone().with_seed(derive_seed(cfg.seed, &[model_seed]));
            let model = fit_forest(train.features(), train.labels(), train.n_classes(), &cfg)?;
            model.predict_proba(&test)
        }
        ModelSpec::LogReg(cfg) => {
            let model = fit_logreg(train.features(), train.labels(), cfg)?;
            logreg_predict_proba(&model, &test)
        }
        ModelSpec::CascadeLogReg { cascade, logreg } => {
            let cfg = cascade
                .clone()
                .with_seed(derive_seed(cascade.seed, &[model_seed]));
            let fit = fit_cascade_with_output(&train, &cfg)?;
            let deep_test = fit.model.transform(&test)?;
            let deep_stats = StandardizerStats::fit(&fit.train_output)?;
            let model = fit_logreg(
                &deep_stats.apply(&fit.train_output)?,
                train.labels(),
                logreg,
            )?;
            logreg_predict_proba(&model, &deep_stats.apply(&deep_test)?)
        }
    }
}

/// Stratified k-fold evaluation with class 1 as the positive class.
pub fn crossval_evaluate(
    data: &Dataset,
    spec: &ModelSpec,
    k: usize,
    seed: u64,
) -> Result<CvReport> {
    crossval_evaluate_with(data, spec, k, seed, DEFAULT_POSITIVE_CLASS)
}

pub fn crossval_evaluate_with(
    data: &Dataset,
    spec: &ModelSpec,
    k: usize,
    seed: u64,
    positive_class: usize,
) -> Result<CvReport> {
    if data.n_classes() != 2 {
        return Err(Error::NotBinary(data.n_classes()));
    }
    let folds = data.stratified_folds(k, seed)?;
    let outcomes = (0..k)
        .into_par_iter()
        .map(|f| {
            let train_idx = folds.train_indices(f);
            let test_idx = folds.test_indices(f);
            let train = data.subset(&train_idx)?;
            let test_x = data.features().select_rows(&test_idx);
            let probas = fit_and_score(spec, &train, &test_x, derive_seed(seed, &[f as u64]))?;
            let labels: Vec<usize> = test_idx.iter().map(|&i| data.labels()[i]).collect();
            let report = evaluate_probabilities(&labels, &probas, positive_class)?;
            Ok((test_idx, probas.column(positive_class), report))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut oof_scores = vec![0.0; data.n_samples()];
    let mut per_fold = Vec::with_capacity(k);
    for (test_idx, scores, report) in outcomes {
        for (&i, s) in test_idx.iter().zip(scores) {
            oof_scores[i] = s;
        }
        per_fold.push(FoldMetrics {
            acc: report.acc,
            sen: report.sen,
            spe: report.spe,
            auc: report.auc,
        });
    }
    let (mean, std) = summarize(&per_fold);
    Ok(CvReport {
        model: spec.label(),
        k,
        per_fold,
        mean,
        std,
        oof_scores,
        labels: data.labels().to_vec(),
    })
}
