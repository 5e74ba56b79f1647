use serde::{Deserialize, Serialize};

use super::roc::{roc_auc, RocCurve};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tree::argmax;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Counts outcomes with `positive_class` as positive. Labels and
/// predictions must both be binary (indices 0 and 1).
pub fn confusion(
    labels: &[usize],
    predictions: &[usize],
    positive_class: usize,
) -> Result<ConfusionMatrix> {
    if labels.len() != predictions.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: predictions.len(),
        });
    }
    if positive_class > 1 {
        return Err(Error::NotBinary(positive_class + 1));
    }
    if let Some(&bad) = labels.iter().chain(predictions).find(|&&l| l > 1) {
        return Err(Error::NotBinary(bad + 1));
    }
    let mut cm = ConfusionMatrix::default();
    for (&truth, &pred) in labels.iter().zip(predictions) {
        match (truth == positive_class, pred == positive_class) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fn_ += 1,
            (false, true) => cm.fp += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

/// (TP + TN) / (TP + TN + FP + FN)
pub fn acc(cm: &ConfusionMatrix) -> Result<f64> {
    ratio(cm.tp + cm.tn, cm.total(), "ACC")
}

/// TP / (TP + FN)
pub fn sen(cm: &ConfusionMatrix) -> Result<f64> {
    ratio(cm.tp, cm.tp + cm.fn_, "SEN")
}

/// TN / (TN + FP)
pub fn spe(cm: &ConfusionMatrix) -> Result<f64> {
    ratio(cm.tn, cm.tn + cm.fp, "SPE")
}

fn ratio(num: usize, den: usize, name: &'static str) -> Result<f64> {
    if den == 0 {
        return Err(Error::UndefinedMetric(name));
    }
    Ok(num as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub confusion: ConfusionMatrix,
    pub acc: f64,
    pub sen: f64,
    pub spe: f64,
    pub auc: f64,
    pub roc: RocCurve,
}

/// Scores a binary probability matrix: MAP labels for the confusion
/// metrics, the positive-class column for the ROC curve.
pub fn evaluate_probabilities(
    labels: &[usize],
    probas: &Matrix,
    positive_class: usize,
) -> Result<EvaluationReport> {
    if probas.n_cols() != 2 {
        return Err(Error::NotBinary(probas.n_cols()));
    }
    if probas.n_rows() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: probas.n_rows(),
        });
    }
    let predictions: Vec<usize> = probas.rows().map(argmax).collect();
    let cm = confusion(labels, &predictions, positive_class)?;
    let scores = probas.column(positive_class);
    let roc = roc_auc(&scores, labels, positive_class)?;
    Ok(EvaluationReport {
        confusion: cm,
        acc: acc(&cm)?,
        sen: sen(&cm)?,
        spe: spe(&cm)?,
        auc: roc.auc,
        roc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_count() {
        let cm = confusion(&[1, 1, 0, 0], &[1, 0, 0, 1], 1).unwrap();
        assert_eq!(
            cm,
            ConfusionMatrix {
                tp: 1,
                tn: 1,
                fp: 1,
                fn_: 1
            }
        );
        let perfect = confusion(&[1, 0, 1], &[1, 0, 1], 1).unwrap();
        assert_eq!((perfect.fp, perfect.fn_), (0, 0));
        let flipped = confusion(&[1, 1, 0, 0], &[1, 0, 0, 1], 0).unwrap();
        assert_eq!(
            flipped,
            ConfusionMatrix {
                tp: 1,
                tn: 1,
                fp: 1,
                fn_: 1
            }
        );
    }

    #[test]
    fn confusion_errors() {
        assert!(confusion(&[0, 1], &[0], 1).is_err());
        assert!(matches!(
            confusion(&[0, 2], &[0, 1], 1),
            Err(Error::NotBinary(_))
        ));
    }

    #[test]
    fn metric_values() {
        let cm = ConfusionMatrix {
            tp: 50,
            tn: 30,
            fp: 10,
            fn_: 10,
        };
        assert_eq!(acc(&cm).unwrap(), 0.8);
        assert!((sen(&cm).unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(spe(&cm).unwrap(), 0.75);
        let no_pos = ConfusionMatrix {
            tp: 0,
            tn: 3,
            fp: 1,
            fn_: 0,
        };
        assert!(matches!(sen(&no_pos), Err(Error::UndefinedMetric("SEN"))));
        let perfect = ConfusionMatrix {
            tp: 4,
            tn: 6,
            fp: 0,
            fn_: 0,
        };
        assert_eq!(
            (
                acc(&perfect).unwrap(),
                sen(&perfect).unwrap(),
                spe(&perfect).unwrap()
            ),
            (1.0, 1.0, 1.0)
        );
    }
}
