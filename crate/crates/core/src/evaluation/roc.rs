use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Score at or above which samples are called positive; `None` for the
    /// origin.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

fn split_scores(scores: &[f64], labels: &[usize], positive_class: usize) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            found: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidDataset("NaN score".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l == positive_class).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass(format!(
            "ROC needs both classes, found {n_pos} positive / {n_neg} negative"
        )));
    }
    Ok((n_pos, n_neg))
}

/// ROC curve with one point per distinct score (descending) and the
/// trapezoidal area under it. Tied scores move diagonally, which credits
/// positive/negative ties with one half.
pub fn roc_auc(scores: &[f64], labels: &[usize], positive_class: usize) -> Result<RocCurve> {
    let (n_pos, n_neg) = split_scores(scores, labels, positive_class)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: None,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == positive_class {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / n_neg as f64,
            tpr: tp as f64 / n_pos as f64,
            threshold: Some(s),
        });
    }
    let auc = points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) * 0.5)
        .sum();
    Ok(RocCurve { points, auc })
}

/// AUC as the normalized Mann-Whitney U statistic, via mid-ranks.
pub fn auc_mann_whitney(scores: &[f64], labels: &[usize], positive_class: usize) -> Result<f64> {
    let (n_pos, n_neg) = split_scores(scores, labels, positive_class)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1..=j share their mean
        let mid_rank = (i + 1 + j) as f64 * 0.5;
        rank_sum += mid_rank
            * order[i..j]
                .iter()
                .filter(|&&k| labels[k] == positive_class)
                .count() as f64;
        i = j;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 * 0.5;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_ranking() {
        let r = roc_auc(&[0.9, 0.8, 0.4, 0.3], &[1, 1, 0, 0], 1).unwrap();
        assert_eq!(r.auc, 1.0);
        let first = r.points[0];
        let last = *r.points.last().unwrap();
        assert_eq!((first.fpr, first.tpr), (0.0, 0.0));
        assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
    }

    #[test]
    fn all_tied_is_half() {
        let r = roc_auc(&[0.3; 6], &[1, 0, 1, 0, 0, 1], 1).unwrap();
        assert_eq!(r.auc, 0.5);
        assert_eq!(r.points.len(), 2);
        assert_eq!(
            auc_mann_whitney(&[0.3; 6], &[1, 0, 1, 0, 0, 1], 1).unwrap(),
            0.5
        );
    }

    #[test]
    fn pairwise_example() {
        // positives {0.8, 0.3}, negative {0.5}: (1 + 0) / 2
        let r = roc_auc(&[0.8, 0.3, 0.5], &[1, 1, 0], 1).unwrap();
        assert!((r.auc - 0.5).abs() < 1e-15);
        assert!((auc_mann_whitney(&[0.8, 0.3, 0.5], &[1, 1, 0], 1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_class_rejected() {
        assert!(roc_auc(&[0.1, 0.2], &[1, 1], 1).is_err());
        assert!(auc_mann_whitney(&[0.1, 0.2], &[0, 0], 1).is_err());
        assert!(roc_auc(&[f64::NAN, 0.2], &[0, 1], 1).is_err());
    }
}
