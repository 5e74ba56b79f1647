use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Columns whose population stdev falls below this are divided by 1.
pub const STDEV_FLOOR: f64 = 1e-12;

/// Per-column centering and scaling learned from a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizerStats {
    pub means: Vec<f64>,
    pub stdevs: Vec<f64>,
}

impl StandardizerStats {
    pub fn fit(x: &Matrix) -> Result<Self> {
        let n = x.n_rows();
        if n == 0 {
            return Err(Error::Empty("cannot standardize zero rows"));
        }
        let d = x.n_cols();
        let mut means = vec![0.0; d];
        for row in x.rows() {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n as f64);
        let mut vars = vec![0.0; d];
        for row in x.rows() {
            for ((s, v), m) in vars.iter_mut().zip(row).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        let stdevs = vars
            .into_iter()
            .map(|s| {
                let sd = (s / n as f64).sqrt();
                if sd < STDEV_FLOOR {
                    1.0
                } else {
                    sd
                }
            })
            .collect();
        Ok(StandardizerStats { means, stdevs })
    }

    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if x.n_cols() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: x.n_cols(),
            });
        }
        let mut out = x.clone();
        for i in 0..out.n_rows() {
            for ((v, m), s) in out.row_mut(i).iter_mut().zip(&self.means).zip(&self.stdevs) {
                *v = (*v - m) / s;
            }
        }
        Ok(out)
    }
}

pub fn standardize_fit(train: &Dataset) -> Result<StandardizerStats> {
    StandardizerStats::fit(train.features())
}

pub fn standardize_apply(stats: &StandardizerStats, data: &Dataset) -> Result<Dataset> {
    data.with_features(stats.apply(data.features())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn three_point_column() {
        let x = Matrix::from_rows(&[[1.0], [2.0], [3.0]]).unwrap();
        let stats = StandardizerStats::fit(&x).unwrap();
        assert_eq!(stats.means, vec![2.0]);
        assert!((stats.stdevs[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let z = stats.apply(&x).unwrap();
        let expected = [-1.224744871391589, 0.0, 1.224744871391589];
        for (a, b) in z.column(0).iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_column_uses_unit_divisor() {
        let x = Matrix::from_rows(&[[5.0], [5.0], [5.0]]).unwrap();
        let stats = StandardizerStats::fit(&x).unwrap();
        assert_eq!(stats.stdevs, vec![1.0]);
        assert_eq!(stats.apply(&x).unwrap().column(0), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let x = Matrix::from_rows(&[[1.0, 2.0, 3.0], [2.0, 2.0, 1.0]]).unwrap();
        let stats = StandardizerStats::fit(&x).unwrap();
        let wide = Matrix::zeros(2, 4);
        assert!(matches!(
            stats.apply(&wide),
            Err(Error::DimensionMismatch {
                expected: 3,
                found: 4
            })
        ));
    }

    proptest! {
        #[test]
        fn standardized_columns_have_zero_mean_unit_stdev(
            rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 2..40)
        ) {
            let x = Matrix::from_rows(&rows).unwrap();
            let stats = StandardizerStats::fit(&x).unwrap();
            let z = stats.apply(&x).unwrap();
            let n = z.n_rows() as f64;
            for j in 0..3 {
                let col = z.column(j);
                let mean = col.iter().sum::<f64>() / n;
                prop_assert!(mean.abs() < 1e-9);
                if stats.stdevs[j] != 1.0 || x.column(j).iter().any(|&v| v != x.get(0, j)) {
                    let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
                    prop_assert!((sd - 1.0).abs() < 1e-9, "sd {}", sd);
                }
            }
        }
    }
}
