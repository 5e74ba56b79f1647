use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    /// Coefficient of `½‖w‖²` (the bias is not penalized).
    pub l2: f64,
    pub max_iters: usize,
    /// Stop once the gradient norm falls below this.
    pub tolerance: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            l2: 0.01,
            max_iters: 1000,
            tolerance: 1e-6,
        }
    }
}

/// Binary logistic model `p(1 | x) = σ(w·x + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Mean log-loss plus `l2/2 ‖w‖²` and its gradient at `params = [w…, b]`.
pub fn logreg_objective(params: &[f64], x: &Matrix, y: &[usize], l2: f64) -> (f64, Vec<f64>) {
    let d = x.n_cols();
    let n = x.n_rows() as f64;
    let (w, b) = (&params[..d], params[d]);
    let mut loss = 0.0;
    let mut grad = vec![0.0; d + 1];
    for (row, &label) in x.rows().zip(y) {
        let z = b + row.iter().zip(w).map(|(a, c)| a * c).sum::<f64>();
        let positive = label == 1;
        loss += if positive { softplus(-z) } else { softplus(z) };
        let residual = sigmoid(z) - if positive { 1.0 } else { 0.0 };
        for (g, a) in grad[..d].iter_mut().zip(row) {
            *g += residual * a;
        }
        grad[d] += residual;
    }
    loss /= n;
    grad.iter_mut().for_each(|g| *g /= n);
    for (g, wj) in grad[..d].iter_mut().zip(w) {
        *g += l2 * wj;
    }
    loss += 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>();
    (loss, grad)
}

/// Full-batch gradient descent from zero weights. Each step starts from the
/// previous accepted step size (doubled) and is halved until the Armijo
/// condition holds.
pub fn fit_logreg(x: &Matrix, y: &[usize], config: &LogRegConfig) -> Result<LogRegModel> {
    if x.n_rows() == 0 {
        return Err(Error::Empty("logistic regression on zero rows"));
    }
    if y.len() != x.n_rows() {
        return Err(Error::DimensionMismatch {
            expected: x.n_rows(),
            found: y.len(),
        });
    }
    if let Some(&bad) = y.iter().find(|&&l| l > 1) {
        return Err(Error::NotBinary(bad + 1));
    }
    if config.l2.is_nan() || config.l2 < 0.0 {
        return Err(Error::InvalidConfig("l2 must be non-negative".into()));
    }
    let d = x.n_cols();
    let mut params = vec![0.0; d + 1];
    let (mut loss, mut grad) = logreg_objective(&params, x, y, config.l2);
    let mut step = 1.0;
    let mut iterations = 0;
    let norm = |g: &[f64]| g.iter().map(|v| v * v).sum::<f64>().sqrt();
    while iterations < config.max_iters {
        let g2 = norm(&grad).powi(2);
        if g2.sqrt() < config.tolerance {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = params
                .iter()
                .zip(&grad)
                .map(|(p, g)| p - step * g)
                .collect();
            let (trial_loss, trial_grad) = logreg_objective(&trial, x, y, config.l2);
            if trial_loss <= loss - 0.5 * step * g2 {
                params = trial;
                loss = trial_loss;
                grad = trial_grad;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        if !accepted {
            break;
        }
        step = (step * 2.0).min(1e4);
    }
    let bias = params.pop().unwrap_or(0.0);
    Ok(LogRegModel {
        weights: params,
        bias,
        iterations,
        gradient_norm: norm(&grad),
    })
}

/// Two-column probability matrix `[1 - p, p]`.
pub fn logreg_predict_proba(model: &LogRegModel, samples: &Matrix) -> Result<Matrix> {
    if samples.n_cols() != model.weights.len() {
        return Err(Error::DimensionMismatch {
            expected: model.weights.len(),
            found: samples.n_cols(),
        });
    }
    let mut out = Matrix::zeros(samples.n_rows(), 2);
    for i in 0..samples.n_rows() {
        let z = model.bias
            + samples
                .row(i)
                .iter()
                .zip(&model.weights)
                .map(|(a, w)| a * w)
                .sum::<f64>();
        let p = sigmoid(z);
        out.set(i, 0, 1.0 - p);
        out.set(i, 1, p);
    }
    Ok(out)
}
