use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed::rng_for;

/// Parameters for a synthetic classification table with known column roles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_samples: usize,
    pub n_informative: usize,
    pub n_redundant: usize,
    pub n_noise: usize,
    pub n_classes: usize,
    pub class_separation: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_samples: 500,
            n_informative: 10,
            n_redundant: 10,
            n_noise: 30,
            n_classes: 2,
            class_separation: 1.5,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn n_features(&self) -> usize {
        self.n_informative + self.n_redundant + self.n_noise
    }

    fn validate(&self) -> Result<()> {
        if self.n_informative == 0 {
            return Err(Error::InvalidConfig(
                "n_informative must be at least 1".into(),
            ));
        }
        if self.n_classes < 2 {
            return Err(Error::InvalidConfig("n_classes must be at least 2".into()));
        }
        if self.n_samples < self.n_classes {
            return Err(Error::InvalidConfig(format!(
                "{} samples cannot cover {} classes",
                self.n_samples, self.n_classes
            )));
        }
        if !(self.class_separation > 0.0 && self.class_separation.is_finite()) {
            return Err(Error::InvalidConfig(
                "class_separation must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Ground-truth role of a synthetic column, read back from its name prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureRole {
    Informative,
    Redundant,
    Noise,
}

impl FeatureRole {
    pub fn from_name(name: &str) -> Option<FeatureRole> {
        if name.starts_with("inf_") {
            Some(FeatureRole::Informative)
        } else if name.starts_with("red_") {
            Some(FeatureRole::Redundant)
        } else if name.starts_with("nse_") {
            Some(FeatureRole::Noise)
        } else {
            None
        }
    }
}

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Draws a balanced synthetic dataset.
///
/// Informative column `j` of a class-`c` row is `N(c * sep * s_j, 1)` with a
/// random sign `s_j`. Redundant columns mix the informative ones with fixed
/// Gaussian weights plus `N(0, 0.1²)` jitter. Noise columns are `N(0, 1)`
/// independent of the label. Columns are shuffled; names carry the role.
pub fn synth_generate(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let n = spec.n_samples;
    let n_inf = spec.n_informative;
    let d = spec.n_features();

    let mut structure_rng = rng_for(spec.seed, &[0]);
    let signs: Vec<f64> = (0..n_inf)
        .map(|_| {
            if structure_rng.random::<bool>() {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    let mix_scale = 1.0 / (n_inf as f64).sqrt();
    let mixing: Vec<Vec<f64>> = (0..spec.n_redundant)
        .map(|_| {
            (0..n_inf)
                .map(|_| normal(&mut structure_rng) * mix_scale)
                .collect()
        })
        .collect();
    let mut column_order: Vec<usize> = (0..d).collect();
    column_order.shuffle(&mut structure_rng);

    let mut labels: Vec<usize> = (0..n).map(|i| i % spec.n_classes).collect();
    let mut label_rng = rng_for(spec.seed, &[1]);
    labels.shuffle(&mut label_rng);

    let mut sample_rng = rng_for(spec.seed, &[2]);
    let mut data = Vec::with_capacity(n * d);
    let mut natural = vec![0.0; d];
    for &label in &labels {
        let offset = label as f64 * spec.class_separation;
        for j in 0..n_inf {
            natural[j] = offset * signs[j] + normal(&mut sample_rng);
        }
        for (r, weights) in mixing.iter().enumerate() {
            let base: f64 = weights
                .iter()
                .zip(&natural[..n_inf])
                .map(|(w, v)| w * v)
                .sum();
            natural[n_inf + r] = base + 0.1 * normal(&mut sample_rng);
        }
        for v in &mut natural[n_inf + spec.n_redundant..d] {
            *v = normal(&mut sample_rng);
        }
        data.extend(column_order.iter().map(|&src| natural[src]));
    }

    let feature_names = column_order
        .iter()
        .map(|&src| {
            if src < n_inf {
                format!("inf_{src}")
            } else if src < n_inf + spec.n_redundant {
                format!("red_{}", src - n_inf)
            } else {
                format!("nse_{}", src - n_inf - spec.n_redundant)
            }
        })
        .collect();
    let class_names = (0..spec.n_classes).map(|c| format!("class_{c}")).collect();
    Dataset::new(Matrix::new(n, d, data)?, labels, feature_names, class_names)
}
