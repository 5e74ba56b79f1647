use rand::Rng;
use rayon::prelude::*;

use super::{check_inputs, ForestBody, ForestConfig, ForestKind, ForestModel};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::seed::{derive_seed, rng_for};
use crate::tree::{fit_tree, normalize_or_uniform, SplitMode, TreeParams};

fn fit_bagged(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    config: &ForestConfig,
    kind: ForestKind,
    split_mode: SplitMode,
    bootstrap: bool,
) -> Result<ForestModel> {
    config.validate()?;
    check_inputs(x, y, n_classes)?;
    let n = x.n_rows();
    let trees = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let weights = bootstrap.then(|| {
                let mut rng = rng_for(config.seed, &[t as u64, 0]);
                let mut w = vec![0.0; n];
                for _ in 0..n {
                    w[rng.random_range(0..n)] += 1.0;
                }
                w
            });
            let params = TreeParams {
                split_mode,
                seed: derive_seed(config.seed, &[t as u64, 1]),
                ..config.tree_params.clone()
            };
            fit_tree(x, y, n_classes, weights.as_deref(), &params)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut mean = vec![0.0; x.n_cols()];
    for t in &trees {
        for (m, v) in mean.iter_mut().zip(t.importance()) {
            *m += v;
        }
    }
    Ok(ForestModel {
        kind,
        n_features_in: x.n_cols(),
        n_classes,
        importance: normalize_or_uniform(&mean),
        body: ForestBody::Bagged { trees },
    })
}

/// Random forest: each tree sees a bootstrap resample (when
/// `config.bootstrap`) and searches splits exhaustively.
pub fn fit_random_forest(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    config: &ForestConfig,
) -> Result<ForestModel> {
    fit_bagged(
        x,
        y,
        n_classes,
        config,
        ForestKind::RandomForest,
        SplitMode::Exhaustive,
        config.bootstrap,
    )
}

/// Extremely randomized trees: full sample per tree, random thresholds.
pub fn fit_extra_trees(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    config: &ForestConfig,
) -> Result<ForestModel> {
    fit_bagged(
        x,
        y,
        n_classes,
        config,
        ForestKind::ExtraTrees,
        SplitMode::RandomThreshold,
        false,
    )
}
