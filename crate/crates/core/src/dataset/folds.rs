use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::seed::rng_for;

/// Fold index for each sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub fold_of_sample: Vec<usize>,
    pub k: usize,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.fold_of_sample
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| (f == fold).then_some(i))
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.fold_of_sample
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| (f != fold).then_some(i))
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of_sample {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Stratified k-fold assignment over raw labels.
///
/// Each class is shuffled independently and dealt round-robin, continuing
/// the deal position from the previous class so fold sizes stay balanced.
pub fn stratified_folds(
    labels: &[usize],
    n_classes: usize,
    k: usize,
    seed: u64,
) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!(
            "fold count must be at least 2, got {k}"
        )));
    }
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        if l >= n_classes {
            return Err(Error::InvalidDataset(format!("label {l} out of range")));
        }
        by_class[l].push(i);
    }
    for (class, members) in by_class.iter().enumerate() {
        if members.len() < k {
            return Err(Error::ClassTooSmall {
                class,
                count: members.len(),
                folds: k,
            });
        }
    }
    let mut fold_of_sample = vec![0; labels.len()];
    let mut deal = 0usize;
    for (class, members) in by_class.iter_mut().enumerate() {
        let mut rng = rng_for(seed, &[class as u64]);
        members.shuffle(&mut rng);
        for &i in members.iter() {
            fold_of_sample[i] = deal % k;
            deal += 1;
        }
    }
    Ok(FoldAssignment { fold_of_sample, k })
}

impl Dataset {
    pub fn stratified_folds(&self, k: usize, seed: u64) -> Result<FoldAssignment> {
        stratified_folds(self.labels(), self.n_classes(), k, seed)
    }
}

/// Stratified train/test split; returns (train, test) row indices.
pub fn stratified_holdout(
    labels: &[usize],
    n_classes: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "holdout fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..n_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        let mut rng = rng_for(seed, &[u64::MAX, class as u64]);
        members.shuffle(&mut rng);
        let n_test = ((members.len() as f64) * test_fraction).round() as usize;
        if n_test == 0 || n_test == members.len() {
            return Err(Error::InvalidConfig(format!(
                "holdout fraction {test_fraction} leaves class {class} empty on one side"
            )));
        }
        test.extend_from_slice(&members[..n_test]);
        train.extend_from_slice(&members[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}
