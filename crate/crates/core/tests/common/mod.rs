#![allow(dead_code)]

use afsdf::tree::{Split, MIN_GAIN};
use afsdf::Matrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random integer-valued instance so that ties in values and gains occur.
pub fn random_instance(
    seed: u64,
    max_n: usize,
    max_d: usize,
    n_classes: usize,
) -> (Matrix, Vec<usize>) {
    let mut r = rng(seed);
    let n = r.random_range(2..=max_n);
    let d = r.random_range(1..=max_d);
    let levels = r.random_range(2..8);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..d)
                .map(|_| r.random_range(0..levels) as f64 * 0.5)
                .collect()
        })
        .collect();
    let y = (0..n).map(|_| r.random_range(0..n_classes)).collect();
    (Matrix::from_rows(&rows).unwrap(), y)
}

pub fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

pub fn synth(
    n: usize,
    inf: usize,
    red: usize,
    noise: usize,
    sep: f64,
    seed: u64,
) -> afsdf::Dataset {
    afsdf::dataset::synth_generate(&afsdf::dataset::SyntheticSpec {
        n_samples: n,
        n_informative: inf,
        n_redundant: red,
        n_noise: noise,
        n_classes: 2,
        class_separation: sep,
        seed,
    })
    .unwrap()
}

pub fn accuracy(probas: &Matrix, y: &[usize]) -> f64 {
    let hits = (0..probas.n_rows())
        .filter(|&i| argmax(probas.row(i)) == y[i])
        .count();
    hits as f64 / y.len() as f64
}

/// First index of the maximum entry.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for c in 1..row.len() {
        if row[c] > row[best] {
            best = c;
        }
    }
    best
}

pub fn small_cascade(seed: u64) -> afsdf::CascadeConfig {
    afsdf::CascadeConfig {
        forests: afsdf::forest::parse_roster("gbdt:5,rf:10,et:10").unwrap(),
        max_layers: 3,
        min_features: 4,
        seed,
        ..afsdf::CascadeConfig::default()
    }
}

pub fn oracle_gini(counts: &[f64]) -> f64 {
    let t: f64 = counts.iter().sum();
    1.0 - counts.iter().map(|c| (c / t) * (c / t)).sum::<f64>()
}

/// Scores every (feature, midpoint) pair from scratch.
pub fn brute_force_split(
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
    weights: &[f64],
    min_leaf: f64,
) -> Option<Split> {
    let rows: Vec<usize> = (0..x.n_rows()).filter(|&r| weights[r] > 0.0).collect();
    let mut parent = vec![0.0; n_classes];
    for &r in &rows {
        parent[y[r]] += weights[r];
    }
    let parent_gini = oracle_gini(&parent);
    let mut best: Option<Split> = None;
    for f in (0..x.n_cols()).rev() {
        let mut values: Vec<f64> = rows.iter().map(|&r| x.get(r, f)).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2).rev() {
            let mid = 0.5 * (w[0] + w[1]);
            let t = if mid < w[1] { mid } else { w[0] };
            let mut left = vec![0.0; n_classes];
            let mut right = vec![0.0; n_classes];
            for &r in &rows {
                if x.get(r, f) <= t {
                    left[y[r]] += weights[r];
                } else {
                    right[y[r]] += weights[r];
                }
            }
            let (wl, wr): (f64, f64) = (left.iter().sum(), right.iter().sum());
            if wl < min_leaf || wr < min_leaf {
                continue;
            }
            let total = wl + wr;
            let gain = parent_gini
                - (wl / total) * oracle_gini(&left)
                - (wr / total) * oracle_gini(&right);
            if gain <= MIN_GAIN {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => gain > b.gain || (gain == b.gain && (f, t) < (b.feature, b.threshold)),
            };
            if better {
                best = Some(Split {
                    feature: f,
                    threshold: t,
                    gain,
                });
            }
        }
    }
    best
}

/// Counts every positive/negative pair; ties are worth one half.
pub fn pairwise_auc(scores: &[f64], labels: &[usize]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if labels[i] == 1 && labels[j] == 0 {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}
