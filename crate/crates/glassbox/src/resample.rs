//! Class rebalancing via synthetic minority oversampling and stratified
//! cross-validation folds.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// SMOTE parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoteConfig {
    /// Nearest minority neighbors to interpolate toward.
    pub k_neighbors: usize,
    /// Desired minority/majority ratio after resampling, in (0, 1].
    pub target_ratio: f64,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k_neighbors: 5,
            target_ratio: 1.0,
            seed: 0,
        }
    }
}

impl SmoteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_neighbors < 1 {
            return Err(Error::Config("smote: k_neighbors must be >= 1".into()));
        }
        if !(self.target_ratio > 0.0 && self.target_ratio <= 1.0) {
            return Err(Error::Config(format!(
                "smote: target_ratio must be in (0,1], got {}",
                self.target_ratio
            )));
        }
        Ok(())
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Synthetic minority oversampling. Original rows are preserved verbatim
/// and in order; synthetic rows are appended. Each synthetic row lies on
/// the segment between a minority row and one of its `k` nearest minority
/// neighbors (unscaled Euclidean distance, ties broken by row index).
pub fn smote(x: &Matrix, y: &[u8], cfg: &SmoteConfig) -> Result<(Matrix, Vec<u8>)> {
    cfg.validate()?;
    if x.n_rows() != y.len() {
        return Err(Error::Data(format!(
            "smote: {} rows but {} labels",
            x.n_rows(),
            y.len()
        )));
    }
    let n_pos = y.iter().filter(|&&v| v == 1).count();
    let n_neg = y.len() - n_pos;
    let (minority_label, n_min, n_maj) = if n_pos <= n_neg {
        (1u8, n_pos, n_neg)
    } else {
        (0u8, n_neg, n_pos)
    };

    let wanted = (cfg.target_ratio * n_maj as f64).round() as usize;
    let n_synth = wanted.saturating_sub(n_min);
    if n_synth == 0 {
        return Ok((x.clone(), y.to_vec()));
    }
    if n_min < 2 {
        return Err(Error::Data(format!(
            "smote: minority class has {n_min} sample(s); need at least 2"
        )));
    }

    let mut k = cfg.k_neighbors;
    if k >= n_min {
        k = n_min - 1;
        log::warn!(
            "smote: k_neighbors {} >= minority count {}; clamping to {}",
            cfg.k_neighbors,
            n_min,
            k
        );
    }

    let minority_idx: Vec<usize> = y
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == minority_label)
        .map(|(i, _)| i)
        .collect();
    let minority_rows: Vec<Vec<f64>> = minority_idx.iter().map(|&i| x.row(i)).collect();

    // k nearest minority neighbors per minority row, ties by row index
    let neighbors: Vec<Vec<usize>> = (0..n_min)
        .into_par_iter()
        .map(|i| {
            let mut dists: Vec<(f64, usize)> = (0..n_min)
                .filter(|&j| j != i)
                .map(|j| (sq_dist(&minority_rows[i], &minority_rows[j]), j))
                .collect();
            dists.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            dists.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out_x = x.clone();
    let mut out_y = y.to_vec();
    for s in 0..n_synth {
        let base = s % n_min; // round-robin over minority rows, fixed order
        let nb = neighbors[base][rng.gen_range(0..neighbors[base].len())];
        let u: f64 = rng.gen();
        let row: Vec<f64> = minority_rows[base]
            .iter()
            .zip(&minority_rows[nb])
            .map(|(a, b)| a + u * (b - a))
            .collect();
        out_x.push_row(&row);
        out_y.push(minority_label);
    }
    Ok((out_x, out_y))
}

/// Fold assignment for stratified k-fold cross-validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub fold_of_row: Vec<usize>,
    pub k: usize,
}

impl FoldAssignment {
    /// Row indices in fold `f`, ascending.
    pub fn fold_rows(&self, f: usize) -> Vec<usize> {
        self.fold_of_row
            .iter()
            .enumerate()
            .filter(|(_, &g)| g == f)
            .map(|(i, _)| i)
            .collect()
    }

    /// Row indices outside fold `f`, ascending.
    pub fn complement_rows(&self, f: usize) -> Vec<usize> {
        self.fold_of_row
            .iter()
            .enumerate()
            .filter(|(_, &g)| g != f)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Stratified k-fold assignment: per-class counts differ across folds by
/// at most one. Every class must have at least `k` members. Deterministic
/// per seed.
pub fn stratified_kfold(y: &[u8], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::Data(format!("stratified_kfold: k must be >= 2, got {k}")));
    }
    let mut classes: std::collections::BTreeMap<u8, Vec<usize>> = Default::default();
    for (i, &label) in y.iter().enumerate() {
        classes.entry(label).or_default().push(i);
    }
    for (label, rows) in &classes {
        if rows.len() < k {
            return Err(Error::Data(format!(
                "stratified_kfold: class {label} has {} member(s), fewer than k={k}",
                rows.len()
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of_row = vec![0usize; y.len()];
    for rows in classes.values() {
        let mut shuffled = rows.clone();
        shuffled.shuffle(&mut rng);
        for (pos, &row) in shuffled.iter().enumerate() {
            fold_of_row[row] = pos % k;
        }
    }
    Ok(FoldAssignment { fold_of_row, k })
}
