//! LIME: a weighted linear surrogate fit around one instance.
//!
//! Perturbations resample each feature from its training marginal with
//! probability 1/2 (the instance itself is always sample zero), samples
//! are weighted by a Gaussian kernel over standardized distance to the
//! instance, and a ridge-damped weighted least squares is solved for
//! coefficients on the standardized scale.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::explain::ProbModel;
use crate::matrix::Matrix;

const RIDGE_DAMPING: f64 = 1e-6;

/// Local surrogate around one prediction. `weights` are per-feature
/// linear coefficients on the standardized feature scale.
#[derive(Debug, Clone, Serialize)]
pub struct LimeExplanation {
    pub intercept: f64,
    pub weights: Vec<f64>,
    /// Weighted R^2 of the surrogate fit, clamped to [0, 1].
    pub local_r2: f64,
    pub predicted_proba: f64,
}

/// Conventional kernel width for a given feature count.
pub fn default_kernel_width(n_features: usize) -> f64 {
    0.75 * (n_features as f64).sqrt()
}

/// Explain `model`'s probability at `x` with a local linear surrogate.
pub fn lime_explain(
    model: &dyn ProbModel,
    x: &[f64],
    x_train: &Matrix,
    n_samples: usize,
    kernel_width: f64,
    seed: u64,
) -> Result<LimeExplanation> {
    let p = x.len();
    if x_train.n_cols() != p {
        return Err(Error::Explain(format!(
            "instance has {p} features but training data has {}",
            x_train.n_cols()
        )));
    }
    if n_samples < p + 2 {
        return Err(Error::Explain(format!(
            "need at least {} samples for {p} features, got {n_samples}",
            p + 2
        )));
    }
    if x_train.n_rows() == 0 {
        return Err(Error::Explain("empty training data".into()));
    }
    if !(kernel_width > 0.0) {
        return Err(Error::Explain(format!(
            "kernel_width must be positive, got {kernel_width}"
        )));
    }

    // standardization stats from the training marginals
    let n_train = x_train.n_rows();
    let mut means = vec![0.0; p];
    let mut stds = vec![0.0; p];
    for j in 0..p {
        let col = x_train.col(j);
        let mean = col.iter().sum::<f64>() / n_train as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n_train as f64;
        means[j] = mean;
        stds[j] = if var > 0.0 { var.sqrt() } else { 1.0 };
    }

    // perturbations; sample 0 is the instance itself
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n_samples);
    rows.push(x.to_vec());
    for _ in 1..n_samples {
        let mut row = x.to_vec();
        for (j, slot) in row.iter_mut().enumerate() {
            if rng.gen::<f64>() < 0.5 {
                *slot = x_train.get(rng.gen_range(0..n_train), j);
            }
        }
        rows.push(row);
    }
    let samples = Matrix::from_rows(&rows)?;

    // kernel weights over standardized euclidean distance to the instance
    let kernel_sq = kernel_width * kernel_width;
    let dists_sq: Vec<f64> = rows
        .iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .zip(&stds)
                .map(|((v, xv), s)| {
                    let d = (v - xv) / s;
                    d * d
                })
                .sum()
        })
        .collect();
    let weights: Vec<f64> = dists_sq.iter().map(|d2| (-d2 / kernel_sq).exp()).collect();
    // samples that coincide with the instance carry no slope information
    let spread_weight: f64 = dists_sq
        .iter()
        .zip(&weights)
        .filter(|(d2, _)| **d2 > 0.0)
        .map(|(_, w)| *w)
        .sum();
    if spread_weight < 1e-12 {
        return Err(Error::Explain(
            "all perturbation weights vanished; increase kernel_width".into(),
        ));
    }

    let targets = model.predict_proba_batch(&samples)?;

    // ridge-damped weighted least squares on [1 | standardized features];
    // the intercept column is not damped
    let dim = p + 1;
    let design = |s: usize, j: usize| -> f64 {
        if j == 0 {
            1.0
        } else {
            (samples.get(s, j - 1) - means[j - 1]) / stds[j - 1]
        }
    };
    let mut xtwx = DMatrix::<f64>::zeros(dim, dim);
    let mut xtwy = DVector::<f64>::zeros(dim);
    for s in 0..n_samples {
        let w = weights[s];
        for a in 0..dim {
            let da = design(s, a);
            xtwy[a] += w * da * targets[s];
            for b in a..dim {
                xtwx[(a, b)] += w * da * design(s, b);
            }
        }
    }
    for a in 0..dim {
        for b in 0..a {
            xtwx[(a, b)] = xtwx[(b, a)];
        }
        if a > 0 {
            xtwx[(a, a)] += RIDGE_DAMPING;
        }
    }
    let beta = Cholesky::new(xtwx)
        .ok_or_else(|| Error::Explain("degenerate local system; increase n_samples".into()))?
        .solve(&xtwy);

    // weighted goodness of fit
    let w_sum: f64 = weights.iter().sum();
    let t_mean: f64 = weights
        .iter()
        .zip(&targets)
        .map(|(w, t)| w * t)
        .sum::<f64>()
        / w_sum;
    let mut sse = 0.0;
    let mut sst = 0.0;
    for s in 0..n_samples {
        let fitted: f64 = (0..dim).map(|a| beta[a] * design(s, a)).sum();
        sse += weights[s] * (targets[s] - fitted) * (targets[s] - fitted);
        sst += weights[s] * (targets[s] - t_mean) * (targets[s] - t_mean);
    }
    // an (almost) constant target means the constant surrogate is exact
    let local_r2 = if sst > 1e-12 {
        (1.0 - sse / sst).clamp(0.0, 1.0)
    } else {
        1.0
    };

    Ok(LimeExplanation {
        intercept: beta[0],
        weights: beta.as_slice()[1..].to_vec(),
        local_r2,
        predicted_proba: targets[0],
    })
}
