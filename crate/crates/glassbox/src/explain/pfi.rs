//! Permutation feature importance: the drop in a score metric when one
//! feature column is shuffled. Negative drops are reported as-is.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::explain::ProbModel;
use crate::matrix::Matrix;
use crate::metrics;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PfiMetric {
    Auc,
    /// F1 of the positive class at a fixed decision threshold.
    F1 { threshold: f64 },
}

impl PfiMetric {
    fn score(&self, y: &[u8], scores: &[f64]) -> Result<f64> {
        match self {
            PfiMetric::Auc => Ok(metrics::roc_auc(y, scores)?.1),
            PfiMetric::F1 { threshold } => {
                let yhat: Vec<u8> = scores.iter().map(|&s| u8::from(s >= *threshold)).collect();
                let cm = metrics::confusion(y, &yhat)?;
                let (_, class1, _) = metrics::prf1(&cm);
                Ok(class1.f1)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PfiEntry {
    pub feature: String,
    /// Baseline metric minus the mean shuffled metric.
    pub mean_drop: f64,
    /// Standard deviation of the drop over repeats.
    pub std: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PfiResult {
    pub baseline: f64,
    /// One entry per feature, in input column order.
    pub entries: Vec<PfiEntry>,
}

impl PfiResult {
    /// Entries sorted by mean drop, descending (ties by input order).
    pub fn ranked(&self) -> Vec<PfiEntry> {
        let mut out = self.entries.clone();
        out.sort_by(|a, b| b.mean_drop.partial_cmp(&a.mean_drop).unwrap());
        out
    }
}

pub fn permutation_importance(
    model: &dyn ProbModel,
    x: &Matrix,
    y: &[u8],
    feature_names: &[String],
    metric: PfiMetric,
    n_repeats: usize,
    seed: u64,
) -> Result<PfiResult> {
    if x.n_rows() != y.len() {
        return Err(Error::Explain(format!(
            "{} rows but {} labels",
            x.n_rows(),
            y.len()
        )));
    }
    if x.n_rows() < 2 {
        return Err(Error::Explain("need at least two rows".into()));
    }
    if feature_names.len() != x.n_cols() {
        return Err(Error::Explain(format!(
            "{} columns but {} names",
            x.n_cols(),
            feature_names.len()
        )));
    }
    if n_repeats == 0 {
        return Err(Error::Explain("n_repeats must be >= 1".into()));
    }
    let n_pos = y.iter().filter(|&&v| v == 1).count();
    if n_pos == 0 || n_pos == y.len() {
        return Err(Error::Explain(
            "metric undefined: labels contain a single class".into(),
        ));
    }

    let baseline = metric.score(y, &model.predict_proba_batch(x)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(x.n_cols());
    let mut shuffled = x.clone();
    for j in 0..x.n_cols() {
        let original = x.col(j).to_vec();
        let mut drops = Vec::with_capacity(n_repeats);
        for _ in 0..n_repeats {
            let col = shuffled.col_mut(j);
            col.copy_from_slice(&original);
            col.shuffle(&mut rng);
            let score = metric.score(y, &model.predict_proba_batch(&shuffled)?)?;
            drops.push(baseline - score);
        }
        shuffled.col_mut(j).copy_from_slice(&original);
        let mean = drops.iter().sum::<f64>() / n_repeats as f64;
        let var = drops.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n_repeats as f64;
        entries.push(PfiEntry {
            feature: feature_names[j].clone(),
            mean_drop: mean,
            std: var.sqrt(),
        });
    }
    Ok(PfiResult { baseline, entries })
}
