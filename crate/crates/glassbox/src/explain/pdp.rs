//! Partial dependence: mean predicted probability as one feature sweeps a
//! quantile grid while every other feature keeps its observed values.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::explain::ProbModel;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Serialize)]
pub struct PDPCurve {
    pub feature: String,
    /// Strictly increasing grid of feature values (quantiles of the data).
    pub grid: Vec<f64>,
    /// Mean model probability with the feature overridden per grid value.
    pub mean_prediction: Vec<f64>,
}

/// Quantile grid at levels `i / (n_grid - 1)`; duplicates collapse, so
/// skewed or constant features yield fewer points.
fn quantile_grid(values: &[f64], n_grid: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let mut grid: Vec<f64> = (0..n_grid)
        .map(|i| {
            let level = i as f64 / (n_grid - 1) as f64;
            sorted[((level * (n - 1) as f64).round() as usize).min(n - 1)]
        })
        .collect();
    grid.dedup();
    grid
}

pub fn pdp(
    model: &dyn ProbModel,
    x: &Matrix,
    feature: usize,
    feature_name: &str,
    n_grid: usize,
) -> Result<PDPCurve> {
    if feature >= x.n_cols() {
        return Err(Error::Explain(format!(
            "feature index {feature} out of range ({} columns)",
            x.n_cols()
        )));
    }
    if x.n_rows() == 0 {
        return Err(Error::Explain("cannot compute partial dependence on empty data".into()));
    }
    if n_grid < 2 {
        return Err(Error::Explain(format!("n_grid must be >= 2, got {n_grid}")));
    }

    let grid = quantile_grid(x.col(feature), n_grid);
    let mut mean_prediction = Vec::with_capacity(grid.len());
    let mut overridden = x.clone();
    for &g in &grid {
        overridden.col_mut(feature).fill(g);
        let probas = model.predict_proba_batch(&overridden)?;
        mean_prediction.push(probas.iter().sum::<f64>() / probas.len() as f64);
    }
    Ok(PDPCurve {
        feature: feature_name.to_string(),
        grid,
        mean_prediction,
    })
}
