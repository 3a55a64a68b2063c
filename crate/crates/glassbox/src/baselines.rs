//! Reference models for comparison runs: an L2-regularized logistic
//! regression trained by gradient descent with backtracking, and a single
//! decision tree expressed as a one-tree boosted model so every explainer
//! and serializer works on it unchanged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explain::ProbModel;
use crate::gbdt::{sigmoid, train_named, GBDTConfig, GBDTModel, Growth};
use crate::matrix::Matrix;

const LINEAR_FORMAT_VERSION: u32 = 1;

/// Logistic regression over standardized features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Per-feature standardization statistics from the training data.
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub feature_names: Vec<String>,
    pub converged: bool,
    pub iterations: usize,
}

impl LinearModel {
    fn margin(&self, row: &[f64]) -> f64 {
        let mut z = self.bias;
        for j in 0..row.len() {
            z += self.weights[j] * (row[j] - self.means[j]) / self.stds[j];
        }
        z
    }

    pub fn predict_proba(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.weights.len() {
            return Err(Error::Predict(format!(
                "expected {} features, found {}",
                self.weights.len(),
                row.len()
            )));
        }
        Ok(sigmoid(self.margin(row)))
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            format_version: u32,
            kind: &'static str,
            #[serde(flatten)]
            model: &'a LinearModel,
        }
        serde_json::to_string_pretty(&Doc {
            format_version: LINEAR_FORMAT_VERSION,
            kind: "linear_model",
            model: self,
        })
        .expect("linear model serializes")
    }

    pub fn from_json(json: &str) -> Result<LinearModel> {
        #[derive(Deserialize)]
        struct Doc {
            format_version: u32,
            kind: String,
            #[serde(flatten)]
            model: LinearModel,
        }
        let doc: Doc = serde_json::from_str(json)
            .map_err(|e| Error::ModelFormat(format!("linear model document: {e}")))?;
        if doc.format_version != LINEAR_FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unknown format_version {}",
                doc.format_version
            )));
        }
        if doc.kind != "linear_model" {
            return Err(Error::ModelFormat(format!(
                "expected kind linear_model, found `{}`",
                doc.kind
            )));
        }
        Ok(doc.model)
    }
}

impl ProbModel for LinearModel {
    fn predict_proba_batch(&self, x: &Matrix) -> Result<Vec<f64>> {
        (0..x.n_rows()).map(|i| self.predict_proba(&x.row(i))).collect()
    }
}

/// Mean log-loss plus L2 penalty, and its gradient, on standardized data.
fn loss_and_grad(
    z: &Matrix,
    y: &[u8],
    weights: &[f64],
    bias: f64,
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = z.n_rows() as f64;
    let p = z.n_cols();
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; p];
    let mut grad_b = 0.0;
    for i in 0..z.n_rows() {
        let mut m = bias;
        for j in 0..p {
            m += weights[j] * z.get(i, j);
        }
        let prob = sigmoid(m).clamp(1e-15, 1.0 - 1e-15);
        let yi = f64::from(y[i]);
        loss -= yi * prob.ln() + (1.0 - yi) * (1.0 - prob).ln();
        let residual = prob - yi;
        for j in 0..p {
            grad_w[j] += residual * z.get(i, j);
        }
        grad_b += residual;
    }
    loss /= n;
    loss += weights.iter().map(|w| 0.5 * l2 * w * w).sum::<f64>();
    for (gw, w) in grad_w.iter_mut().zip(weights) {
        *gw = *gw / n + l2 * w;
    }
    grad_b /= n;
    (loss, grad_w, grad_b)
}

/// Train logistic regression: zero-initialized weights, gradient descent
/// with Armijo backtracking, stopping when the gradient infinity-norm
/// falls below `tol` or the iteration budget runs out.
pub fn train_logreg(
    x: &Matrix,
    y: &[u8],
    feature_names: &[String],
    l2: f64,
    max_iters: usize,
    tol: f64,
) -> Result<LinearModel> {
    let n = x.n_rows();
    let p = x.n_cols();
    if n == 0 || p == 0 {
        return Err(Error::Train("empty training matrix".into()));
    }
    if y.len() != n {
        return Err(Error::Train(format!("{n} rows but {} labels", y.len())));
    }
    if feature_names.len() != p {
        return Err(Error::Train(format!("{p} columns but {} names", feature_names.len())));
    }
    if l2 < 0.0 {
        return Err(Error::Train(format!("l2 must be >= 0, got {l2}")));
    }
    let n_pos = y.iter().filter(|&&v| v == 1).count();
    if n_pos == 0 || n_pos == n {
        return Err(Error::Train("training labels contain a single class".into()));
    }

    let mut means = vec![0.0; p];
    let mut stds = vec![0.0; p];
    for j in 0..p {
        let col = x.col(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        means[j] = mean;
        stds[j] = if var > 0.0 { var.sqrt() } else { 1.0 };
    }
    let z = Matrix::from_columns(
        (0..p)
            .map(|j| x.col(j).iter().map(|v| (v - means[j]) / stds[j]).collect())
            .collect(),
    )?;

    let mut weights = vec![0.0; p];
    let mut bias = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    let (mut loss, mut grad_w, mut grad_b) = loss_and_grad(&z, y, &weights, bias, l2);
    for _ in 0..max_iters {
        let grad_norm = grad_w
            .iter()
            .chain(std::iter::once(&grad_b))
            .fold(0.0f64, |m, g| m.max(g.abs()));
        if grad_norm < tol {
            converged = true;
            break;
        }
        let grad_sq: f64 =
            grad_w.iter().map(|g| g * g).sum::<f64>() + grad_b * grad_b;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial_w: Vec<f64> = weights
                .iter()
                .zip(&grad_w)
                .map(|(w, g)| w - step * g)
                .collect();
            let trial_b = bias - step * grad_b;
            let (trial_loss, tw, tb) = loss_and_grad(&z, y, &trial_w, trial_b, l2);
            if trial_loss <= loss - 1e-4 * step * grad_sq {
                weights = trial_w;
                bias = trial_b;
                loss = trial_loss;
                grad_w = tw;
                grad_b = tb;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        iterations += 1;
        if !accepted {
            break; // step collapsed; gradient is numerically flat
        }
    }
    if converged {
        log::debug!("logreg converged after {iterations} iterations");
    } else {
        log::debug!("logreg stopped at the iteration cap ({iterations})");
    }

    Ok(LinearModel {
        weights,
        bias,
        means,
        stds,
        feature_names: feature_names.to_vec(),
        converged,
        iterations,
    })
}

/// A single depth-wise tree grown with the boosting splitter at full
/// learning rate. The result is a plain one-tree `GBDTModel`.
pub fn train_decision_tree(
    x: &Matrix,
    y: &[u8],
    feature_names: &[String],
    max_depth: usize,
) -> Result<GBDTModel> {
    let cfg = GBDTConfig {
        n_estimators: 1,
        max_depth,
        learning_rate: 1.0,
        subsample: 1.0,
        colsample_bytree: 1.0,
        growth: Growth::DepthWise,
        lambda: 1.0,
        gamma: 0.0,
        ..Default::default()
    };
    train_named(x, y, feature_names, &cfg)
}
