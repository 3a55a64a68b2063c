//! Stacking: three boosted base learners (depth-wise, leaf-wise,
//! symmetric) blended by a shallow meta-booster over their predicted
//! probabilities.
//!
//! Meta-features are out-of-fold by default: for each fold, base models
//! trained on the complement predict the held-out rows, so no
//! meta-training feature for a row comes from a model that saw that row.
//! A naive mode (bases predict their own training data) exists for
//! comparison runs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explain::ProbModel;
use crate::gbdt::{model_from_json, model_to_json, train_named, GBDTConfig, GBDTModel};
use crate::matrix::Matrix;
use crate::resample::{smote, stratified_kfold, SmoteConfig};

pub const META_FEATURE_NAMES: [&str; 3] = ["base1_proba", "base2_proba", "base3_proba"];

/// How meta-features are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StackingMode {
    /// k-fold out-of-fold base predictions (no leakage).
    OutOfFold { k: usize },
    /// Bases predict the very rows they trained on.
    Naive,
}

/// The trained ensemble: three base boosters, a meta booster over their
/// probabilities, the feature subset they consume, and the decision
/// threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct StackingModel {
    pub base_models: Vec<GBDTModel>,
    pub meta_model: GBDTModel,
    pub selected_features: Vec<String>,
    pub threshold: f64,
}

/// Everything about how the fit was assembled, for threshold fitting and
/// leakage audits.
#[derive(Debug, Clone)]
pub struct StackingFitReport {
    /// Fold index per row (empty in naive mode).
    pub fold_of_row: Vec<usize>,
    /// The meta-training matrix (3 columns of base probabilities).
    pub meta_features: Matrix,
    /// Labels aligned with `meta_features` rows.
    pub meta_labels: Vec<u8>,
    /// Meta-model scores on `meta_features`; out-of-sample w.r.t. the
    /// bases in out-of-fold mode, so usable for threshold selection.
    pub meta_scores: Vec<f64>,
}

fn select_labels(y: &[u8], idx: &[usize]) -> Vec<u8> {
    idx.iter().map(|&i| y[i]).collect()
}

fn maybe_smote(
    x: &Matrix,
    y: &[u8],
    smote_cfg: Option<&SmoteConfig>,
    seed_offset: u64,
) -> Result<(Matrix, Vec<u8>)> {
    match smote_cfg {
        Some(cfg) => {
            let shifted = SmoteConfig {
                seed: cfg.seed.wrapping_add(seed_offset),
                ..cfg.clone()
            };
            smote(x, y, &shifted)
        }
        None => Ok((x.clone(), y.to_vec())),
    }
}

/// Train the stack. `x` must already be restricted to the selected
/// features, in `feature_names` order. When `smote_cfg` is given it is
/// applied to each fold's training side only (fold `f` uses SMOTE seed
/// `cfg.seed + f`) and to the full matrix for the final refit (offset
/// `k`); held-out rows keep the original class distribution. The returned
/// model carries threshold 0.5; callers refine it from the report.
#[allow(clippy::too_many_arguments)]
pub fn train_stacking(
    x: &Matrix,
    y: &[u8],
    feature_names: &[String],
    base_cfgs: &[GBDTConfig; 3],
    meta_cfg: &GBDTConfig,
    mode: StackingMode,
    smote_cfg: Option<&SmoteConfig>,
    seed: u64,
) -> Result<(StackingModel, StackingFitReport)> {
    let n = x.n_rows();
    if y.len() != n {
        return Err(Error::Train(format!("{n} rows but {} labels", y.len())));
    }

    let meta_names: Vec<String> = META_FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    let (fold_of_row, meta_features, meta_labels) = match mode {
        StackingMode::OutOfFold { k } => {
            if k < 2 {
                return Err(Error::Train(format!(
                    "out-of-fold stacking needs k >= 2, got {k}"
                )));
            }
            let folds = stratified_kfold(y, k, seed)?;
            let mut oof = Matrix::zeros(n, 3);
            for f in 0..k {
                let train_idx = folds.complement_rows(f);
                let held_idx = folds.fold_rows(f);
                let x_tr = x.select_rows(&train_idx);
                let y_tr = select_labels(y, &train_idx);
                let (x_fit, y_fit) = maybe_smote(&x_tr, &y_tr, smote_cfg, f as u64)?;
                let x_held = x.select_rows(&held_idx);
                for (m, cfg) in base_cfgs.iter().enumerate() {
                    let model = train_named(&x_fit, &y_fit, feature_names, cfg)?;
                    let probas = model.predict_proba_batch(&x_held)?;
                    for (&row, p) in held_idx.iter().zip(probas) {
                        oof.set(row, m, p);
                    }
                }
            }
            (folds.fold_of_row, oof, y.to_vec())
        }
        StackingMode::Naive => {
            let (x_fit, y_fit) = maybe_smote(x, y, smote_cfg, 0)?;
            let mut cols = Vec::with_capacity(3);
            for cfg in base_cfgs.iter() {
                let model = train_named(&x_fit, &y_fit, feature_names, cfg)?;
                cols.push(model.predict_proba_batch(&x_fit)?);
            }
            (Vec::new(), Matrix::from_columns(cols)?, y_fit)
        }
    };

    let meta_model = train_named(&meta_features, &meta_labels, &meta_names, meta_cfg)?;
    let meta_scores = meta_model.predict_proba_batch(&meta_features)?;

    // final base models are refit on everything
    let refit_offset = match mode {
        StackingMode::OutOfFold { k } => k as u64,
        StackingMode::Naive => 0,
    };
    let (x_all, y_all) = maybe_smote(x, y, smote_cfg, refit_offset)?;
    let mut base_models = Vec::with_capacity(3);
    for cfg in base_cfgs.iter() {
        base_models.push(train_named(&x_all, &y_all, feature_names, cfg)?);
    }

    Ok((
        StackingModel {
            base_models,
            meta_model,
            selected_features: feature_names.to_vec(),
            threshold: 0.5,
        },
        StackingFitReport {
            fold_of_row,
            meta_features,
            meta_labels,
            meta_scores,
        },
    ))
}

impl StackingModel {
    /// Base-model probabilities for each row, as the 3-column meta input.
    pub fn base_probabilities(&self, x: &Matrix) -> Result<Matrix> {
        let mut cols = Vec::with_capacity(self.base_models.len());
        for model in &self.base_models {
            cols.push(model.predict_proba_batch(x)?);
        }
        Matrix::from_columns(cols)
    }

    /// Meta probability of fraud per row. `x` must carry exactly the
    /// selected features, in order.
    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.n_cols() != self.selected_features.len() {
            return Err(Error::Predict(format!(
                "expected {} selected features, found {}",
                self.selected_features.len(),
                x.n_cols()
            )));
        }
        self.meta_model
            .predict_proba_batch(&self.base_probabilities(x)?)
    }

    /// Hard labels at the model threshold: fraud iff proba >= threshold.
    pub fn classify(&self, x: &Matrix) -> Result<Vec<u8>> {
        Ok(self
            .predict_proba(x)?
            .into_iter()
            .map(|p| u8::from(p >= self.threshold))
            .collect())
    }

    pub fn to_json(&self) -> String {
        let doc = StackDoc {
            format_version: FORMAT_VERSION,
            selected_features: self.selected_features.clone(),
            threshold: self.threshold,
            base_models: self
                .base_models
                .iter()
                .map(|m| serde_json::from_str(&model_to_json(m)).expect("model json is valid"))
                .collect(),
            meta_model: serde_json::from_str(&model_to_json(&self.meta_model))
                .expect("model json is valid"),
        };
        serde_json::to_string_pretty(&doc).expect("stacking document serializes")
    }

    pub fn from_json(json: &str) -> Result<StackingModel> {
        let doc: StackDoc = serde_json::from_str(json)
            .map_err(|e| Error::ModelFormat(format!("stacking document: {e}")))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unknown format_version {} (expected {FORMAT_VERSION})",
                doc.format_version
            )));
        }
        if doc.base_models.len() != 3 {
            return Err(Error::ModelFormat(format!(
                "expected 3 base models, found {}",
                doc.base_models.len()
            )));
        }
        if !(doc.threshold > 0.0 && doc.threshold < 1.0) {
            return Err(Error::ModelFormat(format!(
                "threshold must be in (0,1), got {}",
                doc.threshold
            )));
        }
        let base_models = doc
            .base_models
            .iter()
            .map(|v| model_from_json(&v.to_string()))
            .collect::<Result<Vec<_>>>()?;
        let meta_model = model_from_json(&doc.meta_model.to_string())?;
        if meta_model.n_features() != 3 {
            return Err(Error::ModelFormat(format!(
                "meta model must take 3 features, takes {}",
                meta_model.n_features()
            )));
        }
        Ok(StackingModel {
            base_models,
            meta_model,
            selected_features: doc.selected_features,
            threshold: doc.threshold,
        })
    }
}

impl ProbModel for StackingModel {
    fn predict_proba_batch(&self, x: &Matrix) -> Result<Vec<f64>> {
        self.predict_proba(x)
    }
}

const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct StackDoc {
    format_version: u32,
    selected_features: Vec<String>,
    threshold: f64,
    base_models: Vec<serde_json::Value>,
    meta_model: serde_json::Value,
}
