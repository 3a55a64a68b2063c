//! Transparent fraud detection on tabular data: a gradient-boosted
//! stacking ensemble with a complete post-hoc explanation suite.
//!
//! The crate covers the whole workflow:
//!
//! - [`data`]: CSV ingestion against a declared schema, table joins,
//!   median/mode imputation, label encoding, stratified splitting
//! - [`resample`]: SMOTE oversampling and stratified k-fold assignment
//! - [`gbdt`]: histogram-based boosted trees with logistic loss and three
//!   growth strategies (depth-wise, leaf-wise, symmetric)
//! - [`stacking`]: three base boosters blended by a shallow meta-booster
//!   trained on out-of-fold predictions
//! - [`tune`]: random and adaptive (density-ratio) hyperparameter search
//! - [`explain`]: TreeSHAP with an exact enumeration oracle, LIME, partial
//!   dependence, and permutation importance
//! - [`metrics`]: confusion matrix, precision/recall/F1, ROC/PR curves,
//!   AUC, and F1-optimal threshold search
//! - [`baselines`]: logistic regression and single-tree reference models
//! - [`pipeline`]: batch orchestration behind the `glassbox` binary
//!
//! Each capability has a runnable example; see `examples/` or the README.

pub mod baselines;
pub mod container;
pub mod data;
pub mod error;
pub mod explain;
pub mod gbdt;
pub mod matrix;
pub mod metrics;
pub mod pipeline;
pub mod resample;
pub mod stacking;
pub mod synth;
pub mod tune;

pub use error::{Error, Result};
pub use matrix::Matrix;
