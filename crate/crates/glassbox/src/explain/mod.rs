//! Post-hoc explanation suite: TreeSHAP attributions (with an exact
//! enumeration oracle), SHAP-based feature ranking and selection, LIME
//! local surrogates, partial dependence curves, and permutation feature
//! importance.

mod lime;
mod oracle;
mod pdp;
mod pfi;
mod shap;

pub use lime::{default_kernel_width, lime_explain, LimeExplanation};
pub use oracle::exact_shapley_oracle;
pub use pdp::{pdp, PDPCurve};
pub use pfi::{permutation_importance, PfiMetric, PfiResult};
pub use shap::{select_top_k, shap_summary, tree_shap, ShapValues};

use crate::error::Result;
use crate::matrix::Matrix;

/// Anything that maps rows to fraud probabilities. The model-agnostic
/// explainers (LIME, PDP, PFI) only ever see this surface.
pub trait ProbModel: Sync {
    fn predict_proba_batch(&self, x: &Matrix) -> Result<Vec<f64>>;
}

impl ProbModel for crate::gbdt::GBDTModel {
    fn predict_proba_batch(&self, x: &Matrix) -> Result<Vec<f64>> {
        crate::gbdt::GBDTModel::predict_proba_batch(self, x)
    }
}

/// Closures work as models in tests and quick experiments.
impl<F> ProbModel for F
where
    F: Fn(&Matrix) -> Vec<f64> + Sync,
{
    fn predict_proba_batch(&self, x: &Matrix) -> Result<Vec<f64>> {
        Ok(self(x))
    }
}
