//! Gradient-boosted decision trees for binary classification with logistic
//! loss. One trainer drives three tree-growth strategies (depth-wise,
//! leaf-wise, symmetric), which is how the three base learners of the
//! stacking ensemble differ structurally.

mod binning;
mod serialize;
mod train;

pub use binning::Bins;
pub use serialize::{model_from_json, model_to_json};
pub use train::{best_split, train, train_named, SplitCandidate};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Tree growth strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Growth {
    /// Fill levels until `max_depth` (classic boosted-tree expansion).
    DepthWise,
    /// Repeatedly split the highest-gain leaf, up to `max_leaves`.
    LeafWise,
    /// One shared (feature, threshold) per level; oblivious trees.
    Symmetric,
}

impl std::fmt::Display for Growth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Growth::DepthWise => "depth_wise",
            Growth::LeafWise => "leaf_wise",
            Growth::Symmetric => "symmetric",
        };
        f.write_str(s)
    }
}

/// Booster hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GBDTConfig {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    /// Row fraction sampled per tree, without replacement.
    pub subsample: f64,
    /// Feature fraction sampled per tree.
    pub colsample_bytree: f64,
    /// Weight multiplier for positive-class rows.
    pub scale_pos_weight: f64,
    pub growth: Growth,
    /// Leaf cap, used by leaf-wise growth only.
    pub max_leaves: usize,
    /// L2 regularizer on leaf values.
    pub lambda: f64,
    /// Minimum split gain.
    pub gamma: f64,
    /// Histogram bin count.
    pub n_bins: usize,
    pub seed: u64,
}

impl Default for GBDTConfig {
    fn default() -> Self {
        GBDTConfig {
            n_estimators: 300,
            max_depth: 6,
            learning_rate: 0.1,
            subsample: 0.8,
            colsample_bytree: 0.8,
            scale_pos_weight: 1.0,
            growth: Growth::DepthWise,
            max_leaves: 31,
            lambda: 1.0,
            gamma: 0.0,
            n_bins: 256,
            seed: 0,
        }
    }
}

impl GBDTConfig {
    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::Config(msg));
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return err(format!("learning_rate must be in (0,1], got {}", self.learning_rate));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return err(format!("subsample must be in (0,1], got {}", self.subsample));
        }
        if !(self.colsample_bytree > 0.0 && self.colsample_bytree <= 1.0) {
            return err(format!(
                "colsample_bytree must be in (0,1], got {}",
                self.colsample_bytree
            ));
        }
        if self.scale_pos_weight < 0.0 {
            return err(format!(
                "scale_pos_weight must be >= 0, got {}",
                self.scale_pos_weight
            ));
        }
        if self.lambda < 0.0 {
            return err(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if self.gamma < 0.0 {
            return err(format!("gamma must be >= 0, got {}", self.gamma));
        }
        if self.growth == Growth::LeafWise && self.max_leaves < 2 {
            return err(format!(
                "max_leaves must be >= 2 for leaf-wise growth, got {}",
                self.max_leaves
            ));
        }
        if !(2..=65_535).contains(&self.n_bins) {
            return err(format!("n_bins must be in [2, 65535], got {}", self.n_bins));
        }
        Ok(())
    }
}

/// One tree node. `cover` is the sum of training sample weights that
/// reached the node; internal covers equal the sum of their children's.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Internal {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        cover: f64,
    },
    Leaf {
        value: f64,
        cover: f64,
    },
}

impl Node {
    pub fn cover(&self) -> f64 {
        match self {
            Node::Internal { cover, .. } | Node::Leaf { cover, .. } => *cover,
        }
    }
}

/// A regression tree stored as an index-linked node arena; root is node 0.
/// Rows go left when `x[feature] < threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    /// Leaf value reached by a row.
    pub fn eval(&self, row: &[f64]) -> f64 {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { value, .. } => return *value,
                Node::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    id = if row[*feature] < *threshold { *left } else { *right };
                }
            }
        }
    }

    /// Cover-weighted expectation of the tree output over the training
    /// distribution.
    pub fn expectation(&self) -> f64 {
        self.expectation_at(0)
    }

    fn expectation_at(&self, id: usize) -> f64 {
        match &self.nodes[id] {
            Node::Leaf { value, .. } => *value,
            Node::Internal {
                left, right, cover, ..
            } => {
                let lc = self.nodes[*left].cover();
                let rc = self.nodes[*right].cover();
                debug_assert!(*cover > 0.0);
                (lc / cover) * self.expectation_at(*left)
                    + (rc / cover) * self.expectation_at(*right)
            }
        }
    }

    /// Longest root-to-leaf path length in edges.
    pub fn depth(&self) -> usize {
        self.depth_at(0)
    }

    fn depth_at(&self, id: usize) -> usize {
        match &self.nodes[id] {
            Node::Leaf { .. } => 0,
            Node::Internal { left, right, .. } => {
                1 + self.depth_at(*left).max(self.depth_at(*right))
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    /// Does any node split on `feature`?
    pub fn uses_feature(&self, feature: usize) -> bool {
        self.nodes.iter().any(
            |n| matches!(n, Node::Internal { feature: f, .. } if *f == feature),
        )
    }
}

/// A trained boosted ensemble. Prediction margin is
/// `base_score + sum of per-tree leaf values` (additivity).
#[derive(Debug, Clone, PartialEq)]
pub struct GBDTModel {
    pub trees: Vec<Tree>,
    pub base_score: f64,
    pub config: GBDTConfig,
    pub feature_names: Vec<String>,
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Gradient and hessian of the weighted logistic loss at a margin:
/// `g = w (p - y)`, `h = w p (1 - p)` with `p = sigmoid(margin)`.
pub fn logloss_grad_hess(y: u8, margin: f64, w: f64) -> (f64, f64) {
    let p = sigmoid(margin);
    (w * (p - f64::from(y)), w * p * (1.0 - p))
}

/// Weighted logistic loss of one example, used by the gradient checks and
/// the monotonicity tests.
pub fn logloss(y: u8, margin: f64, w: f64) -> f64 {
    let p = sigmoid(margin).clamp(1e-15, 1.0 - 1e-15);
    let y = f64::from(y);
    -w * (y * p.ln() + (1.0 - y) * (1.0 - p).ln())
}

impl GBDTModel {
    fn check_width(&self, width: usize) -> Result<()> {
        if width != self.feature_names.len() {
            return Err(Error::Predict(format!(
                "expected {} features, found {width}",
                self.feature_names.len()
            )));
        }
        Ok(())
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Raw log-odds for one row.
    pub fn predict_margin(&self, row: &[f64]) -> Result<f64> {
        self.check_width(row.len())?;
        Ok(self.margin_unchecked(row))
    }

    pub(crate) fn margin_unchecked(&self, row: &[f64]) -> f64 {
        self.base_score + self.trees.iter().map(|t| t.eval(row)).sum::<f64>()
    }

    pub fn predict_proba(&self, row: &[f64]) -> Result<f64> {
        Ok(sigmoid(self.predict_margin(row)?))
    }

    pub fn predict_margin_batch(&self, x: &Matrix) -> Result<Vec<f64>> {
        self.check_width(x.n_cols())?;
        let n = x.n_rows();
        let mut out = vec![0.0; n];
        out.par_iter_mut().enumerate().for_each(|(i, slot)| {
            *slot = self.margin_unchecked(&x.row(i));
        });
        Ok(out)
    }

    pub fn predict_proba_batch(&self, x: &Matrix) -> Result<Vec<f64>> {
        Ok(self
            .predict_margin_batch(x)?
            .into_iter()
            .map(sigmoid)
            .collect())
    }

    /// Does any tree reference this feature?
    pub fn uses_feature(&self, feature: usize) -> bool {
        self.trees.iter().any(|t| t.uses_feature(feature))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn single_split_tree(
        feature: usize,
        threshold: f64,
        left_value: f64,
        right_value: f64,
        left_cover: f64,
        right_cover: f64,
    ) -> Tree {
        Tree {
            nodes: vec![
                Node::Internal {
                    feature,
                    threshold,
                    left: 1,
                    right: 2,
                    cover: left_cover + right_cover,
                },
                Node::Leaf {
                    value: left_value,
                    cover: left_cover,
                },
                Node::Leaf {
                    value: right_value,
                    cover: right_cover,
                },
            ],
        }
    }

    #[test]
    fn grad_hess_values() {
        let (g, h) = logloss_grad_hess(1, 0.0, 1.0);
        assert!((g - (-0.5)).abs() < 1e-15);
        assert!((h - 0.25).abs() < 1e-15);
        let (g, h) = logloss_grad_hess(0, 0.0, 1.0);
        assert!((g - 0.5).abs() < 1e-15);
        assert!((h - 0.25).abs() < 1e-15);
        let (g, h) = logloss_grad_hess(1, 0.0, 3.0);
        assert!((g - (-1.5)).abs() < 1e-15);
        assert!((h - 0.75).abs() < 1e-15);
    }

    #[test]
    fn grad_hess_match_finite_differences() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let eps = 1e-4;
        for _ in 0..200 {
            let y = rng.gen_range(0..2) as u8;
            let margin: f64 = rng.gen_range(-4.0..4.0);
            let w: f64 = rng.gen_range(0.2..5.0);
            let (g, h) = logloss_grad_hess(y, margin, w);
            let fd_g = (logloss(y, margin + eps, w) - logloss(y, margin - eps, w)) / (2.0 * eps);
            let fd_h = (logloss(y, margin + eps, w) - 2.0 * logloss(y, margin, w)
                + logloss(y, margin - eps, w))
                / (eps * eps);
            assert!((g - fd_g).abs() < 1e-6, "g={g} fd={fd_g}");
            assert!((h - fd_h).abs() < 1e-4, "h={h} fd={fd_h}");
        }
    }

    #[test]
    fn empty_model_predicts_sigmoid_base() {
        let m = GBDTModel {
            trees: vec![],
            base_score: -1.2,
            config: GBDTConfig::default(),
            feature_names: vec!["a".into()],
        };
        assert_eq!(m.predict_proba(&[0.0]).unwrap(), sigmoid(-1.2));
        assert!(m.predict_proba(&[0.0, 1.0]).is_err()); // width mismatch
    }

    #[test]
    fn margin_zero_is_half() {
        assert_eq!(sigmoid(0.0), 0.5);
    }

    #[test]
    fn tree_eval_and_expectation() {
        let t = single_split_tree(0, 5.0, -1.0, 2.0, 3.0, 1.0);
        assert_eq!(t.eval(&[4.9]), -1.0);
        assert_eq!(t.eval(&[5.0]), 2.0); // ties go right (x < t is left)
        assert!((t.expectation() - (0.75 * -1.0 + 0.25 * 2.0)).abs() < 1e-15);
        assert_eq!(t.depth(), 1);
        assert_eq!(t.n_leaves(), 2);
        assert!(t.uses_feature(0));
        assert!(!t.uses_feature(1));
    }
}
