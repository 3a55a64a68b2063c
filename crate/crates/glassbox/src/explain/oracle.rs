//! Exact Shapley attribution by subset enumeration — the independent
//! oracle that pins down what TreeSHAP must produce.
//!
//! The coalition value `v(S)` is a tree walk: splits on features in `S`
//! follow the instance, splits on absent features average both children
//! weighted by cover. `phi_i` then sums `|S|! (n-|S|-1)! / n!` weighted
//! marginal contributions over all `2^(n-1)` subsets. Exponential, so the
//! feature count is capped.

use crate::error::{Error, Result};
use crate::explain::ShapValues;
use crate::gbdt::{GBDTModel, Node, Tree};

const MAX_FEATURES: usize = 12;

fn walk(tree: &Tree, node: usize, x: &[f64], mask: u32) -> f64 {
    match &tree.nodes[node] {
        Node::Leaf { value, .. } => *value,
        Node::Internal {
            feature,
            threshold,
            left,
            right,
            cover,
        } => {
            if mask & (1 << feature) != 0 {
                let next = if x[*feature] < *threshold { *left } else { *right };
                walk(tree, next, x, mask)
            } else {
                let lf = tree.nodes[*left].cover() / cover;
                let rf = tree.nodes[*right].cover() / cover;
                lf * walk(tree, *left, x, mask) + rf * walk(tree, *right, x, mask)
            }
        }
    }
}

/// Exact Shapley values of the cover-marginalized game. Only usable up to
/// [`MAX_FEATURES`] features.
pub fn exact_shapley_oracle(model: &GBDTModel, x: &[f64]) -> Result<ShapValues> {
    let p = model.n_features();
    if x.len() != p {
        return Err(Error::Explain(format!(
            "expected {p} features, found {}",
            x.len()
        )));
    }
    if p > MAX_FEATURES {
        return Err(Error::Explain(format!(
            "exact oracle enumerates 2^n subsets; {p} features exceeds the cap of {MAX_FEATURES}"
        )));
    }

    // Shapley weight per coalition size |S| = s, out of n players
    let factorial = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
    let weights: Vec<f64> = (0..p)
        .map(|s| factorial(s) * factorial(p - s - 1) / factorial(p))
        .collect();

    let mut phi = vec![0.0; p];
    let mut base_value = model.base_score;
    for tree in &model.trees {
        let values: Vec<f64> = (0u32..1 << p).map(|mask| walk(tree, 0, x, mask)).collect();
        base_value += values[0];
        for i in 0..p {
            let bit = 1u32 << i;
            for mask in 0u32..1 << p {
                if mask & bit == 0 {
                    let s = mask.count_ones() as usize;
                    phi[i] += weights[s] * (values[(mask | bit) as usize] - values[mask as usize]);
                }
            }
        }
    }
    Ok(ShapValues {
        phi,
        base_value,
        feature_names: model.feature_names.clone(),
    })
}
