//! Path-dependent TreeSHAP.
//!
//! Attributions are Shapley values of the coalition game whose value is
//! the tree output with absent features marginalized by node-cover
//! fractions. The algorithm walks each root-leaf path once, maintaining a
//! polynomial over the sizes of feature subsets along the path; a feature
//! met twice is unwound and re-extended with combined fractions, so each
//! unique feature appears once. Runs in polynomial time and agrees with
//! [`crate::explain::exact_shapley_oracle`] to floating-point rounding.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gbdt::{GBDTModel, Node, Tree};
use crate::matrix::Matrix;

/// Additive attributions for one prediction, in log-odds units:
/// `base_value + sum(phi) = predict_margin(x)`.
#[derive(Debug, Clone, Serialize)]
pub struct ShapValues {
    pub phi: Vec<f64>,
    pub base_value: f64,
    pub feature_names: Vec<String>,
}

impl ShapValues {
    /// Reconstructed model output (margin).
    pub fn output(&self) -> f64 {
        self.base_value + self.phi.iter().sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct PathItem {
    feature: Option<usize>,
    zero: f64,
    one: f64,
    pweight: f64,
}

fn extend(path: &mut [PathItem], depth: usize, zero: f64, one: f64, feature: Option<usize>) {
    path[depth] = PathItem {
        feature,
        zero,
        one,
        pweight: if depth == 0 { 1.0 } else { 0.0 },
    };
    for i in (0..depth).rev() {
        path[i + 1].pweight += one * path[i].pweight * (i + 1) as f64 / (depth + 1) as f64;
        path[i].pweight = zero * path[i].pweight * (depth - i) as f64 / (depth + 1) as f64;
    }
}

fn unwind(path: &mut [PathItem], depth: usize, index: usize) {
    let one = path[index].one;
    let zero = path[index].zero;
    let mut next = path[depth].pweight;
    for i in (0..depth).rev() {
        if one != 0.0 {
            let tmp = path[i].pweight;
            path[i].pweight = next * (depth + 1) as f64 / ((i + 1) as f64 * one);
            next = tmp - path[i].pweight * zero * (depth - i) as f64 / (depth + 1) as f64;
        } else {
            path[i].pweight = path[i].pweight * (depth + 1) as f64 / (zero * (depth - i) as f64);
        }
    }
    for i in index..depth {
        path[i].feature = path[i + 1].feature;
        path[i].zero = path[i + 1].zero;
        path[i].one = path[i + 1].one;
    }
}

fn unwound_sum(path: &[PathItem], depth: usize, index: usize) -> f64 {
    let one = path[index].one;
    let zero = path[index].zero;
    let mut next = path[depth].pweight;
    let mut total = 0.0;
    if one != 0.0 {
        for i in (0..depth).rev() {
            let tmp = next / ((i + 1) as f64 * one);
            total += tmp;
            next = path[i].pweight - tmp * zero * (depth - i) as f64;
        }
    } else {
        for i in (0..depth).rev() {
            total += path[i].pweight / (zero * (depth - i) as f64);
        }
    }
    total * (depth + 1) as f64
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    tree: &Tree,
    x: &[f64],
    phi: &mut [f64],
    node: usize,
    path: &mut [PathItem],
    depth: usize,
    parent_zero: f64,
    parent_one: f64,
    parent_feature: Option<usize>,
) {
    extend(path, depth, parent_zero, parent_one, parent_feature);
    match &tree.nodes[node] {
        Node::Leaf { value, .. } => {
            for i in 1..=depth {
                let w = unwound_sum(path, depth, i);
                phi[path[i].feature.expect("path items carry a feature")] +=
                    w * (path[i].one - path[i].zero) * value;
            }
        }
        Node::Internal {
            feature,
            threshold,
            left,
            right,
            cover,
        } => {
            let (hot, cold) = if x[*feature] < *threshold {
                (*left, *right)
            } else {
                (*right, *left)
            };
            let hot_fraction = tree.nodes[hot].cover() / cover;
            let cold_fraction = tree.nodes[cold].cover() / cover;

            // a feature revisited along the path is folded into one item
            let mut depth = depth;
            let mut incoming_zero = 1.0;
            let mut incoming_one = 1.0;
            if let Some(prev) = (1..=depth).find(|&i| path[i].feature == Some(*feature)) {
                incoming_zero = path[prev].zero;
                incoming_one = path[prev].one;
                unwind(path, depth, prev);
                depth -= 1;
            }

            let (parent_path, child_path) = path.split_at_mut(depth + 1);
            child_path[..parent_path.len()].copy_from_slice(parent_path);
            recurse(
                tree,
                x,
                phi,
                hot,
                child_path,
                depth + 1,
                hot_fraction * incoming_zero,
                incoming_one,
                Some(*feature),
            );
            child_path[..parent_path.len()].copy_from_slice(parent_path);
            recurse(
                tree,
                x,
                phi,
                cold,
                child_path,
                depth + 1,
                cold_fraction * incoming_zero,
                0.0,
                Some(*feature),
            );
        }
    }
}

fn shap_one_tree(tree: &Tree, x: &[f64], phi: &mut [f64]) {
    let depth = tree.depth() + 2;
    let mut path = vec![PathItem::default(); depth * (depth + 1) / 2 + depth];
    recurse(tree, x, phi, 0, &mut path, 0, 1.0, 1.0, None);
}

fn check_model(model: &GBDTModel, width: usize) -> Result<()> {
    if width != model.n_features() {
        return Err(Error::Explain(format!(
            "expected {} features, found {width}",
            model.n_features()
        )));
    }
    for tree in &model.trees {
        for node in &tree.nodes {
            if node.cover() <= 0.0 {
                return Err(Error::Explain(
                    "model has a node with non-positive cover; cannot weight paths".into(),
                ));
            }
        }
    }
    Ok(())
}

/// SHAP attributions for one row. `base_value` is the cover-weighted
/// expectation of the model margin; a feature no tree splits on gets
/// exactly zero.
pub fn tree_shap(model: &GBDTModel, x: &[f64]) -> Result<ShapValues> {
    check_model(model, x.len())?;
    let mut phi = vec![0.0; model.n_features()];
    let mut base_value = model.base_score;
    for tree in &model.trees {
        base_value += tree.expectation();
        shap_one_tree(tree, x, &mut phi);
    }
    Ok(ShapValues {
        phi,
        base_value,
        feature_names: model.feature_names.clone(),
    })
}

/// Features ranked by mean absolute SHAP value over a dataset,
/// descending; ties resolve to the lower feature index.
pub fn shap_summary(model: &GBDTModel, x: &Matrix) -> Result<Vec<(String, f64)>> {
    check_model(model, x.n_cols())?;
    let p = model.n_features();
    let per_row: Vec<Vec<f64>> = (0..x.n_rows())
        .into_par_iter()
        .map(|i| {
            let row = x.row(i);
            let mut phi = vec![0.0; p];
            for tree in &model.trees {
                shap_one_tree(tree, &row, &mut phi);
            }
            phi
        })
        .collect();
    let mut mean_abs = vec![0.0; p];
    for phi in &per_row {
        for (m, v) in mean_abs.iter_mut().zip(phi) {
            *m += v.abs();
        }
    }
    let n = x.n_rows().max(1) as f64;
    let mut ranked: Vec<(usize, f64)> = mean_abs
        .into_iter()
        .map(|m| m / n)
        .enumerate()
        .collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    Ok(ranked
        .into_iter()
        .map(|(j, m)| (model.feature_names[j].clone(), m))
        .collect())
}

/// First `k` feature names of a ranking.
pub fn select_top_k(ranking: &[(String, f64)], k: usize) -> Result<Vec<String>> {
    if k > ranking.len() {
        return Err(Error::Explain(format!(
            "cannot select top {k} of {} ranked features",
            ranking.len()
        )));
    }
    Ok(ranking[..k].iter().map(|(n, _)| n.clone()).collect())
}
