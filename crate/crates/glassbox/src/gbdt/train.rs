//! Histogram-based boosting. Per-feature bin accumulation is sequential in
//! row order and per-feature results are reduced in feature order, so
//! training output is independent of thread count.

use std::collections::{BinaryHeap, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gbdt::binning::{self, Bins};
use crate::gbdt::{logloss_grad_hess, GBDTConfig, GBDTModel, Growth, Node, Tree};
use crate::matrix::Matrix;

/// Winning boundary for one feature histogram. The left side takes bins
/// `0..=boundary`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub boundary: usize,
    pub gain: f64,
}

fn gain_term(g: f64, h: f64, lambda: f64) -> f64 {
    let denom = h + lambda;
    if denom > 0.0 {
        g * g / denom
    } else {
        0.0
    }
}

fn gain_at(gl: f64, hl: f64, g_total: f64, h_total: f64, lambda: f64, gamma: f64) -> f64 {
    let gr = g_total - gl;
    let hr = h_total - hl;
    0.5 * (gain_term(gl, hl, lambda) + gain_term(gr, hr, lambda)
        - gain_term(g_total, h_total, lambda))
        - gamma
}

/// Second-order split gain maximized over bin boundaries:
/// `gain = 1/2 [G_L^2/(H_L+l) + G_R^2/(H_R+l) - (G_L+G_R)^2/(H_L+H_R+l)] - gamma`.
/// Returns `None` when the best gain is not strictly positive. Ties keep
/// the lowest boundary.
pub fn best_split(
    grad_hist: &[f64],
    hess_hist: &[f64],
    lambda: f64,
    gamma: f64,
) -> Option<SplitCandidate> {
    assert_eq!(grad_hist.len(), hess_hist.len(), "histograms must align");
    let m = grad_hist.len();
    if m < 2 {
        return None;
    }
    let g_total: f64 = grad_hist.iter().sum();
    let h_total: f64 = hess_hist.iter().sum();
    let mut gl = 0.0;
    let mut hl = 0.0;
    let mut best: Option<SplitCandidate> = None;
    for b in 0..m - 1 {
        gl += grad_hist[b];
        hl += hess_hist[b];
        let gain = gain_at(gl, hl, g_total, h_total, lambda, gamma);
        if gain > best.map_or(0.0, |c| c.gain) {
            best = Some(SplitCandidate { boundary: b, gain });
        }
    }
    best
}

struct Grower<'a> {
    bins: &'a Bins,
    g: &'a [f64],
    h: &'a [f64],
    w: &'a [f64],
    cols: &'a [usize],
    cfg: &'a GBDTConfig,
}

impl Grower<'_> {
    fn sums(&self, rows: &[u32]) -> (f64, f64, f64) {
        let mut g = 0.0;
        let mut h = 0.0;
        let mut w = 0.0;
        for &r in rows {
            g += self.g[r as usize];
            h += self.h[r as usize];
            w += self.w[r as usize];
        }
        (g, h, w)
    }

    fn leaf_value(&self, g: f64, h: f64) -> f64 {
        if h == 0.0 {
            0.0
        } else {
            -g / (h + self.cfg.lambda) * self.cfg.learning_rate
        }
    }

    fn hists(&self, feature: usize, rows: &[u32]) -> (Vec<f64>, Vec<f64>) {
        let n_bins = self.bins.n_bins(feature);
        let codes = &self.bins.codes[feature];
        let mut gh = vec![0.0; n_bins];
        let mut hh = vec![0.0; n_bins];
        for &r in rows {
            let b = codes[r as usize] as usize;
            gh[b] += self.g[r as usize];
            hh[b] += self.h[r as usize];
        }
        (gh, hh)
    }

    /// Best split over the sampled feature set; ties keep the lowest
    /// feature index.
    fn best_over_features(&self, rows: &[u32]) -> Option<(usize, SplitCandidate)> {
        let candidates: Vec<Option<SplitCandidate>> = self
            .cols
            .par_iter()
            .map(|&j| {
                let (gh, hh) = self.hists(j, rows);
                best_split(&gh, &hh, self.cfg.lambda, self.cfg.gamma)
            })
            .collect();
        let mut best: Option<(usize, SplitCandidate)> = None;
        for (idx, cand) in candidates.into_iter().enumerate() {
            if let Some(c) = cand {
                match &best {
                    Some((_, prev)) if prev.gain >= c.gain => {}
                    _ => best = Some((self.cols[idx], c)),
                }
            }
        }
        best
    }

    fn partition(&self, rows: &[u32], feature: usize, boundary: usize) -> (Vec<u32>, Vec<u32>) {
        let codes = &self.bins.codes[feature];
        let mut left = Vec::new();
        let mut right = Vec::new();
        for &r in rows {
            if (codes[r as usize] as usize) <= boundary {
                left.push(r);
            } else {
                right.push(r);
            }
        }
        (left, right)
    }

    fn new_leaf(&self, nodes: &mut Vec<Node>, rows: &[u32]) -> (usize, f64, f64, f64) {
        let (g, h, w) = self.sums(rows);
        let id = nodes.len();
        nodes.push(Node::Leaf {
            value: self.leaf_value(g, h),
            cover: w,
        });
        (id, g, h, w)
    }

    fn grow_depth_wise(&self, rows: Vec<u32>) -> Tree {
        let mut nodes = Vec::new();
        let (root, ..) = self.new_leaf(&mut nodes, &rows);
        let mut queue = VecDeque::new();
        queue.push_back((root, rows, 0usize));
        while let Some((slot, rows, depth)) = queue.pop_front() {
            if depth >= self.cfg.max_depth {
                continue;
            }
            let Some((feature, cand)) = self.best_over_features(&rows) else {
                continue;
            };
            let (lrows, rrows) = self.partition(&rows, feature, cand.boundary);
            debug_assert!(!lrows.is_empty() && !rrows.is_empty());
            let cover = nodes[slot].cover();
            let (left, ..) = self.new_leaf(&mut nodes, &lrows);
            let (right, ..) = self.new_leaf(&mut nodes, &rrows);
            nodes[slot] = Node::Internal {
                feature,
                threshold: self.bins.cuts[feature][cand.boundary],
                left,
                right,
                cover,
            };
            queue.push_back((left, lrows, depth + 1));
            queue.push_back((right, rrows, depth + 1));
        }
        Tree { nodes }
    }

    fn grow_leaf_wise(&self, rows: Vec<u32>) -> Tree {
        struct Entry {
            gain: f64,
            seq: usize,
            slot: usize,
            feature: usize,
            boundary: usize,
            rows: Vec<u32>,
            depth: usize,
        }
        impl PartialEq for Entry {
            fn eq(&self, other: &Self) -> bool {
                self.gain == other.gain && self.seq == other.seq
            }
        }
        impl Eq for Entry {}
        impl PartialOrd for Entry {
            fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for Entry {
            fn cmp(&self, other: &Self) -> std::cmp::Ordering {
                // max-heap: highest gain first, ties by earliest creation
                self.gain
                    .partial_cmp(&other.gain)
                    .expect("split gains are finite")
                    .then(other.seq.cmp(&self.seq))
            }
        }

        let mut nodes = Vec::new();
        let (root, ..) = self.new_leaf(&mut nodes, &rows);
        let mut heap: BinaryHeap<Entry> = BinaryHeap::new();
        let mut seq = 0usize;
        if self.cfg.max_depth > 0 {
            if let Some((feature, cand)) = self.best_over_features(&rows) {
                heap.push(Entry {
                    gain: cand.gain,
                    seq,
                    slot: root,
                    feature,
                    boundary: cand.boundary,
                    rows,
                    depth: 0,
                });
                seq += 1;
            }
        }
        let mut leaves = 1usize;
        while leaves < self.cfg.max_leaves {
            let Some(entry) = heap.pop() else { break };
            let (lrows, rrows) = self.partition(&entry.rows, entry.feature, entry.boundary);
            debug_assert!(!lrows.is_empty() && !rrows.is_empty());
            let cover = nodes[entry.slot].cover();
            let (left, ..) = self.new_leaf(&mut nodes, &lrows);
            let (right, ..) = self.new_leaf(&mut nodes, &rrows);
            nodes[entry.slot] = Node::Internal {
                feature: entry.feature,
                threshold: self.bins.cuts[entry.feature][entry.boundary],
                left,
                right,
                cover,
            };
            leaves += 1;
            for (slot, child_rows) in [(left, lrows), (right, rrows)] {
                if entry.depth + 1 >= self.cfg.max_depth {
                    continue;
                }
                if let Some((feature, cand)) = self.best_over_features(&child_rows) {
                    heap.push(Entry {
                        gain: cand.gain,
                        seq,
                        slot,
                        feature,
                        boundary: cand.boundary,
                        rows: child_rows,
                        depth: entry.depth + 1,
                    });
                    seq += 1;
                }
            }
        }
        Tree { nodes }
    }

    /// One (feature, threshold) per level, shared by every node of that
    /// level. A node whose own gain at the shared condition is not
    /// positive stays a leaf, which keeps covers positive everywhere.
    fn grow_symmetric(&self, rows: Vec<u32>) -> Tree {
        let mut nodes = Vec::new();
        let (root, ..) = self.new_leaf(&mut nodes, &rows);
        let mut level: Vec<(usize, Vec<u32>)> = vec![(root, rows)];

        for _ in 0..self.cfg.max_depth {
            if level.is_empty() {
                break;
            }
            // per feature: boundary maximizing the summed positive gains
            let per_feature: Vec<Option<(usize, f64)>> = self
                .cols
                .par_iter()
                .map(|&j| {
                    let n_bins = self.bins.n_bins(j);
                    if n_bins < 2 {
                        return None;
                    }
                    let hists: Vec<(Vec<f64>, Vec<f64>)> = level
                        .iter()
                        .map(|(_, rows)| self.hists(j, rows))
                        .collect();
                    let totals: Vec<(f64, f64)> = hists
                        .iter()
                        .map(|(gh, hh)| (gh.iter().sum(), hh.iter().sum()))
                        .collect();
                    let mut best: Option<(usize, f64)> = None;
                    let mut prefixes = vec![(0.0, 0.0); level.len()];
                    for b in 0..n_bins - 1 {
                        let mut total_gain = 0.0;
                        for (i, (gh, hh)) in hists.iter().enumerate() {
                            prefixes[i].0 += gh[b];
                            prefixes[i].1 += hh[b];
                            let gain = gain_at(
                                prefixes[i].0,
                                prefixes[i].1,
                                totals[i].0,
                                totals[i].1,
                                self.cfg.lambda,
                                self.cfg.gamma,
                            );
                            if gain > 0.0 {
                                total_gain += gain;
                            }
                        }
                        if total_gain > best.map_or(0.0, |(_, g)| g) {
                            best = Some((b, total_gain));
                        }
                    }
                    best
                })
                .collect();

            let mut chosen: Option<(usize, usize, f64)> = None;
            for (idx, cand) in per_feature.into_iter().enumerate() {
                if let Some((boundary, total)) = cand {
                    match &chosen {
                        Some((.., prev)) if *prev >= total => {}
                        _ => chosen = Some((self.cols[idx], boundary, total)),
                    }
                }
            }
            let Some((feature, boundary, _)) = chosen else { break };

            let mut next = Vec::new();
            for (slot, rows) in level {
                let (gh, hh) = self.hists(feature, &rows);
                let gl: f64 = gh[..=boundary].iter().sum();
                let hl: f64 = hh[..=boundary].iter().sum();
                let g_total: f64 = gh.iter().sum();
                let h_total: f64 = hh.iter().sum();
                let gain = gain_at(gl, hl, g_total, h_total, self.cfg.lambda, self.cfg.gamma);
                if gain <= 0.0 {
                    continue; // stays a leaf
                }
                let (lrows, rrows) = self.partition(&rows, feature, boundary);
                debug_assert!(!lrows.is_empty() && !rrows.is_empty());
                let cover = nodes[slot].cover();
                let (left, ..) = self.new_leaf(&mut nodes, &lrows);
                let (right, ..) = self.new_leaf(&mut nodes, &rrows);
                nodes[slot] = Node::Internal {
                    feature,
                    threshold: self.bins.cuts[feature][boundary],
                    left,
                    right,
                    cover,
                };
                next.push((left, lrows));
                next.push((right, rrows));
            }
            level = next;
        }
        Tree { nodes }
    }
}

/// Recompute internal covers bottom-up as the exact sum of their
/// children, so the cover invariant holds without rounding slack.
fn fix_covers(tree: &mut Tree, id: usize) -> f64 {
    match tree.nodes[id] {
        Node::Leaf { cover, .. } => cover,
        Node::Internal { left, right, .. } => {
            let sum = fix_covers(tree, left) + fix_covers(tree, right);
            if let Node::Internal { cover, .. } = &mut tree.nodes[id] {
                *cover = sum;
            }
            sum
        }
    }
}

/// Train with auto-generated feature names `f0..f{p-1}`.
pub fn train(x: &Matrix, y: &[u8], cfg: &GBDTConfig) -> Result<GBDTModel> {
    let names: Vec<String> = (0..x.n_cols()).map(|j| format!("f{j}")).collect();
    train_named(x, y, &names, cfg)
}

/// Train a boosted ensemble. Deterministic per seed and independent of
/// thread count.
pub fn train_named(
    x: &Matrix,
    y: &[u8],
    feature_names: &[String],
    cfg: &GBDTConfig,
) -> Result<GBDTModel> {
    cfg.validate()?;
    let n = x.n_rows();
    let p = x.n_cols();
    if n == 0 || p == 0 {
        return Err(Error::Train(format!("empty training matrix ({n} rows, {p} cols)")));
    }
    if y.len() != n {
        return Err(Error::Train(format!("{n} rows but {} labels", y.len())));
    }
    if feature_names.len() != p {
        return Err(Error::Train(format!(
            "{p} columns but {} feature names",
            feature_names.len()
        )));
    }
    for j in 0..p {
        if x.col(j).iter().any(|v| !v.is_finite()) {
            return Err(Error::Train(format!(
                "feature `{}` contains non-finite values",
                feature_names[j]
            )));
        }
    }
    let n_pos = y.iter().filter(|&&v| v == 1).count();
    if n_pos == 0 || n_pos == n {
        return Err(Error::Train(
            "training labels contain a single class".into(),
        ));
    }

    let w: Vec<f64> = y
        .iter()
        .map(|&v| if v == 1 { cfg.scale_pos_weight } else { 1.0 })
        .collect();
    let w_sum: f64 = w.iter().sum();
    let w_pos: f64 = w
        .iter()
        .zip(y)
        .filter(|(_, &v)| v == 1)
        .map(|(wi, _)| *wi)
        .sum();
    let p_bar = (w_pos / w_sum).clamp(1e-6, 1.0 - 1e-6);
    let base_score = (p_bar / (1.0 - p_bar)).ln();

    let bins = binning::build(x, cfg.n_bins);
    let mut margins = vec![base_score; n];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_sub = ((n as f64 * cfg.subsample).round() as usize).clamp(1, n);
    let n_col = ((p as f64 * cfg.colsample_bytree).round() as usize).clamp(1, p);

    let mut trees = Vec::with_capacity(cfg.n_estimators);
    for _ in 0..cfg.n_estimators {
        let mut g = vec![0.0; n];
        let mut h = vec![0.0; n];
        for i in 0..n {
            let (gi, hi) = logloss_grad_hess(y[i], margins[i], w[i]);
            g[i] = gi;
            h[i] = hi;
        }

        let rows: Vec<u32> = if n_sub == n {
            (0..n as u32).collect()
        } else {
            let mut picked = rand::seq::index::sample(&mut rng, n, n_sub).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| i as u32).collect()
        };
        let cols: Vec<usize> = if n_col == p {
            (0..p).collect()
        } else {
            let mut picked = rand::seq::index::sample(&mut rng, p, n_col).into_vec();
            picked.sort_unstable();
            picked
        };

        let grower = Grower {
            bins: &bins,
            g: &g,
            h: &h,
            w: &w,
            cols: &cols,
            cfg,
        };
        let mut tree = match cfg.growth {
            Growth::DepthWise => grower.grow_depth_wise(rows),
            Growth::LeafWise => grower.grow_leaf_wise(rows),
            Growth::Symmetric => grower.grow_symmetric(rows),
        };
        fix_covers(&mut tree, 0);

        margins
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, m)| *m += tree.eval_cols(x, i));
        trees.push(tree);
    }

    Ok(GBDTModel {
        trees,
        base_score,
        config: cfg.clone(),
        feature_names: feature_names.to_vec(),
    })
}

impl Tree {
    /// Evaluate row `i` of a column-major matrix without copying the row.
    pub(crate) fn eval_cols(&self, x: &Matrix, i: usize) -> f64 {
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
                    id = if x.get(i, *feature) < *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }
}
