//! Quantile-sketch histogram binning.
//!
//! Cut points are placed between distinct feature values. A value lands in
//! bin `#{cuts <= value}`, so a split at boundary `b` sends exactly the
//! rows with `value < cuts[b]` left, matching tree threshold semantics.

use rayon::prelude::*;

use crate::matrix::Matrix;

#[derive(Debug, Clone)]
pub struct Bins {
    /// Per feature: ascending cut values (possibly empty for constants).
    pub cuts: Vec<Vec<f64>>,
    /// Per feature, per row: bin index in `0..cuts.len() + 1`.
    pub codes: Vec<Vec<u16>>,
}

impl Bins {
    pub fn n_bins(&self, feature: usize) -> usize {
        self.cuts[feature].len() + 1
    }
}

fn cuts_for(values: &[f64], n_bins: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n == 0 {
        return Vec::new();
    }
    let n_distinct = 1 + sorted.windows(2).filter(|w| w[0] < w[1]).count();
    let mut cuts = Vec::new();
    if n_distinct <= n_bins {
        // one bin per distinct value: histogram splits are exact
        for w in sorted.windows(2) {
            if w[0] < w[1] {
                cuts.push((w[0] + w[1]) / 2.0);
            }
        }
    } else {
        for i in 1..n_bins {
            let pos = i * n / n_bins;
            if pos == 0 || pos >= n {
                continue;
            }
            if sorted[pos - 1] < sorted[pos] {
                let cut = (sorted[pos - 1] + sorted[pos]) / 2.0;
                if cuts.last() != Some(&cut) {
                    cuts.push(cut);
                }
            }
        }
    }
    cuts
}

pub fn bin_of(cuts: &[f64], value: f64) -> usize {
    cuts.partition_point(|c| *c <= value)
}

/// Build cuts from training quantiles and encode every value.
pub fn build(x: &Matrix, n_bins: usize) -> Bins {
    let per_feature: Vec<(Vec<f64>, Vec<u16>)> = (0..x.n_cols())
        .into_par_iter()
        .map(|j| {
            let col = x.col(j);
            let cuts = cuts_for(col, n_bins);
            let codes = col.iter().map(|&v| bin_of(&cuts, v) as u16).collect();
            (cuts, codes)
        })
        .collect();
    let mut cuts = Vec::with_capacity(per_feature.len());
    let mut codes = Vec::with_capacity(per_feature.len());
    for (c, k) in per_feature {
        cuts.push(c);
        codes.push(k);
    }
    Bins { cuts, codes }
}
