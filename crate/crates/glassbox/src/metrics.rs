//! Evaluation surface: confusion matrix, per-class precision/recall/F1,
//! ROC and PR curves, AUC, and F1-maximizing threshold search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary confusion counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tp: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tn + self.fp + self.fn_ + self.tp
    }
}

/// Precision/recall/F1 for one class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Classification report plus both curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    pub class0: ClassMetrics,
    pub class1: ClassMetrics,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub roc_points: Vec<RocPoint>,
    pub pr_points: Vec<PrPoint>,
    pub auc_roc: f64,
    pub auc_pr: f64,
    pub threshold_used: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// The sweep starts at +inf (nothing predicted positive).
    #[serde(with = "inf_float")]
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub recall: f64,
    pub precision: f64,
    #[serde(with = "inf_float")]
    pub threshold: f64,
}

/// JSON has no infinities; encode them as the strings "inf"/"-inf".
mod inf_float {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(v),
            Raw::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(de::Error::custom(format!("bad float `{other}`"))),
            },
        }
    }
}

/// Count tn/fp/fn/tp for 0/1 label vectors.
pub fn confusion(y: &[u8], yhat: &[u8]) -> Result<ConfusionMatrix> {
    if y.len() != yhat.len() {
        return Err(Error::Metrics(format!(
            "label length mismatch: {} vs {}",
            y.len(),
            yhat.len()
        )));
    }
    let mut cm = ConfusionMatrix {
        tn: 0,
        fp: 0,
        fn_: 0,
        tp: 0,
    };
    for (&t, &p) in y.iter().zip(yhat) {
        match (t, p) {
            (0, 0) => cm.tn += 1,
            (0, _) => cm.fp += 1,
            (_, 0) => cm.fn_ += 1,
            _ => cm.tp += 1,
        }
    }
    Ok(cm)
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1_of(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Per-class precision/recall/F1 plus accuracy and macro averages.
/// Zero denominators yield 0 by convention.
pub fn prf1(cm: &ConfusionMatrix) -> (ClassMetrics, ClassMetrics, f64) {
    let p1 = ratio(cm.tp, cm.tp + cm.fp);
    let r1 = ratio(cm.tp, cm.tp + cm.fn_);
    let p0 = ratio(cm.tn, cm.tn + cm.fn_);
    let r0 = ratio(cm.tn, cm.tn + cm.fp);
    let accuracy = ratio(cm.tp + cm.tn, cm.total());
    (
        ClassMetrics {
            precision: p0,
            recall: r0,
            f1: f1_of(p0, r0),
        },
        ClassMetrics {
            precision: p1,
            recall: r1,
            f1: f1_of(p1, r1),
        },
        accuracy,
    )
}

fn check_scores(y: &[u8], scores: &[f64]) -> Result<(usize, usize)> {
    if y.len() != scores.len() {
        return Err(Error::Metrics(format!(
            "labels/scores length mismatch: {} vs {}",
            y.len(),
            scores.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Metrics("scores contain NaN".into()));
    }
    let n_pos = y.iter().filter(|&&v| v == 1).count();
    let n_neg = y.len() - n_pos;
    Ok((n_pos, n_neg))
}

/// Indices 0..n sorted by descending score (stable on ties).
fn desc_order(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());
    idx
}

/// ROC curve (one point per unique score, preceded by (0,0)) and AUC.
///
/// The AUC is the Mann-Whitney rank statistic: the probability that a
/// random positive outranks a random negative, ties counting half. The
/// trapezoidal area under the returned curve equals it to within
/// floating-point rounding.
pub fn roc_auc(y: &[u8], scores: &[f64]) -> Result<(Vec<RocPoint>, f64)> {
    let (n_pos, n_neg) = check_scores(y, scores)?;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Metrics(
            "roc_auc requires both classes present".into(),
        ));
    }

    let order = desc_order(scores);
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if y[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / n_neg as f64,
            tpr: tp as f64 / n_pos as f64,
            threshold: s,
        });
    }

    // rank statistic with average ranks over tie groups
    let mut asc: Vec<usize> = (0..scores.len()).collect();
    asc.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < asc.len() {
        let s = scores[asc[i]];
        let start = i;
        let mut pos_in_group = 0u64;
        while i < asc.len() && scores[asc[i]] == s {
            if y[asc[i]] == 1 {
                pos_in_group += 1;
            }
            i += 1;
        }
        // ranks are 1-based; a tie group spanning ranks start+1..=i gets the average
        let avg_rank = (start + 1 + i) as f64 / 2.0;
        rank_sum_pos += avg_rank * pos_in_group as f64;
    }
    let u = rank_sum_pos - (n_pos as f64) * (n_pos as f64 + 1.0) / 2.0;
    let auc = u / (n_pos as f64 * n_neg as f64);

    Ok((points, auc))
}

/// Precision-recall curve (one point per unique score, thresholds
/// descending) and its step-interpolated area (precision held
/// right-continuous, i.e. average precision).
pub fn pr_curve(y: &[u8], scores: &[f64]) -> Result<(Vec<PrPoint>, f64)> {
    let (n_pos, _) = check_scores(y, scores)?;
    if n_pos == 0 {
        return Err(Error::Metrics("pr_curve requires at least one positive".into()));
    }

    let order = desc_order(scores);
    let mut points = Vec::new();
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut auc_pr = 0.0;
    let mut prev_recall = 0.0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if y[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let recall = tp as f64 / n_pos as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        points.push(PrPoint {
            recall,
            precision,
            threshold: s,
        });
        auc_pr += (recall - prev_recall) * precision;
        prev_recall = recall;
    }

    Ok((points, auc_pr))
}

/// F1-maximizing decision threshold by exhaustive scan over the unique
/// observed scores plus the 0 and 1 endpoints (predict positive iff
/// score >= t). Ties resolve to the lowest threshold.
pub fn best_f1_threshold(y: &[u8], scores: &[f64]) -> Result<(f64, f64)> {
    let (n_pos, _) = check_scores(y, scores)?;
    if n_pos == 0 {
        return Err(Error::Metrics(
            "best_f1_threshold requires at least one positive".into(),
        ));
    }
    let mut candidates: Vec<f64> = scores.to_vec();
    candidates.push(0.0);
    candidates.push(1.0);
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup();

    let mut best_t = candidates[0];
    let mut best_f1 = -1.0;
    for &t in &candidates {
        let mut tp = 0u64;
        let mut fp = 0u64;
        let mut fn_ = 0u64;
        for (&label, &s) in y.iter().zip(scores) {
            let pred = s >= t;
            match (label, pred) {
                (1, true) => tp += 1,
                (0, true) => fp += 1,
                (1, false) => fn_ += 1,
                _ => {}
            }
        }
        let p = ratio(tp, tp + fp);
        let r = ratio(tp, tp + fn_);
        let f1 = f1_of(p, r);
        if f1 > best_f1 {
            best_f1 = f1;
            best_t = t;
        }
    }
    Ok((best_t, best_f1))
}

/// Assemble the full report for scores at a decision threshold.
pub fn evaluate(y: &[u8], scores: &[f64], threshold: f64) -> Result<EvalReport> {
    let yhat: Vec<u8> = scores.iter().map(|&s| u8::from(s >= threshold)).collect();
    let cm = confusion(y, &yhat)?;
    let (class0, class1, accuracy) = prf1(&cm);
    let (roc_points, auc_roc) = roc_auc(y, scores)?;
    let (pr_points, auc_pr) = pr_curve(y, scores)?;
    Ok(EvalReport {
        confusion: cm,
        class0,
        class1,
        accuracy,
        macro_precision: (class0.precision + class1.precision) / 2.0,
        macro_recall: (class0.recall + class1.recall) / 2.0,
        macro_f1: (class0.f1 + class1.f1) / 2.0,
        roc_points,
        pr_points,
        auc_roc,
        auc_pr,
        threshold_used: threshold,
    })
}

/// Trapezoidal area under an ROC point list.
pub fn trapezoid_area(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// O(n^2) pair-counting AUC, the independent oracle.
    pub(crate) fn auc_brute_force(y: &[u8], scores: &[f64]) -> f64 {
        let mut concordant = 0.0;
        let mut pairs = 0.0;
        for (i, &yi) in y.iter().enumerate() {
            if yi != 1 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj != 0 {
                    continue;
                }
                pairs += 1.0;
                if scores[i] > scores[j] {
                    concordant += 1.0;
                } else if scores[i] == scores[j] {
                    concordant += 0.5;
                }
            }
        }
        concordant / pairs
    }

    #[test]
    fn confusion_counts() {
        let cm = confusion(&[0, 0, 1, 1], &[0, 1, 1, 0]).unwrap();
        assert_eq!(
            cm,
            ConfusionMatrix {
                tn: 1,
                fp: 1,
                fn_: 1,
                tp: 1
            }
        );
        let perfect = confusion(&[0, 1, 1], &[0, 1, 1]).unwrap();
        assert_eq!(perfect.fp + perfect.fn_, 0);
        let inverted = confusion(&[0, 1], &[1, 0]).unwrap();
        assert_eq!(inverted.tp + inverted.tn, 0);
        assert!(confusion(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn prf1_reproduces_reported_test_matrix() {
        let cm = ConfusionMatrix {
            tn: 113_453,
            fp: 481,
            fn_: 1_825,
            tp: 112_192,
        };
        let (_, class1, accuracy) = prf1(&cm);
        assert!((class1.recall - 0.9840).abs() < 1e-4, "{}", class1.recall);
        assert!((class1.precision - 0.9957).abs() < 1e-4, "{}", class1.precision);
        assert!((accuracy - 0.9899).abs() < 1e-4, "{accuracy}");
    }

    #[test]
    fn prf1_zero_denominator_convention() {
        let cm = ConfusionMatrix {
            tn: 5,
            fp: 0,
            fn_: 3,
            tp: 0,
        };
        let (_, class1, _) = prf1(&cm);
        assert_eq!(class1.precision, 0.0);
        assert_eq!(class1.f1, 0.0);
    }

    #[test]
    fn auc_perfect_and_tied() {
        let (_, auc) = roc_auc(&[0, 1], &[0.2, 0.9]).unwrap();
        assert_eq!(auc, 1.0);
        let (_, auc) = roc_auc(&[0, 1, 0, 1], &[0.5; 4]).unwrap();
        assert_eq!(auc, 0.5);
        assert!(roc_auc(&[1, 1], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn roc_curve_endpoints_and_trapezoid_match_rank_statistic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let n = rng.gen_range(10..200);
            let y: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2) as u8).collect();
            if y.iter().all(|&v| v == 0) || y.iter().all(|&v| v == 1) {
                continue;
            }
            // coarse grid of scores forces plenty of ties
            let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64 / 7.0).collect();
            let (points, auc) = roc_auc(&y, &scores).unwrap();
            let first = points.first().unwrap();
            let last = points.last().unwrap();
            assert_eq!((first.fpr, first.tpr), (0.0, 0.0));
            assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
            assert!((trapezoid_area(&points) - auc).abs() < 1e-12);
            assert!((auc_brute_force(&y, &scores) - auc).abs() < 1e-12);
        }
    }

    #[test]
    fn auc_invariant_under_monotone_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let y: Vec<u8> = (0..120).map(|_| rng.gen_range(0..2) as u8).collect();
        let scores: Vec<f64> = (0..120).map(|_| rng.gen::<f64>()).collect();
        let (_, auc) = roc_auc(&y, &scores).unwrap();
        let warped: Vec<f64> = scores.iter().map(|&s| (3.0 * s).exp() - 0.5).collect();
        let (_, auc2) = roc_auc(&y, &warped).unwrap();
        assert!((auc - auc2).abs() < 1e-12);
    }

    #[test]
    fn pr_curve_constant_scores_hits_prevalence() {
        let y = [1, 0, 0, 0];
        let scores = [0.3; 4];
        let (points, auc_pr) = pr_curve(&y, &scores).unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].recall, 1.0);
        assert_eq!(points[0].precision, 0.25);
        assert!((auc_pr - 0.25).abs() < 1e-12);
    }

    #[test]
    fn pr_curve_perfect_scores() {
        let (_, auc_pr) = pr_curve(&[0, 0, 1, 1], &[0.1, 0.2, 0.8, 0.9]).unwrap();
        assert!((auc_pr - 1.0).abs() < 1e-12);
        assert!(pr_curve(&[0, 0], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn pr_curve_matches_per_threshold_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 100;
        let y: Vec<u8> = (0..n).map(|_| u8::from(rng.gen::<f64>() < 0.3)).collect();
        let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0..12) as f64 / 11.0).collect();
        let (points, _) = pr_curve(&y, &scores).unwrap();
        let n_pos = y.iter().filter(|&&v| v == 1).count() as f64;
        for p in &points {
            let mut tp = 0.0;
            let mut fp = 0.0;
            for (&label, &s) in y.iter().zip(&scores) {
                if s >= p.threshold {
                    if label == 1 {
                        tp += 1.0;
                    } else {
                        fp += 1.0;
                    }
                }
            }
            assert_eq!(p.recall, tp / n_pos);
            assert_eq!(p.precision, tp / (tp + fp));
        }
    }

    #[test]
    fn best_f1_worked_example() {
        let (t, f1) = best_f1_threshold(&[0, 0, 1, 1], &[0.1, 0.4, 0.35, 0.8]).unwrap();
        assert_eq!(t, 0.35);
        assert!((f1 - 0.8).abs() < 1e-12);
    }

    #[test]
    fn best_f1_perfectly_separated() {
        let (t, f1) = best_f1_threshold(&[0, 0, 1, 1], &[0.1, 0.2, 0.7, 0.9]).unwrap();
        assert_eq!(f1, 1.0);
        assert_eq!(t, 0.7); // lowest positive score wins the tie
    }

    #[test]
    fn evaluate_perfect_predictions() {
        let y = [0, 1, 0, 1, 1];
        let scores = [0.1, 0.9, 0.2, 0.8, 0.95];
        let report = evaluate(&y, &scores, 0.5).unwrap();
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.class0.f1, 1.0);
        assert_eq!(report.class1.f1, 1.0);
        assert_eq!(report.auc_roc, 1.0);
        assert_eq!(report.threshold_used, 0.5);
    }
}
