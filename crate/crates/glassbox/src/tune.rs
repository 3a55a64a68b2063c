//! Hyperparameter search: pure random sampling and an adaptive strategy
//! that seeds with random trials, then proposes candidates from
//! per-parameter kernel densities fit to the top-quantile trials and
//! keeps the candidate with the best good/bad density ratio.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gbdt::GBDTConfig;

/// Fraction of trials counted as "good" by the adaptive sampler.
const GOOD_QUANTILE: f64 = 0.25;
/// Candidates proposed per adaptive trial.
const N_CANDIDATES: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl ParamValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Int(v) => Some(*v as f64),
            ParamValue::Float(v) => Some(*v),
            ParamValue::Text(_) => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Float(v) => write!(f, "{v}"),
            ParamValue::Text(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamRange {
    /// Inclusive integer range.
    Int { lo: i64, hi: i64 },
    /// Half-open float range.
    Float { lo: f64, hi: f64 },
    /// Half-open float range sampled uniformly in log space.
    LogFloat { lo: f64, hi: f64 },
    Choice(Vec<ParamValue>),
}

impl ParamRange {
    fn validate(&self, name: &str) -> Result<()> {
        let bad = |msg: String| Err(Error::Tune(msg));
        match self {
            ParamRange::Int { lo, hi } => {
                if lo >= hi {
                    return bad(format!("{name}: int range needs lo < hi, got [{lo}, {hi}]"));
                }
            }
            ParamRange::Float { lo, hi } => {
                if !(lo < hi) {
                    return bad(format!("{name}: float range needs lo < hi, got [{lo}, {hi})"));
                }
            }
            ParamRange::LogFloat { lo, hi } => {
                if !(*lo > 0.0 && lo < hi) {
                    return bad(format!(
                        "{name}: log range needs 0 < lo < hi, got [{lo}, {hi})"
                    ));
                }
            }
            ParamRange::Choice(values) => {
                if values.is_empty() {
                    return bad(format!("{name}: choice list is empty"));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, value: &ParamValue) -> bool {
        match (self, value) {
            (ParamRange::Int { lo, hi }, ParamValue::Int(v)) => (lo..=hi).contains(&v),
            (ParamRange::Float { lo, hi }, ParamValue::Float(v))
            | (ParamRange::LogFloat { lo, hi }, ParamValue::Float(v)) => *v >= *lo && *v < *hi,
            (ParamRange::Choice(values), v) => values.contains(v),
            _ => false,
        }
    }
}

/// Ordered parameter list; sampling order follows definition order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchSpace {
    params: Vec<(String, ParamRange)>,
}

pub type Params = BTreeMap<String, ParamValue>;

impl SearchSpace {
    pub fn new() -> SearchSpace {
        SearchSpace::default()
    }

    pub fn add(mut self, name: &str, range: ParamRange) -> Result<SearchSpace> {
        range.validate(name)?;
        if self.params.iter().any(|(n, _)| n == name) {
            return Err(Error::Tune(format!("duplicate parameter `{name}`")));
        }
        self.params.push((name.to_string(), range));
        Ok(self)
    }

    pub fn params(&self) -> &[(String, ParamRange)] {
        &self.params
    }

    pub fn names(&self) -> Vec<&str> {
        self.params.iter().map(|(n, _)| n.as_str()).collect()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Params {
        self.params
            .iter()
            .map(|(name, range)| {
                let value = match range {
                    ParamRange::Int { lo, hi } => ParamValue::Int(rng.gen_range(*lo..=*hi)),
                    ParamRange::Float { lo, hi } => ParamValue::Float(rng.gen_range(*lo..*hi)),
                    ParamRange::LogFloat { lo, hi } => {
                        ParamValue::Float(rng.gen_range(lo.ln()..hi.ln()).exp())
                    }
                    ParamRange::Choice(values) => values[rng.gen_range(0..values.len())].clone(),
                };
                (name.clone(), value)
            })
            .collect()
    }
}

/// The six boosting parameters exposed for search.
pub fn default_space() -> SearchSpace {
    let entries = [
        ("n_estimators", ParamRange::Int { lo: 100, hi: 600 }),
        ("max_depth", ParamRange::Int { lo: 3, hi: 10 }),
        ("learning_rate", ParamRange::LogFloat { lo: 0.01, hi: 0.3 }),
        ("subsample", ParamRange::Float { lo: 0.5, hi: 1.0 }),
        ("colsample_bytree", ParamRange::Float { lo: 0.5, hi: 1.0 }),
        ("scale_pos_weight", ParamRange::Float { lo: 1.0, hi: 30.0 }),
    ];
    let mut space = SearchSpace::new();
    for (name, range) in entries {
        space = space.add(name, range).expect("default space is well-formed");
    }
    space
}

/// Overlay sampled parameters onto a booster config.
pub fn configure(params: &Params, base: &GBDTConfig) -> GBDTConfig {
    let mut cfg = base.clone();
    for (name, value) in params {
        match (name.as_str(), value) {
            ("n_estimators", ParamValue::Int(v)) => cfg.n_estimators = *v as usize,
            ("max_depth", ParamValue::Int(v)) => cfg.max_depth = *v as usize,
            ("max_leaves", ParamValue::Int(v)) => cfg.max_leaves = *v as usize,
            ("learning_rate", ParamValue::Float(v)) => cfg.learning_rate = *v,
            ("subsample", ParamValue::Float(v)) => cfg.subsample = *v,
            ("colsample_bytree", ParamValue::Float(v)) => cfg.colsample_bytree = *v,
            ("scale_pos_weight", ParamValue::Float(v)) => cfg.scale_pos_weight = *v,
            ("lambda", ParamValue::Float(v)) => cfg.lambda = *v,
            ("gamma", ParamValue::Float(v)) => cfg.gamma = *v,
            _ => log::warn!("ignoring unknown tuning parameter `{name}`"),
        }
    }
    cfg
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Random,
    Adaptive,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Strategy> {
        match s {
            "random" => Ok(Strategy::Random),
            "adaptive" => Ok(Strategy::Adaptive),
            other => Err(Error::Config(format!(
                "unknown strategy `{other}` (expected random|adaptive)"
            ))),
        }
    }
}

/// One completed (or failed) evaluation.
#[derive(Debug, Clone)]
pub struct Trial {
    pub index: usize,
    pub params: Params,
    /// Objective value; `-inf` for failed trials.
    pub score: f64,
    pub failed: bool,
}

/// Gaussian kernel density over observed values in a transformed
/// (possibly log) 1-d space.
struct Kde {
    points: Vec<f64>,
    bandwidth: f64,
}

impl Kde {
    fn fit(points: Vec<f64>, span: f64) -> Kde {
        let n = points.len().max(1) as f64;
        let mean = points.iter().sum::<f64>() / n;
        let var = points.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let silverman = 1.06 * var.sqrt() * n.powf(-0.2);
        let floor = (span / 100.0).max(1e-12);
        Kde {
            points,
            bandwidth: silverman.max(floor),
        }
    }

    fn density(&self, x: f64) -> f64 {
        let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * self.bandwidth);
        let mut total = 0.0;
        for &p in &self.points {
            let z = (x - p) / self.bandwidth;
            total += norm * (-0.5 * z * z).exp();
        }
        (total / self.points.len() as f64).max(1e-300)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let center = self.points[rng.gen_range(0..self.points.len())];
        // Box-Muller; two uniform draws per sample keeps the stream simple
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen::<f64>();
        let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        center + z * self.bandwidth
    }
}

/// Per-parameter transformed values of a trial subset.
fn numeric_values(trials: &[&Trial], name: &str, log_space: bool) -> Vec<f64> {
    trials
        .iter()
        .filter_map(|t| t.params.get(name).and_then(|v| v.as_f64()))
        .map(|v| if log_space { v.ln() } else { v })
        .collect()
}

struct AdaptiveProposal<'a> {
    space: &'a SearchSpace,
    good: Vec<&'a Trial>,
    bad: Vec<&'a Trial>,
}

impl AdaptiveProposal<'_> {
    /// Sample one candidate from the good-trial densities and score it by
    /// the summed log density ratio.
    fn propose(&self, rng: &mut ChaCha8Rng) -> (Params, f64) {
        let mut params = Params::new();
        let mut score = 0.0;
        for (name, range) in self.space.params() {
            match range {
                ParamRange::Choice(values) => {
                    let count = |trials: &[&Trial], v: &ParamValue| {
                        trials
                            .iter()
                            .filter(|t| t.params.get(name) == Some(v))
                            .count() as f64
                    };
                    // add-one smoothed categorical over the good trials
                    let weights: Vec<f64> = values
                        .iter()
                        .map(|v| count(&self.good, v) + 1.0)
                        .collect();
                    let total: f64 = weights.iter().sum();
                    let mut draw = rng.gen::<f64>() * total;
                    let mut picked = values.len() - 1;
                    for (i, w) in weights.iter().enumerate() {
                        if draw < *w {
                            picked = i;
                            break;
                        }
                        draw -= w;
                    }
                    let value = values[picked].clone();
                    let pg = weights[picked] / total;
                    let bad_total =
                        self.bad.len() as f64 + values.len() as f64;
                    let pb = (count(&self.bad, &value) + 1.0) / bad_total;
                    score += (pg / pb).ln();
                    params.insert(name.clone(), value);
                }
                ParamRange::Int { lo, hi } => {
                    let (value, ratio) = self.numeric(name, *lo as f64, (*hi + 1) as f64, false, rng);
                    let v = (value.round() as i64).clamp(*lo, *hi);
                    score += ratio;
                    params.insert(name.clone(), ParamValue::Int(v));
                }
                ParamRange::Float { lo, hi } => {
                    let (value, ratio) = self.numeric(name, *lo, *hi, false, rng);
                    let v = value.clamp(*lo, hi_open(*lo, *hi));
                    score += ratio;
                    params.insert(name.clone(), ParamValue::Float(v));
                }
                ParamRange::LogFloat { lo, hi } => {
                    let (value, ratio) = self.numeric(name, lo.ln(), hi.ln(), true, rng);
                    let v = value.exp().clamp(*lo, hi_open(*lo, *hi));
                    score += ratio;
                    params.insert(name.clone(), ParamValue::Float(v));
                }
            }
        }
        (params, score)
    }

    /// Returns (sampled transformed value, log density ratio at it).
    fn numeric(
        &self,
        name: &str,
        lo: f64,
        hi: f64,
        log_space: bool,
        rng: &mut ChaCha8Rng,
    ) -> (f64, f64) {
        let good_vals = numeric_values(&self.good, name, log_space);
        let bad_vals = numeric_values(&self.bad, name, log_space);
        let span = hi - lo;
        let good_kde = Kde::fit(good_vals, span);
        let sampled = good_kde.sample(rng).clamp(lo, hi);
        let ratio = if bad_vals.is_empty() {
            good_kde.density(sampled).ln()
        } else {
            let bad_kde = Kde::fit(bad_vals, span);
            good_kde.density(sampled).ln() - bad_kde.density(sampled).ln()
        };
        (sampled, ratio)
    }
}

/// Largest representable value strictly below `hi` for clamping into a
/// half-open range.
fn hi_open(lo: f64, hi: f64) -> f64 {
    let below = f64::from_bits(hi.to_bits() - 1);
    below.max(lo)
}

/// Run the search, maximizing the objective. A failing objective records
/// a `-inf` trial and the search continues. Returns the best parameters
/// (ties keep the lowest trial index) and the full trial log.
pub fn tune<F>(
    mut objective: F,
    space: &SearchSpace,
    n_trials: usize,
    strategy: Strategy,
    seed: u64,
) -> Result<(Params, Vec<Trial>)>
where
    F: FnMut(&Params) -> Result<f64>,
{
    if n_trials == 0 {
        return Err(Error::Tune("n_trials must be >= 1".into()));
    }
    if space.params().is_empty() {
        return Err(Error::Tune("search space is empty".into()));
    }

    let n_startup = (n_trials / 4).max(5);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trials: Vec<Trial> = Vec::with_capacity(n_trials);

    for index in 0..n_trials {
        let params = if strategy == Strategy::Random || index < n_startup {
            space.sample(&mut rng)
        } else {
            let mut ok: Vec<&Trial> = trials.iter().filter(|t| !t.failed).collect();
            if ok.len() < 2 {
                space.sample(&mut rng)
            } else {
                ok.sort_by(|a, b| {
                    b.score
                        .partial_cmp(&a.score)
                        .unwrap()
                        .then(a.index.cmp(&b.index))
                });
                let n_good = ((ok.len() as f64 * GOOD_QUANTILE).ceil() as usize)
                    .clamp(1, ok.len() - 1);
                let proposal = AdaptiveProposal {
                    space,
                    good: ok[..n_good].to_vec(),
                    bad: ok[n_good..].to_vec(),
                };
                let mut best: Option<(Params, f64)> = None;
                for _ in 0..N_CANDIDATES {
                    let (params, ratio) = proposal.propose(&mut rng);
                    match &best {
                        Some((_, prev)) if *prev >= ratio => {}
                        _ => best = Some((params, ratio)),
                    }
                }
                best.expect("at least one candidate").0
            }
        };

        let (score, failed) = match objective(&params) {
            Ok(s) if s.is_finite() => (s, false),
            Ok(s) => {
                log::warn!("trial {index} returned non-finite score {s}; recording as failed");
                (f64::NEG_INFINITY, true)
            }
            Err(e) => {
                log::warn!("trial {index} failed: {e}");
                (f64::NEG_INFINITY, true)
            }
        };
        trials.push(Trial {
            index,
            params,
            score,
            failed,
        });
    }

    let best = trials
        .iter()
        .filter(|t| !t.failed)
        .max_by(|a, b| {
            a.score
                .partial_cmp(&b.score)
                .unwrap()
                .then(b.index.cmp(&a.index))
        })
        .ok_or_else(|| Error::Tune("every trial failed".into()))?;
    Ok((best.params.clone(), trials))
}

/// Trial log as CSV: `trial,score,<param columns in space order>`.
pub fn trials_to_csv(trials: &[Trial], space: &SearchSpace) -> String {
    let mut out = String::from("trial,score");
    for (name, _) in space.params() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for t in trials {
        out.push_str(&format!("{},{}", t.index, t.score));
        for (name, _) in space.params() {
            out.push(',');
            if let Some(v) = t.params.get(name) {
                out.push_str(&v.to_string());
            }
        }
        out.push('\n');
    }
    out
}
