//! Bundled synthetic dataset: an imbalanced binary-classification problem
//! (3.5% positive rate) whose positives form two antipodal Gaussian
//! clusters in four informative dimensions, padded with noise features.
//! The antipodal layout makes the signal deliberately nonlinear: linear
//! models see almost nothing, trees see a lot.
//!
//! Two forms: an in-memory matrix for tests and experiments, and a pair
//! of CSV files (transactions + identity, linked by `TransactionID`) with
//! injected missing cells that exercises the full ingestion pipeline.

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const POSITIVE_RATE: f64 = 0.035;

const INFORMATIVE: usize = 4;
const NOISE: usize = 6;
/// Cluster center magnitude along each informative axis.
const CLUSTER_SHIFT: f64 = 1.6;
/// Within-cluster standard deviation.
const CLUSTER_SD: f64 = 0.8;
/// Small linear nudge on f0 so a linear model is better than chance.
const LINEAR_NUDGE: f64 = 0.4;

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// In-memory form of the synthetic problem.
pub struct SynthDataset {
    pub x: Matrix,
    pub y: Vec<u8>,
    pub feature_names: Vec<String>,
}

/// Sign pattern for the first cluster; the second cluster is its mirror.
const SIGNS: [f64; INFORMATIVE] = [1.0, 1.0, -1.0, 1.0];

fn informative_row(rng: &mut ChaCha8Rng, positive: bool) -> Vec<f64> {
    let mut row = Vec::with_capacity(INFORMATIVE + NOISE);
    if positive {
        let mirror = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        for s in SIGNS {
            row.push(mirror * s * CLUSTER_SHIFT + CLUSTER_SD * normal(rng));
        }
        row[0] += LINEAR_NUDGE;
    } else {
        for _ in 0..INFORMATIVE {
            row.push(normal(rng));
        }
    }
    for _ in 0..NOISE {
        row.push(normal(rng));
    }
    row
}

/// Generate `n` rows with a 3.5% positive rate. Deterministic per seed.
pub fn make_classification(n: usize, seed: u64) -> SynthDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let positive = rng.gen::<f64>() < POSITIVE_RATE;
        rows.push(informative_row(&mut rng, positive));
        y.push(u8::from(positive));
    }
    let feature_names = (0..INFORMATIVE)
        .map(|j| format!("f{j}"))
        .chain((0..NOISE).map(|j| format!("n{j}")))
        .collect();
    SynthDataset {
        x: Matrix::from_rows(&rows).expect("generated rows are rectangular"),
        y,
        feature_names,
    }
}

/// Files written by [`write_dataset`].
pub struct SynthFiles {
    pub transactions: PathBuf,
    pub identity: PathBuf,
    pub schema: PathBuf,
}

/// Write the CSV form: a transaction table (key, amount, informative and
/// noise features, a categorical, the label), an identity table covering
/// ~70% of transactions with one extra informative column, and a matching
/// schema file. A few percent of cells are blanked to exercise
/// imputation.
pub fn write_dataset(dir: &Path, n: usize, seed: u64) -> Result<SynthFiles> {
    std::fs::create_dir_all(dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let transactions = dir.join("synth_transactions.csv");
    let identity = dir.join("synth_identity.csv");
    let schema = dir.join("schema.toml");

    let cat_levels = ["A", "B", "C", "D", "E"];
    let mut tx = std::io::BufWriter::new(std::fs::File::create(&transactions)?);
    let mut id = std::io::BufWriter::new(std::fs::File::create(&identity)?);
    writeln!(
        tx,
        "TransactionID,TransactionAmt,f0,f1,f2,f3,n0,n1,n2,n3,cat1,isFraud"
    )?;
    writeln!(id, "TransactionID,g0,g1,DeviceType")?;

    for i in 0..n {
        let positive = rng.gen::<f64>() < POSITIVE_RATE;
        let row = informative_row(&mut rng, positive);
        let key = 1_000_000 + i;

        // right-skewed amount, mildly higher for positives
        let amt = (3.0 + 0.2 * f64::from(positive as u8) + normal(&mut rng)).exp();
        let amt_cell = if rng.gen::<f64>() < 0.02 {
            String::new()
        } else {
            format!("{amt:.2}")
        };
        let f2_cell = if rng.gen::<f64>() < 0.05 {
            String::new()
        } else {
            format!("{}", row[2])
        };
        // categorical leans toward the last levels for positives
        let cat_cell = if rng.gen::<f64>() < 0.04 {
            String::new()
        } else {
            let idx = if positive {
                rng.gen_range(0..cat_levels.len().min(3)) + 2
            } else {
                rng.gen_range(0..cat_levels.len())
            };
            cat_levels[idx.min(cat_levels.len() - 1)].to_string()
        };
        writeln!(
            tx,
            "{key},{amt_cell},{},{},{f2_cell},{},{},{},{},{},{cat_cell},{}",
            row[0],
            row[1],
            row[3],
            row[4],
            row[5],
            row[6],
            row[7],
            u8::from(positive)
        )?;

        // ~70% of transactions carry an identity record
        if rng.gen::<f64>() < 0.7 {
            let g0 = normal(&mut rng) + if positive { 0.8 } else { 0.0 };
            let g1 = normal(&mut rng);
            let device = if rng.gen::<f64>() < 0.06 {
                String::new()
            } else if rng.gen::<bool>() {
                "mobile".to_string()
            } else {
                "desktop".to_string()
            };
            writeln!(id, "{key},{g0},{g1},{device}")?;
        }
    }
    tx.flush()?;
    id.flush()?;

    std::fs::write(
        &schema,
        r#"key_column = "TransactionID"
target_column = "isFraud"
categorical = ["cat1", "DeviceType"]
na_tokens = ["", "NaN", "NA"]
"#,
    )
    .map_err(Error::Io)?;

    Ok(SynthFiles {
        transactions,
        identity,
        schema,
    })
}
