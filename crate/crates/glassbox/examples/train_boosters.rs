//! Train one booster per growth strategy on the same data and compare
//! their structure and held-out ranking quality.
//!
//! ```bash
//! cargo run --release --example train_boosters
//! ```

use glassbox::gbdt::{train_named, GBDTConfig, Growth};
use glassbox::metrics::roc_auc;
use glassbox::synth::make_classification;
use glassbox::Result;

fn main() -> Result<()> {
    let data = make_classification(8_000, 3);
    let split = 6_400;
    let train_idx: Vec<usize> = (0..split).collect();
    let test_idx: Vec<usize> = (split..data.x.n_rows()).collect();
    let x_train = data.x.select_rows(&train_idx);
    let y_train: Vec<u8> = train_idx.iter().map(|&i| data.y[i]).collect();
    let x_test = data.x.select_rows(&test_idx);
    let y_test: Vec<u8> = test_idx.iter().map(|&i| data.y[i]).collect();

    for growth in [Growth::DepthWise, Growth::LeafWise, Growth::Symmetric] {
        let cfg = GBDTConfig {
            n_estimators: 150,
            growth,
            max_leaves: 31,
            scale_pos_weight: 5.0,
            seed: 11,
            ..Default::default()
        };
        let model = train_named(&x_train, &y_train, &data.feature_names, &cfg)?;
        let scores = model.predict_proba_batch(&x_test)?;
        let (_, auc) = roc_auc(&y_test, &scores)?;
        let depths: Vec<usize> = model.trees.iter().map(|t| t.depth()).collect();
        let leaves: usize = model.trees.iter().map(|t| t.n_leaves()).sum();
        println!(
            "{growth:<10}  test auc {auc:.4}  max tree depth {}  total leaves {leaves}",
            depths.iter().max().unwrap(),
        );
    }
    Ok(())
}
