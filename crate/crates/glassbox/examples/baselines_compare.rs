//! The comparison table: stacking ensemble vs a single decision tree vs
//! logistic regression, trained on the same nonlinear data.
//!
//! ```bash
//! cargo run --release --example baselines_compare
//! ```

use glassbox::baselines::{train_decision_tree, train_logreg};
use glassbox::explain::ProbModel;
use glassbox::metrics::roc_auc;
use glassbox::pipeline::{default_base_configs, default_meta_config};
use glassbox::stacking::{train_stacking, StackingMode};
use glassbox::synth::make_classification;
use glassbox::Result;

fn main() -> Result<()> {
    let data = make_classification(8_000, 17);
    let split = 6_400;
    let train_idx: Vec<usize> = (0..split).collect();
    let test_idx: Vec<usize> = (split..data.x.n_rows()).collect();
    let x_train = data.x.select_rows(&train_idx);
    let y_train: Vec<u8> = train_idx.iter().map(|&i| data.y[i]).collect();
    let x_test = data.x.select_rows(&test_idx);
    let y_test: Vec<u8> = test_idx.iter().map(|&i| data.y[i]).collect();

    let mut base_cfgs = default_base_configs(3);
    for cfg in base_cfgs.iter_mut() {
        cfg.n_estimators = 120;
        cfg.scale_pos_weight = 6.0;
    }
    let (stack, _) = train_stacking(
        &x_train,
        &y_train,
        &data.feature_names,
        &base_cfgs,
        &default_meta_config(3),
        StackingMode::OutOfFold { k: 4 },
        None,
        3,
    )?;

    let tree = train_decision_tree(&x_train, &y_train, &data.feature_names, 6)?;
    let logreg = train_logreg(&x_train, &y_train, &data.feature_names, 0.01, 300, 1e-6)?;

    let mut results = Vec::new();
    for (name, scores) in [
        ("stacking ensemble", stack.predict_proba(&x_test)?),
        ("decision tree", tree.predict_proba_batch(&x_test)?),
        ("logistic regression", logreg.predict_proba_batch(&x_test)?),
    ] {
        let (_, auc) = roc_auc(&y_test, &scores)?;
        results.push((name, auc));
    }
    println!("model                 held-out auc");
    for (name, auc) in &results {
        println!("{name:<21} {auc:.4}");
    }
    assert!(results[0].1 > results[1].1 && results[1].1 > results[2].1);
    println!("\nordering holds: stack > single tree > linear model");
    Ok(())
}
