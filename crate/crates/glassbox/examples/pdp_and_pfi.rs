//! Global model behavior: partial dependence curves for the strongest
//! features and permutation importance over the whole stack.
//!
//! ```bash
//! cargo run --release --example pdp_and_pfi
//! ```

use glassbox::explain::{pdp, permutation_importance, PfiMetric};
use glassbox::pipeline::{default_base_configs, default_meta_config};
use glassbox::stacking::{train_stacking, StackingMode};
use glassbox::synth::make_classification;
use glassbox::Result;

fn main() -> Result<()> {
    let data = make_classification(3_000, 21);
    let mut base_cfgs = default_base_configs(5);
    for cfg in base_cfgs.iter_mut() {
        cfg.n_estimators = 60;
        cfg.scale_pos_weight = 6.0;
    }
    let (model, _) = train_stacking(
        &data.x,
        &data.y,
        &data.feature_names,
        &base_cfgs,
        &default_meta_config(5),
        StackingMode::OutOfFold { k: 3 },
        None,
        5,
    )?;

    let pfi = permutation_importance(
        &model,
        &data.x,
        &data.y,
        &data.feature_names,
        PfiMetric::Auc,
        5,
        9,
    )?;
    println!("permutation importance (auc drop), baseline auc {:.4}:", pfi.baseline);
    for entry in pfi.ranked() {
        let bar = "#".repeat((entry.mean_drop.max(0.0) * 200.0) as usize);
        println!("  {:<6} {:+.4} ± {:.4} {bar}", entry.feature, entry.mean_drop, entry.std);
    }

    println!("\npartial dependence of the top feature:");
    let top = &pfi.ranked()[0].feature;
    let idx = data.feature_names.iter().position(|n| n == top).unwrap();
    let curve = pdp(&model, &data.x, idx, top, 11)?;
    for (g, m) in curve.grid.iter().zip(&curve.mean_prediction) {
        let bar = "*".repeat((m * 120.0) as usize);
        println!("  {top} = {g:>8.3} -> mean proba {m:.4} {bar}");
    }
    Ok(())
}
