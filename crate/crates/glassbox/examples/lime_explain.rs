//! LIME: fit a weighted local linear surrogate around one stacked-model
//! prediction and read off which features push toward or away from fraud.
//!
//! ```bash
//! cargo run --release --example lime_explain
//! ```

use glassbox::explain::{default_kernel_width, lime_explain};
use glassbox::gbdt::{GBDTConfig, Growth};
use glassbox::pipeline::{default_base_configs, default_meta_config};
use glassbox::stacking::{train_stacking, StackingMode};
use glassbox::synth::make_classification;
use glassbox::Result;

fn main() -> Result<()> {
    let data = make_classification(4_000, 13);
    let mut base_cfgs = default_base_configs(1);
    for cfg in base_cfgs.iter_mut() {
        cfg.n_estimators = 80;
        cfg.scale_pos_weight = 6.0;
    }
    let _ = Growth::DepthWise; // slots come growth-assigned from defaults
    let meta_cfg: GBDTConfig = default_meta_config(1);
    let (model, _) = train_stacking(
        &data.x,
        &data.y,
        &data.feature_names,
        &base_cfgs,
        &meta_cfg,
        StackingMode::OutOfFold { k: 4 },
        None,
        1,
    )?;

    let row_idx = data.y.iter().position(|&v| v == 1).expect("a positive row");
    let row = data.x.row(row_idx);
    let kernel_width = default_kernel_width(data.x.n_cols());
    let explanation = lime_explain(&model, &row, &data.x, 3_000, kernel_width, 42)?;

    println!(
        "instance {row_idx}: predicted fraud probability {:.4}",
        explanation.predicted_proba
    );
    println!(
        "local surrogate fit r2 = {:.3}, intercept = {:.4}",
        explanation.local_r2, explanation.intercept
    );
    println!("standardized local coefficients (positive pushes toward fraud):");
    let mut order: Vec<usize> = (0..explanation.weights.len()).collect();
    order.sort_by(|&a, &b| {
        explanation.weights[b]
            .abs()
            .partial_cmp(&explanation.weights[a].abs())
            .unwrap()
    });
    for j in order {
        println!("  {:<6} {:+.4}", data.feature_names[j], explanation.weights[j]);
    }
    Ok(())
}
