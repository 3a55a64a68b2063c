//! TreeSHAP attributions: rank features globally, explain one instance,
//! and cross-check the fast algorithm against exact Shapley enumeration.
//!
//! ```bash
//! cargo run --release --example shap_explain
//! ```

use glassbox::explain::{exact_shapley_oracle, shap_summary, select_top_k, tree_shap};
use glassbox::gbdt::{train_named, GBDTConfig};
use glassbox::synth::make_classification;
use glassbox::Result;

fn main() -> Result<()> {
    let data = make_classification(3_000, 9);
    let cfg = GBDTConfig {
        n_estimators: 60,
        max_depth: 4,
        scale_pos_weight: 8.0,
        seed: 2,
        ..Default::default()
    };
    let model = train_named(&data.x, &data.y, &data.feature_names, &cfg)?;

    println!("global ranking by mean |phi|:");
    let ranking = shap_summary(&model, &data.x)?;
    for (rank, (name, score)) in ranking.iter().enumerate() {
        println!("  {:>2}. {name:<6} {score:.4}", rank + 1);
    }
    let top = select_top_k(&ranking, 4)?;
    println!("top-4 selection: {top:?}\n");

    // one fraudulent instance, feature by feature
    let row_idx = data.y.iter().position(|&v| v == 1).expect("a positive row");
    let row = data.x.row(row_idx);
    let sv = tree_shap(&model, &row)?;
    println!("instance {row_idx} (fraud): margin = base {:.4} + contributions", sv.base_value);
    let mut order: Vec<usize> = (0..sv.phi.len()).collect();
    order.sort_by(|&a, &b| sv.phi[b].abs().partial_cmp(&sv.phi[a].abs()).unwrap());
    for j in order {
        println!("  {:<6} {:+.4}", sv.feature_names[j], sv.phi[j]);
    }
    println!(
        "  sum + base = {:.6}, model margin = {:.6}",
        sv.output(),
        model.predict_margin(&row)?
    );

    // the exponential oracle agrees on a model small enough to enumerate
    let small = make_classification(800, 10);
    let narrow = small.x.select_cols(&[0, 1, 2, 3, 4]);
    let small_model = train_named(
        &narrow,
        &small.y,
        &small.feature_names[..5].to_vec(),
        &GBDTConfig {
            n_estimators: 8,
            max_depth: 3,
            seed: 4,
            ..Default::default()
        },
    )?;
    let probe = narrow.row(17);
    let fast = tree_shap(&small_model, &probe)?;
    let exact = exact_shapley_oracle(&small_model, &probe)?;
    let max_diff = fast
        .phi
        .iter()
        .zip(&exact.phi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("\nTreeSHAP vs exact enumeration: max |difference| = {max_diff:.2e}");
    Ok(())
}
