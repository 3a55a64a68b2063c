//! Hyperparameter search over the six boosting parameters: random
//! sampling vs the adaptive density-ratio strategy, on a 3-fold CV AUC
//! objective.
//!
//! ```bash
//! cargo run --release --example tune_search
//! ```

use glassbox::gbdt::train_named;
use glassbox::metrics::roc_auc;
use glassbox::pipeline::default_base_configs;
use glassbox::resample::stratified_kfold;
use glassbox::synth::make_classification;
use glassbox::tune::{configure, default_space, trials_to_csv, tune, Params, Strategy};
use glassbox::Result;

fn main() -> Result<()> {
    let data = make_classification(1_500, 31);
    let folds = stratified_kfold(&data.y, 3, 0)?;
    let slot = default_base_configs(0)[0].clone();

    let objective = |params: &Params| -> Result<f64> {
        let mut cfg = configure(params, &slot);
        cfg.n_estimators = cfg.n_estimators.min(120); // keep the demo quick
        let mut total = 0.0;
        for f in 0..folds.k {
            let tr = folds.complement_rows(f);
            let va = folds.fold_rows(f);
            let model = train_named(
                &data.x.select_rows(&tr),
                &tr.iter().map(|&i| data.y[i]).collect::<Vec<_>>(),
                &data.feature_names,
                &cfg,
            )?;
            let scores = model.predict_proba_batch(&data.x.select_rows(&va))?;
            let y_va: Vec<u8> = va.iter().map(|&i| data.y[i]).collect();
            total += roc_auc(&y_va, &scores)?.1;
        }
        Ok(total / folds.k as f64)
    };

    let space = default_space();
    for strategy in [Strategy::Random, Strategy::Adaptive] {
        let (best, trials) = tune(objective, &space, 16, strategy, 7)?;
        let best_score = trials
            .iter()
            .map(|t| t.score)
            .fold(f64::NEG_INFINITY, f64::max);
        println!("{strategy:?}: best cv auc {best_score:.4} with");
        for (name, value) in &best {
            println!("  {name} = {value}");
        }
        if strategy == Strategy::Adaptive {
            println!("\ntrial log (csv):\n{}", trials_to_csv(&trials, &space));
        }
    }
    Ok(())
}
