//! Full pipeline in one process: generate the bundled synthetic dataset,
//! prepare it (join, impute, encode, split), train the stacking ensemble,
//! and print the held-out evaluation.
//!
//! ```bash
//! cargo run --release --example end_to_end
//! ```

use glassbox::pipeline::{cmd_evaluate, cmd_prepare, cmd_report, cmd_synth_data, cmd_train, RunConfig};
use glassbox::Result;

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let dir = tempfile::tempdir().expect("temp dir");
    let data_dir = dir.path().join("data");

    cmd_synth_data(&data_dir, 6_000, 7)?;
    let mut cfg = RunConfig::from_toml_file(&data_dir.join("config.toml"))?;
    // trimmed boosters keep this example quick; defaults work too
    cfg.base1.n_estimators = Some(120);
    cfg.base2.n_estimators = Some(120);
    cfg.base3.n_estimators = Some(120);

    cmd_prepare(&cfg)?;
    let outputs = cmd_train(&cfg)?;
    println!(
        "trained stack over {:?} at threshold {:.4}",
        outputs.selected_features, outputs.threshold
    );

    let report = cmd_evaluate(&outputs.model, &cfg.test_container(), &cfg.out_dir)?;
    println!(
        "held-out: accuracy {:.4}, auc_roc {:.4}, auc_pr {:.4}",
        report.accuracy, report.auc_roc, report.auc_pr
    );
    println!("\n{}", cmd_report(&cfg.out_dir)?);
    Ok(())
}
