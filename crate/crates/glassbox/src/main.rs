//! Thin command-line front end; all work happens in the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use glassbox::pipeline::{
    self, cmd_evaluate, cmd_explain, cmd_prepare, cmd_report, cmd_synth_data, cmd_train, cmd_tune,
    ExplainRequest, RunConfig,
};
use glassbox::tune::Strategy;
use glassbox::{Error, Result};

#[derive(Parser)]
#[command(
    name = "glassbox",
    about = "Explainable gradient-boosted fraud detection",
    version
)]
struct Cli {
    /// Run configuration file (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the config seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (results are identical for any value; 1 serializes)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Override the output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the bundled synthetic dataset and a starter config
    SynthData {
        /// Rows to generate
        #[arg(long, default_value_t = 10_000)]
        rows: usize,
        /// Output directory for the CSVs, schema, and config
        #[arg(long, default_value = "data")]
        dir: PathBuf,
    },
    /// Ingest, clean, encode, and split the raw CSVs
    Prepare {
        /// Apply SMOTE to all rows before the split (comparison mode)
        #[arg(long)]
        paper_faithful_order: bool,
        #[arg(long)]
        test_fraction: Option<f64>,
    },
    /// Feature selection, optional tuning, stacking fit, threshold fit
    Train {
        /// Skip tuning even if the config enables it
        #[arg(long)]
        skip_tune: bool,
        /// Threshold policy: f1_optimal or fixed:<v>
        #[arg(long)]
        threshold: Option<String>,
        /// Meta-features from in-sample base predictions (comparison mode)
        #[arg(long)]
        naive_stacking: bool,
        /// Disable SMOTE for this run
        #[arg(long)]
        no_smote: bool,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        smote_k: Option<usize>,
        #[arg(long)]
        smote_ratio: Option<f64>,
        #[arg(long)]
        select_k: Option<usize>,
    },
    /// Hyperparameter search over one model slot
    Tune {
        #[arg(long)]
        trials: Option<usize>,
        /// random or adaptive
        #[arg(long)]
        strategy: Option<String>,
        /// base1 | base2 | base3 | meta
        #[arg(long, default_value = "base1")]
        target: String,
    },
    /// Score a prepared dataset with a trained model and write reports
    Evaluate {
        /// Stacking model document (default: <out>/model.json)
        #[arg(long)]
        model: Option<PathBuf>,
        /// Prepared container (default: <out>/test.bin)
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Produce explanation artifacts
    Explain {
        /// Model document; shap needs a booster document
        /// (default: <out>/selection_model.json for shap, <out>/model.json otherwise)
        #[arg(long)]
        model: Option<PathBuf>,
        /// Prepared container (default: <out>/test.bin)
        #[arg(long)]
        data: Option<PathBuf>,
        /// shap | lime | pdp | pfi
        #[arg(long)]
        method: String,
        /// With shap: write the ranked summary instead of one row
        #[arg(long)]
        summary: bool,
        /// Row index for shap/lime
        #[arg(long)]
        row: Option<usize>,
        /// Feature name for pdp
        #[arg(long)]
        feature: Option<String>,
        /// Summary length for shap --summary
        #[arg(long, default_value_t = 30)]
        top_k: usize,
        /// Perturbation count for lime
        #[arg(long, default_value_t = 2000)]
        lime_samples: usize,
        /// Grid size for pdp
        #[arg(long, default_value_t = 20)]
        grid: usize,
        /// Shuffle repeats for pfi
        #[arg(long, default_value_t = 5)]
        repeats: usize,
    },
    /// Render metrics.json as a plain-text report
    Report,
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("this command needs --config <file>".into()))?;
    let mut cfg = RunConfig::from_toml_file(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli) -> Result<PathBuf> {
    if let Some(out) = &cli.out {
        return Ok(out.clone());
    }
    Ok(load_config(cli)?.out_dir)
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::SynthData { rows, dir } => {
            let seed = cli.seed.unwrap_or(7);
            cmd_synth_data(dir, *rows, seed)?;
            Ok(())
        }
        Command::Prepare {
            paper_faithful_order,
            test_fraction,
        } => {
            let mut cfg = load_config(&cli)?;
            cfg.paper_faithful_order |= paper_faithful_order;
            if let Some(f) = test_fraction {
                cfg.test_fraction = *f;
            }
            let paths = cmd_prepare(&cfg)?;
            println!(
                "wrote {}, {}, {}",
                paths.train.display(),
                paths.test.display(),
                paths.encoding_map.display()
            );
            Ok(())
        }
        Command::Train {
            skip_tune,
            threshold,
            naive_stacking,
            no_smote,
            folds,
            smote_k,
            smote_ratio,
            select_k,
        } => {
            let mut cfg = load_config(&cli)?;
            if *skip_tune {
                cfg.tune.enabled = false;
            }
            if let Some(t) = threshold {
                t.parse::<pipeline::ThresholdPolicy>()?;
                cfg.threshold = t.clone();
            }
            cfg.naive_stacking |= naive_stacking;
            if *no_smote {
                cfg.smote.enabled = false;
            }
            if let Some(k) = folds {
                cfg.folds = *k;
            }
            if let Some(k) = smote_k {
                cfg.smote.k_neighbors = *k;
            }
            if let Some(r) = smote_ratio {
                cfg.smote.target_ratio = *r;
            }
            if let Some(k) = select_k {
                cfg.select_k = *k;
            }
            cfg.validate()?;
            let outputs = cmd_train(&cfg)?;
            println!(
                "wrote {} (threshold {:.4}), {}, {}",
                outputs.model.display(),
                outputs.threshold,
                outputs.selection_model.display(),
                outputs.metrics.display()
            );
            Ok(())
        }
        Command::Tune {
            trials,
            strategy,
            target,
        } => {
            let cfg = load_config(&cli)?;
            let trials = trials.unwrap_or(cfg.tune.trials);
            let strategy: Strategy = strategy
                .clone()
                .unwrap_or_else(|| cfg.tune.strategy.clone())
                .parse()?;
            let (best, log_path) = cmd_tune(&cfg, trials, strategy, target)?;
            println!("wrote {}", log_path.display());
            for (name, value) in &best {
                println!("  {name} = {value}");
            }
            Ok(())
        }
        Command::Evaluate { model, data } => {
            let dir = out_dir(&cli)?;
            let model = model.clone().unwrap_or_else(|| dir.join("model.json"));
            let data = data.clone().unwrap_or_else(|| dir.join("test.bin"));
            let report = cmd_evaluate(&model, &data, &dir)?;
            println!(
                "accuracy {:.4}, auc_roc {:.4}, auc_pr {:.4} -> {}",
                report.accuracy,
                report.auc_roc,
                report.auc_pr,
                dir.join("metrics.json").display()
            );
            Ok(())
        }
        Command::Explain {
            model,
            data,
            method,
            summary,
            row,
            feature,
            top_k,
            lime_samples,
            grid,
            repeats,
        } => {
            let dir = out_dir(&cli)?;
            let seed = cli.seed.unwrap_or(0);
            let need_row = |row: &Option<usize>| -> Result<usize> {
                row.ok_or_else(|| Error::Config(format!("--method {method} needs --row <i>")))
            };
            let request = match method.as_str() {
                "shap" if *summary => ExplainRequest::ShapSummary { k: *top_k },
                "shap" => ExplainRequest::ShapRow {
                    row: need_row(row)?,
                },
                "lime" => ExplainRequest::Lime {
                    row: need_row(row)?,
                    n_samples: *lime_samples,
                },
                "pdp" => ExplainRequest::Pdp {
                    feature: feature
                        .clone()
                        .ok_or_else(|| Error::Config("--method pdp needs --feature <name>".into()))?,
                    n_grid: *grid,
                },
                "pfi" => ExplainRequest::Pfi {
                    n_repeats: *repeats,
                },
                other => {
                    return Err(Error::Config(format!(
                        "unknown method `{other}` (expected shap|lime|pdp|pfi)"
                    )))
                }
            };
            let default_model = if matches!(request, ExplainRequest::ShapSummary { .. } | ExplainRequest::ShapRow { .. })
            {
                dir.join("selection_model.json")
            } else {
                dir.join("model.json")
            };
            let model = model.clone().unwrap_or(default_model);
            let data = data.clone().unwrap_or_else(|| dir.join("test.bin"));
            let path = cmd_explain(&model, &data, &request, seed, &dir)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Report => {
            let dir = out_dir(&cli)?;
            let text = cmd_report(&dir)?;
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let jobs = cli.jobs;
    match pipeline::with_thread_pool(jobs, move || run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
