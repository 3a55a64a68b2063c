//! Batch orchestration: the run configuration and the commands the
//! `glassbox` binary dispatches to. Every command is deterministic for a
//! fixed config and seed, and every failure is tagged with its stage.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;

use crate::container::{self, ContainerMeta};
use crate::data::{
    drop_columns, impute, label_encode, left_join, load_csv, sniff_header, stratified_split,
    Column, ColumnKind, Schema, SchemaSpec, Table,
};
use crate::error::{Error, Result};
use crate::explain::{
    default_kernel_width, exact_shapley_oracle, lime_explain, pdp, permutation_importance,
    select_top_k, shap_summary, tree_shap, PfiMetric, ProbModel,
};
use crate::gbdt::{model_from_json, model_to_json, train_named, GBDTConfig, GBDTModel, Growth};
use crate::matrix::Matrix;
use crate::metrics::{best_f1_threshold, evaluate, roc_auc, EvalReport};
use crate::resample::{stratified_kfold, SmoteConfig};
use crate::stacking::{train_stacking, StackingMode, StackingModel};
use crate::synth;
use crate::tune::{configure, default_space, trials_to_csv, tune, Strategy};

/// Decision-threshold policy for `train`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdPolicy {
    F1Optimal,
    Fixed(f64),
}

impl std::str::FromStr for ThresholdPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<ThresholdPolicy> {
        if s == "f1_optimal" || s == "f1" {
            return Ok(ThresholdPolicy::F1Optimal);
        }
        if let Some(v) = s.strip_prefix("fixed:") {
            let v: f64 = v
                .parse()
                .map_err(|_| Error::Config(format!("bad threshold value in `{s}`")))?;
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!(
                    "fixed threshold must be in (0,1), got {v}"
                )));
            }
            return Ok(ThresholdPolicy::Fixed(v));
        }
        Err(Error::Config(format!(
            "unknown threshold policy `{s}` (expected f1_optimal or fixed:<v>)"
        )))
    }
}

/// SMOTE block of the run configuration.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmoteSettings {
    pub enabled: bool,
    pub k_neighbors: usize,
    pub target_ratio: f64,
}

impl Default for SmoteSettings {
    fn default() -> Self {
        SmoteSettings {
            enabled: true,
            k_neighbors: 5,
            target_ratio: 1.0,
        }
    }
}

/// Tuning block of the run configuration.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TuneSettings {
    pub enabled: bool,
    pub trials: usize,
    pub strategy: String,
    pub target: String,
}

impl Default for TuneSettings {
    fn default() -> Self {
        TuneSettings {
            enabled: false,
            trials: 20,
            strategy: "adaptive".into(),
            target: "base1".into(),
        }
    }
}

/// Partial booster overrides from the config file; unset fields keep the
/// slot defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GBDTOverrides {
    pub n_estimators: Option<usize>,
    pub max_depth: Option<usize>,
    pub learning_rate: Option<f64>,
    pub subsample: Option<f64>,
    pub colsample_bytree: Option<f64>,
    pub scale_pos_weight: Option<f64>,
    pub max_leaves: Option<usize>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub n_bins: Option<usize>,
}

impl GBDTOverrides {
    fn apply(&self, mut cfg: GBDTConfig) -> GBDTConfig {
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            };
        }
        take!(n_estimators);
        take!(max_depth);
        take!(learning_rate);
        take!(subsample);
        take!(colsample_bytree);
        take!(scale_pos_weight);
        take!(max_leaves);
        take!(lambda);
        take!(gamma);
        take!(n_bins);
        cfg
    }
}

fn default_test_fraction() -> f64 {
    0.2
}
fn default_select_k() -> usize {
    30
}
fn default_folds() -> usize {
    5
}
fn default_threshold() -> String {
    "f1_optimal".into()
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

/// The run configuration, loaded from a TOML file. Relative paths are
/// resolved against the config file's directory. The seed is mandatory.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub transaction_csv: PathBuf,
    #[serde(default)]
    pub identity_csv: Option<PathBuf>,
    pub schema: PathBuf,
    pub seed: u64,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_select_k")]
    pub select_k: usize,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_threshold")]
    pub threshold: String,
    #[serde(default)]
    pub paper_faithful_order: bool,
    #[serde(default)]
    pub naive_stacking: bool,
    #[serde(default)]
    pub smote: SmoteSettings,
    #[serde(default)]
    pub tune: TuneSettings,
    #[serde(default)]
    pub base1: GBDTOverrides,
    #[serde(default)]
    pub base2: GBDTOverrides,
    #[serde(default)]
    pub base3: GBDTOverrides,
    #[serde(default)]
    pub meta: GBDTOverrides,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("run config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("run config {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, dir: &Path) {
        let anchor = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        anchor(&mut self.transaction_csv);
        if let Some(p) = self.identity_csv.as_mut() {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        anchor(&mut self.schema);
        anchor(&mut self.out_dir);
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test_fraction must be in (0,1), got {}",
                self.test_fraction
            )));
        }
        if self.folds < 2 {
            return Err(Error::Config(format!("folds must be >= 2, got {}", self.folds)));
        }
        self.threshold.parse::<ThresholdPolicy>()?;
        self.tune.strategy.parse::<Strategy>()?;
        if !matches!(self.tune.target.as_str(), "base1" | "base2" | "base3" | "meta") {
            return Err(Error::Config(format!(
                "tune target must be base1|base2|base3|meta, got `{}`",
                self.tune.target
            )));
        }
        Ok(())
    }

    pub fn threshold_policy(&self) -> ThresholdPolicy {
        self.threshold.parse().expect("validated at load")
    }

    pub fn smote_config(&self) -> Option<SmoteConfig> {
        self.smote.enabled.then(|| SmoteConfig {
            k_neighbors: self.smote.k_neighbors,
            target_ratio: self.smote.target_ratio,
            seed: self.seed,
        })
    }

    /// Base boosters: one per growth strategy, overrides applied.
    pub fn base_configs(&self) -> [GBDTConfig; 3] {
        let defaults = default_base_configs(self.seed);
        [
            self.base1.apply(defaults[0].clone()),
            self.base2.apply(defaults[1].clone()),
            self.base3.apply(defaults[2].clone()),
        ]
    }

    pub fn meta_config(&self) -> GBDTConfig {
        self.meta.apply(default_meta_config(self.seed))
    }

    // artifact paths
    pub fn train_container(&self) -> PathBuf {
        self.out_dir.join("train.bin")
    }
    pub fn test_container(&self) -> PathBuf {
        self.out_dir.join("test.bin")
    }
    pub fn encoding_map_path(&self) -> PathBuf {
        self.out_dir.join("encoding_map.json")
    }
    pub fn model_path(&self) -> PathBuf {
        self.out_dir.join("model.json")
    }
    pub fn selection_model_path(&self) -> PathBuf {
        self.out_dir.join("selection_model.json")
    }
}

/// One booster per growth strategy, conventional defaults.
pub fn default_base_configs(seed: u64) -> [GBDTConfig; 3] {
    let base = GBDTConfig {
        seed,
        ..Default::default()
    };
    [
        GBDTConfig {
            growth: Growth::DepthWise,
            ..base.clone()
        },
        GBDTConfig {
            growth: Growth::LeafWise,
            max_leaves: 31,
            ..base.clone()
        },
        GBDTConfig {
            growth: Growth::Symmetric,
            ..base
        },
    ]
}

/// Shallow meta booster over the three base probabilities.
pub fn default_meta_config(seed: u64) -> GBDTConfig {
    GBDTConfig {
        n_estimators: 50,
        max_depth: 2,
        learning_rate: 0.1,
        subsample: 1.0,
        colsample_bytree: 1.0,
        seed,
        ..Default::default()
    }
}

/// Run `f` on a rayon pool with `jobs` threads (None = default pool).
/// Results are thread-count independent; `jobs = 1` additionally
/// serializes execution.
pub fn with_thread_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool builds")
            .install(f),
        None => f(),
    }
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.at_stage(name))
}

/// Generate the bundled synthetic dataset plus a ready-to-edit run
/// config, so the full pipeline runs without any external data.
pub fn cmd_synth_data(out_dir: &Path, rows: usize, seed: u64) -> Result<synth::SynthFiles> {
    let files = stage("synth-data", synth::write_dataset(out_dir, rows, seed))?;
    let config_path = out_dir.join("config.toml");
    let config = format!(
        r#"transaction_csv = "synth_transactions.csv"
identity_csv = "synth_identity.csv"
schema = "schema.toml"
seed = {seed}
test_fraction = 0.2
out_dir = "out"
select_k = 30
folds = 5
threshold = "f1_optimal"

[smote]
enabled = true
k_neighbors = 5
target_ratio = 1.0

[tune]
enabled = false
trials = 20
strategy = "adaptive"
target = "base1"
"#
    );
    std::fs::write(&config_path, config).map_err(Error::Io)?;
    log::info!(
        "wrote {}, {}, {}, {}",
        files.transactions.display(),
        files.identity.display(),
        files.schema.display(),
        config_path.display()
    );
    Ok(files)
}

/// Artifacts produced by `prepare`.
pub struct PreparedPaths {
    pub train: PathBuf,
    pub test: PathBuf,
    pub encoding_map: PathBuf,
}

/// Rebuild a table from a numeric matrix plus labels (used after SMOTE in
/// paper-faithful order).
fn table_from_matrix(
    x: &Matrix,
    y: &[u8],
    feature_names: &[String],
    target_name: &str,
) -> Result<Table> {
    let mut schema_cols: Vec<(String, ColumnKind)> = feature_names
        .iter()
        .map(|n| (n.clone(), ColumnKind::Numeric))
        .collect();
    schema_cols.push((target_name.to_string(), ColumnKind::Target));
    let mut columns: Vec<Column> = (0..x.n_cols())
        .map(|j| Column::numeric(x.col(j).to_vec(), vec![false; x.n_rows()]))
        .collect();
    columns.push(Column::numeric(
        y.iter().map(|&v| f64::from(v)).collect(),
        vec![false; y.len()],
    ));
    Table::new(Schema::new(schema_cols)?, columns)
}

/// load -> join -> drop key -> impute -> encode -> split, then persist
/// both sides as binary containers plus the encoding map. With
/// `paper_faithful_order`, SMOTE runs on the full encoded table before
/// the split instead of inside training.
pub fn cmd_prepare(cfg: &RunConfig) -> Result<PreparedPaths> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let spec = stage("load", SchemaSpec::from_toml_file(&cfg.schema))?;

    let tx_schema = stage(
        "load",
        sniff_header(&cfg.transaction_csv).and_then(|h| spec.schema_for(&h)),
    )?;
    let mut table = stage(
        "load",
        load_csv(&cfg.transaction_csv, &tx_schema, &spec.na_tokens),
    )?;
    log::info!("loaded {} transaction rows", table.n_rows());

    match &cfg.identity_csv {
        Some(path) if path.exists() => {
            let id_schema = stage(
                "load",
                sniff_header(path).and_then(|h| spec.schema_for(&h)),
            )?;
            let id_table = stage("load", load_csv(path, &id_schema, &spec.na_tokens))?;
            let key = tx_schema.key_column().ok_or_else(|| {
                Error::Schema("joining requires a key_column in the schema".into())
                    .at_stage("join")
            })?;
            log::info!("joining {} identity rows on {key}", id_table.n_rows());
            table = stage("join", left_join(&table, &id_table, key))?;
        }
        Some(path) => {
            log::warn!(
                "identity file {} not found; continuing with transaction data only",
                path.display()
            );
        }
        None => {}
    }

    if let Some(key) = table.schema().key_column().map(String::from) {
        table = stage("drop", drop_columns(&table, &[key]))?;
    }
    let table = impute(&table);
    let (mut table, encoding_map) = stage("encode", label_encode(&table))?;

    let mut smote_applied = false;
    if cfg.paper_faithful_order {
        if let Some(smote_cfg) = cfg.smote_config() {
            let feature_names = table.feature_names();
            let target = table
                .schema()
                .target_column()
                .ok_or_else(|| Error::Data("no target column".into()).at_stage("resample"))?
                .to_string();
            let x = stage("resample", table.to_matrix(&feature_names))?;
            let y = stage("resample", table.labels())?;
            let (bx, by) = stage("resample", crate::resample::smote(&x, &y, &smote_cfg))?;
            log::info!(
                "paper-faithful order: rebalanced {} -> {} rows before the split",
                y.len(),
                by.len()
            );
            table = stage(
                "resample",
                table_from_matrix(&bx, &by, &feature_names, &target),
            )?;
            smote_applied = true;
        }
    }

    let (train, test) = stage(
        "split",
        stratified_split(&table, cfg.test_fraction, cfg.seed),
    )?;
    log::info!("split: {} train rows, {} test rows", train.n_rows(), test.n_rows());

    let meta = ContainerMeta {
        smote_applied,
        seed: cfg.seed,
        test_fraction: cfg.test_fraction,
    };
    let paths = PreparedPaths {
        train: cfg.train_container(),
        test: cfg.test_container(),
        encoding_map: cfg.encoding_map_path(),
    };
    stage("persist", container::write_table(&paths.train, &train, &meta))?;
    stage("persist", container::write_table(&paths.test, &test, &meta))?;
    std::fs::write(&paths.encoding_map, encoding_map.to_json())?;
    Ok(paths)
}

/// Mean k-fold validation AUC of a booster config on the training split;
/// the tuning objective.
fn cv_auc(
    x: &Matrix,
    y: &[u8],
    names: &[String],
    cfg: &GBDTConfig,
    folds: usize,
    smote_cfg: Option<&SmoteConfig>,
) -> Result<f64> {
    let assignment = stratified_kfold(y, folds, cfg.seed)?;
    let mut total = 0.0;
    for f in 0..folds {
        let train_idx = assignment.complement_rows(f);
        let val_idx = assignment.fold_rows(f);
        let x_tr = x.select_rows(&train_idx);
        let y_tr: Vec<u8> = train_idx.iter().map(|&i| y[i]).collect();
        let (x_fit, y_fit) = match smote_cfg {
            Some(s) => {
                let shifted = SmoteConfig {
                    seed: s.seed.wrapping_add(f as u64),
                    ..s.clone()
                };
                crate::resample::smote(&x_tr, &y_tr, &shifted)?
            }
            None => (x_tr, y_tr),
        };
        let model = train_named(&x_fit, &y_fit, names, cfg)?;
        let scores = model.predict_proba_batch(&x.select_rows(&val_idx))?;
        let y_val: Vec<u8> = val_idx.iter().map(|&i| y[i]).collect();
        total += roc_auc(&y_val, &scores)?.1;
    }
    Ok(total / folds as f64)
}

/// Artifacts produced by `train`.
pub struct TrainOutputs {
    pub model: PathBuf,
    pub selection_model: PathBuf,
    pub metrics: PathBuf,
    pub threshold: f64,
    pub selected_features: Vec<String>,
}

/// Feature selection -> optional tuning -> stacking fit -> threshold fit,
/// with the stack and the selection booster persisted.
pub fn cmd_train(cfg: &RunConfig) -> Result<TrainOutputs> {
    let started = Instant::now();
    let (train_table, meta) = stage("load", container::read_table(&cfg.train_container()))?;
    let feature_names = train_table.feature_names();
    let x_full = stage("load", train_table.to_matrix(&feature_names))?;
    let y = stage("load", train_table.labels())?;

    // SMOTE inside training is skipped when prepare already balanced
    let smote_cfg = if meta.smote_applied {
        log::info!("container was rebalanced at prepare time; skipping SMOTE in training");
        None
    } else {
        cfg.smote_config()
    };

    // feature selection: depth-wise booster on all features, ranked by
    // mean absolute attribution
    let base_cfgs = cfg.base_configs();
    let selection_model = stage("select", train_named(&x_full, &y, &feature_names, &base_cfgs[0]))?;
    let ranking = stage("select", shap_summary(&selection_model, &x_full))?;
    let k = cfg.select_k.min(ranking.len());
    if k < cfg.select_k {
        log::warn!(
            "select_k {} exceeds the {} available features; keeping all",
            cfg.select_k,
            ranking.len()
        );
    }
    let selected = stage("select", select_top_k(&ranking, k))?;
    log::info!("selected {} features: {:?}", selected.len(), selected);

    let col_idx: Vec<usize> = selected
        .iter()
        .map(|n| feature_names.iter().position(|f| f == n).expect("ranked name exists"))
        .collect();
    let x_sel = x_full.select_cols(&col_idx);

    // optional hyperparameter search on the chosen slot
    let mut base_cfgs = base_cfgs;
    let mut meta_cfg = cfg.meta_config();
    if cfg.tune.enabled {
        let strategy: Strategy = cfg.tune.strategy.parse()?;
        let space = default_space();
        let slot = cfg.tune.target.clone();
        log::info!("tuning {slot} for {} trials", cfg.tune.trials);
        let objective = |params: &crate::tune::Params| -> Result<f64> {
            match slot.as_str() {
                "base1" | "base2" | "base3" => {
                    let i = slot.as_bytes()[4] - b'1';
                    let candidate = configure(params, &base_cfgs[i as usize]);
                    cv_auc(&x_sel, &y, &selected, &candidate, cfg.folds, smote_cfg.as_ref())
                }
                _ => {
                    let candidate = configure(params, &meta_cfg);
                    stacked_cv_auc(
                        &x_sel,
                        &y,
                        &selected,
                        &base_cfgs,
                        &candidate,
                        cfg.folds,
                        smote_cfg.as_ref(),
                        cfg.seed,
                    )
                }
            }
        };
        let (best, trials) = stage(
            "tune",
            tune(objective, &space, cfg.tune.trials, strategy, cfg.seed),
        )?;
        std::fs::write(
            cfg.out_dir.join(format!("tune_{}.csv", cfg.tune.target)),
            trials_to_csv(&trials, &space),
        )?;
        match cfg.tune.target.as_str() {
            "base1" => base_cfgs[0] = configure(&best, &base_cfgs[0]),
            "base2" => base_cfgs[1] = configure(&best, &base_cfgs[1]),
            "base3" => base_cfgs[2] = configure(&best, &base_cfgs[2]),
            _ => meta_cfg = configure(&best, &meta_cfg),
        }
    }

    let mode = if cfg.naive_stacking {
        StackingMode::Naive
    } else {
        StackingMode::OutOfFold { k: cfg.folds }
    };
    let (mut model, report) = stage(
        "stack",
        train_stacking(
            &x_sel,
            &y,
            &selected,
            &base_cfgs,
            &meta_cfg,
            mode,
            smote_cfg.as_ref(),
            cfg.seed,
        ),
    )?;

    model.threshold = match cfg.threshold_policy() {
        ThresholdPolicy::Fixed(v) => v,
        ThresholdPolicy::F1Optimal => {
            let (t, f1) = stage(
                "threshold",
                best_f1_threshold(&report.meta_labels, &report.meta_scores),
            )?;
            log::info!("f1-optimal threshold {t:.4} (validation f1 {f1:.4})");
            t.clamp(1e-9, 1.0 - 1e-9)
        }
    };

    // validation-style metrics from the fold-held-out scores
    let report_metrics = stage(
        "metrics",
        evaluate(&report.meta_labels, &report.meta_scores, model.threshold),
    )?;

    let outputs = TrainOutputs {
        model: cfg.model_path(),
        selection_model: cfg.selection_model_path(),
        metrics: cfg.out_dir.join("metrics.json"),
        threshold: model.threshold,
        selected_features: selected,
    };
    std::fs::create_dir_all(&cfg.out_dir)?;
    std::fs::write(&outputs.model, model.to_json())?;
    std::fs::write(&outputs.selection_model, model_to_json(&selection_model))?;
    write_metrics_artifacts(&cfg.out_dir, &report_metrics)?;
    log::info!("training finished in {:.1}s", started.elapsed().as_secs_f64());
    Ok(outputs)
}

/// Meta-config tuning objective: k-fold CV where each fold trains a full
/// stack (inner out-of-fold k=3) and is scored on the held-out fold.
#[allow(clippy::too_many_arguments)]
fn stacked_cv_auc(
    x: &Matrix,
    y: &[u8],
    names: &[String],
    base_cfgs: &[GBDTConfig; 3],
    meta_cfg: &GBDTConfig,
    folds: usize,
    smote_cfg: Option<&SmoteConfig>,
    seed: u64,
) -> Result<f64> {
    let assignment = stratified_kfold(y, folds, seed)?;
    let mut total = 0.0;
    for f in 0..folds {
        let train_idx = assignment.complement_rows(f);
        let val_idx = assignment.fold_rows(f);
        let x_tr = x.select_rows(&train_idx);
        let y_tr: Vec<u8> = train_idx.iter().map(|&i| y[i]).collect();
        let (model, _) = train_stacking(
            &x_tr,
            &y_tr,
            names,
            base_cfgs,
            meta_cfg,
            StackingMode::OutOfFold { k: 3 },
            smote_cfg,
            seed.wrapping_add(f as u64),
        )?;
        let scores = model.predict_proba(&x.select_rows(&val_idx))?;
        let y_val: Vec<u8> = val_idx.iter().map(|&i| y[i]).collect();
        total += roc_auc(&y_val, &scores)?.1;
    }
    Ok(total / folds as f64)
}

fn float_csv_cell(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

/// metrics.json plus the three plot-ready CSVs.
pub fn write_metrics_artifacts(out_dir: &Path, report: &EvalReport) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(
        out_dir.join("metrics.json"),
        serde_json::to_string_pretty(report).expect("report serializes"),
    )?;

    let mut roc = String::from("fpr,tpr,threshold\n");
    for p in &report.roc_points {
        roc.push_str(&format!(
            "{},{},{}\n",
            float_csv_cell(p.fpr),
            float_csv_cell(p.tpr),
            float_csv_cell(p.threshold)
        ));
    }
    std::fs::write(out_dir.join("roc.csv"), roc)?;

    let mut pr = String::from("recall,precision,threshold\n");
    for p in &report.pr_points {
        pr.push_str(&format!(
            "{},{},{}\n",
            float_csv_cell(p.recall),
            float_csv_cell(p.precision),
            float_csv_cell(p.threshold)
        ));
    }
    std::fs::write(out_dir.join("pr.csv"), pr)?;

    let cm = &report.confusion;
    std::fs::write(
        out_dir.join("confusion.csv"),
        format!("tn,fp,fn,tp\n{},{},{},{}\n", cm.tn, cm.fp, cm.fn_, cm.tp),
    )?;
    Ok(())
}

/// Columns of `table` matching the model's selected features, in model
/// order; missing columns produce an explicit expected-vs-found diff.
fn matrix_for_model(table: &Table, selected: &[String]) -> Result<Matrix> {
    let available = table.feature_names();
    let missing: Vec<&String> = selected
        .iter()
        .filter(|n| !available.contains(n))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Data(format!(
            "feature mismatch: model expects {selected:?}; data is missing {missing:?} \
             (data has {available:?})"
        )));
    }
    table.to_matrix(selected)
}

/// Evaluate a persisted stack on a prepared container and write the
/// report artifacts.
pub fn cmd_evaluate(model_path: &Path, data_path: &Path, out_dir: &Path) -> Result<EvalReport> {
    let model = stage(
        "load",
        std::fs::read_to_string(model_path)
            .map_err(Error::Io)
            .and_then(|s| StackingModel::from_json(&s)),
    )?;
    let (table, _) = stage("load", container::read_table(data_path))?;
    let x = stage("evaluate", matrix_for_model(&table, &model.selected_features))?;
    let y = stage("evaluate", table.labels())?;
    let scores = stage("evaluate", model.predict_proba(&x))?;
    let report = stage("evaluate", evaluate(&y, &scores, model.threshold))?;
    stage("persist", write_metrics_artifacts(out_dir, &report))?;
    log::info!(
        "auc_roc {:.4}, auc_pr {:.4}, accuracy {:.4} at threshold {:.4}",
        report.auc_roc,
        report.auc_pr,
        report.accuracy,
        report.threshold_used
    );
    Ok(report)
}

/// Which explanation to produce.
#[derive(Debug, Clone)]
pub enum ExplainRequest {
    /// Ranked mean |SHAP| for the top `k` features -> shap_summary.csv
    ShapSummary { k: usize },
    /// Attributions for one row -> shap_values_<row>.json
    ShapRow { row: usize },
    /// Local surrogate for one row -> lime_<row>.json
    Lime { row: usize, n_samples: usize },
    /// Dependence curve for one feature -> pdp_<feature>.csv
    Pdp { feature: String, n_grid: usize },
    /// Permutation importance -> pfi.csv
    Pfi { n_repeats: usize },
}

enum AnyModel {
    Stack(StackingModel),
    Booster(GBDTModel),
}

impl AnyModel {
    fn load(path: &Path) -> Result<AnyModel> {
        let text = std::fs::read_to_string(path)?;
        if let Ok(stack) = StackingModel::from_json(&text) {
            return Ok(AnyModel::Stack(stack));
        }
        model_from_json(&text).map(AnyModel::Booster).map_err(|_| {
            Error::ModelFormat(format!(
                "{}: neither a stacking nor a booster document",
                path.display()
            ))
        })
    }

    fn feature_names(&self) -> &[String] {
        match self {
            AnyModel::Stack(m) => &m.selected_features,
            AnyModel::Booster(m) => &m.feature_names,
        }
    }

    fn prob_model(&self) -> &dyn ProbModel {
        match self {
            AnyModel::Stack(m) => m,
            AnyModel::Booster(m) => m,
        }
    }
}

/// Run one explanation against a persisted model and a prepared
/// container, writing the artifact and returning its path. TreeSHAP
/// requires a booster document (for the stack, explain the bundled
/// selection booster or use the model-agnostic methods).
pub fn cmd_explain(
    model_path: &Path,
    data_path: &Path,
    request: &ExplainRequest,
    seed: u64,
    out_dir: &Path,
) -> Result<PathBuf> {
    let model = stage("load", AnyModel::load(model_path))?;
    let (table, _) = stage("load", container::read_table(data_path))?;
    let x = stage("explain", matrix_for_model(&table, model.feature_names()))?;
    std::fs::create_dir_all(out_dir)?;

    let check_row = |row: usize| -> Result<()> {
        if row >= x.n_rows() {
            return Err(Error::Explain(format!(
                "row {row} out of range ({} rows)",
                x.n_rows()
            )));
        }
        Ok(())
    };

    let path = match request {
        ExplainRequest::ShapSummary { k } => {
            let booster = match &model {
                AnyModel::Booster(m) => m,
                AnyModel::Stack(_) => {
                    return Err(Error::Explain(
                        "TreeSHAP explains a single booster document; pass the selection \
                         model (selection_model.json) or use lime/pdp/pfi on the stack"
                            .into(),
                    ))
                }
            };
            let ranking = stage("explain", shap_summary(booster, &x))?;
            let k = (*k).min(ranking.len());
            let mut csv = String::from("feature,mean_abs_shap,rank\n");
            for (rank, (name, value)) in ranking.iter().take(k).enumerate() {
                csv.push_str(&format!("{name},{},{}\n", float_csv_cell(*value), rank + 1));
            }
            let path = out_dir.join("shap_summary.csv");
            std::fs::write(&path, csv)?;
            path
        }
        ExplainRequest::ShapRow { row } => {
            check_row(*row)?;
            let booster = match &model {
                AnyModel::Booster(m) => m,
                AnyModel::Stack(_) => {
                    return Err(Error::Explain(
                        "TreeSHAP explains a single booster document; pass the selection \
                         model (selection_model.json) or use lime/pdp/pfi on the stack"
                            .into(),
                    ))
                }
            };
            let values = stage("explain", tree_shap(booster, &x.row(*row)))?;
            // belt and braces on tiny models: verify against enumeration
            if booster.n_features() <= 6 {
                if let Ok(exact) = exact_shapley_oracle(booster, &x.row(*row)) {
                    debug_assert!(values
                        .phi
                        .iter()
                        .zip(&exact.phi)
                        .all(|(a, b)| (a - b).abs() < 1e-9));
                }
            }
            let path = out_dir.join(format!("shap_values_{row}.json"));
            std::fs::write(
                &path,
                serde_json::to_string_pretty(&values).expect("shap values serialize"),
            )?;
            path
        }
        ExplainRequest::Lime { row, n_samples } => {
            check_row(*row)?;
            let kernel_width = default_kernel_width(x.n_cols());
            let explanation = stage(
                "explain",
                lime_explain(
                    model.prob_model(),
                    &x.row(*row),
                    &x,
                    *n_samples,
                    kernel_width,
                    seed,
                ),
            )?;
            #[derive(serde::Serialize)]
            struct LimeDoc<'a> {
                row: usize,
                feature_names: &'a [String],
                #[serde(flatten)]
                explanation: &'a crate::explain::LimeExplanation,
            }
            let path = out_dir.join(format!("lime_{row}.json"));
            std::fs::write(
                &path,
                serde_json::to_string_pretty(&LimeDoc {
                    row: *row,
                    feature_names: model.feature_names(),
                    explanation: &explanation,
                })
                .expect("lime doc serializes"),
            )?;
            path
        }
        ExplainRequest::Pdp { feature, n_grid } => {
            let idx = model
                .feature_names()
                .iter()
                .position(|n| n == feature)
                .ok_or_else(|| {
                    Error::Explain(format!(
                        "feature `{feature}` not in the model (has {:?})",
                        model.feature_names()
                    ))
                })?;
            let curve = stage("explain", pdp(model.prob_model(), &x, idx, feature, *n_grid))?;
            let mut csv = String::from("grid_value,mean_proba\n");
            for (g, m) in curve.grid.iter().zip(&curve.mean_prediction) {
                csv.push_str(&format!("{},{}\n", float_csv_cell(*g), float_csv_cell(*m)));
            }
            let path = out_dir.join(format!("pdp_{feature}.csv"));
            std::fs::write(&path, csv)?;
            path
        }
        ExplainRequest::Pfi { n_repeats } => {
            let y = stage("explain", table.labels())?;
            let result = stage(
                "explain",
                permutation_importance(
                    model.prob_model(),
                    &x,
                    &y,
                    model.feature_names(),
                    PfiMetric::Auc,
                    *n_repeats,
                    seed,
                ),
            )?;
            let mut csv = String::from("feature,mean_drop,std\n");
            for e in result.ranked() {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    e.feature,
                    float_csv_cell(e.mean_drop),
                    float_csv_cell(e.std)
                ));
            }
            let path = out_dir.join("pfi.csv");
            std::fs::write(&path, csv)?;
            path
        }
    };
    Ok(path)
}

/// Standalone tuning run against the prepared training data; writes the
/// trial log and returns the best parameters.
pub fn cmd_tune(
    cfg: &RunConfig,
    trials: usize,
    strategy: Strategy,
    target: &str,
) -> Result<(crate::tune::Params, PathBuf)> {
    if !matches!(target, "base1" | "base2" | "base3" | "meta") {
        return Err(Error::Config(format!(
            "tune target must be base1|base2|base3|meta, got `{target}`"
        )));
    }
    let (train_table, meta) = stage("load", container::read_table(&cfg.train_container()))?;
    let feature_names = train_table.feature_names();
    let x = stage("load", train_table.to_matrix(&feature_names))?;
    let y = stage("load", train_table.labels())?;
    let smote_cfg = if meta.smote_applied { None } else { cfg.smote_config() };
    let base_cfgs = cfg.base_configs();
    let meta_cfg = cfg.meta_config();
    let space = default_space();

    let objective = |params: &crate::tune::Params| -> Result<f64> {
        match target {
            "base1" | "base2" | "base3" => {
                let i = (target.as_bytes()[4] - b'1') as usize;
                let candidate = configure(params, &base_cfgs[i]);
                cv_auc(&x, &y, &feature_names, &candidate, cfg.folds, smote_cfg.as_ref())
            }
            _ => {
                let candidate = configure(params, &meta_cfg);
                stacked_cv_auc(
                    &x,
                    &y,
                    &feature_names,
                    &base_cfgs,
                    &candidate,
                    cfg.folds,
                    smote_cfg.as_ref(),
                    cfg.seed,
                )
            }
        }
    };
    let (best, trials_log) = stage("tune", tune(objective, &space, trials, strategy, cfg.seed))?;
    std::fs::create_dir_all(&cfg.out_dir)?;
    let log_path = cfg.out_dir.join(format!("tune_{target}.csv"));
    std::fs::write(&log_path, trials_to_csv(&trials_log, &space))?;
    log::info!("best {target} parameters: {best:?}");
    Ok((best, log_path))
}

/// Render metrics.json as a plain-text classification report.
pub fn cmd_report(out_dir: &Path) -> Result<String> {
    let path = out_dir.join("metrics.json");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Io(e).at_stage("report"))?;
    let report: EvalReport = serde_json::from_str(&text)
        .map_err(|e| Error::ModelFormat(format!("{}: {e}", path.display())).at_stage("report"))?;

    let mut out = String::new();
    out.push_str("classification report\n");
    out.push_str("=====================\n");
    out.push_str(&format!("threshold        {:.4}\n\n", report.threshold_used));
    out.push_str("class      precision  recall     f1\n");
    out.push_str(&format!(
        "non-fraud  {:<10.4} {:<10.4} {:<10.4}\n",
        report.class0.precision, report.class0.recall, report.class0.f1
    ));
    out.push_str(&format!(
        "fraud      {:<10.4} {:<10.4} {:<10.4}\n",
        report.class1.precision, report.class1.recall, report.class1.f1
    ));
    out.push_str(&format!(
        "macro      {:<10.4} {:<10.4} {:<10.4}\n\n",
        report.macro_precision, report.macro_recall, report.macro_f1
    ));
    out.push_str(&format!("accuracy   {:.4}\n", report.accuracy));
    out.push_str(&format!("auc_roc    {:.4}\n", report.auc_roc));
    out.push_str(&format!("auc_pr     {:.4}\n\n", report.auc_pr));
    let cm = &report.confusion;
    out.push_str("confusion matrix (rows: actual, cols: predicted)\n");
    out.push_str(&format!("             non-fraud  fraud\n"));
    out.push_str(&format!("  non-fraud  {:<10} {}\n", cm.tn, cm.fp));
    out.push_str(&format!("  fraud      {:<10} {}\n", cm.fn_, cm.tp));

    std::fs::write(out_dir.join("report.txt"), &out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_policy_parses() {
        assert_eq!(
            "f1_optimal".parse::<ThresholdPolicy>().unwrap(),
            ThresholdPolicy::F1Optimal
        );
        assert_eq!(
            "fixed:0.44".parse::<ThresholdPolicy>().unwrap(),
            ThresholdPolicy::Fixed(0.44)
        );
        assert!("fixed:1.5".parse::<ThresholdPolicy>().is_err());
        assert!("nonsense".parse::<ThresholdPolicy>().is_err());
    }

    #[test]
    fn run_config_requires_seed_and_validates() {
        let minimal = r#"
transaction_csv = "tx.csv"
schema = "schema.toml"
seed = 5
"#;
        let cfg = RunConfig::from_toml_str(minimal).unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.test_fraction, 0.2);
        assert_eq!(cfg.select_k, 30);
        assert_eq!(cfg.folds, 5);
        assert!(cfg.smote.enabled);

        let no_seed = r#"
transaction_csv = "tx.csv"
schema = "schema.toml"
"#;
        assert!(RunConfig::from_toml_str(no_seed).is_err());

        let bad_fraction = r#"
transaction_csv = "tx.csv"
schema = "schema.toml"
seed = 1
test_fraction = 1.5
"#;
        assert!(RunConfig::from_toml_str(bad_fraction).is_err());
    }

    #[test]
    fn overrides_apply_over_slot_defaults() {
        let text = r#"
transaction_csv = "tx.csv"
schema = "schema.toml"
seed = 3

[base2]
n_estimators = 42
learning_rate = 0.05
"#;
        let cfg = RunConfig::from_toml_str(text).unwrap();
        let bases = cfg.base_configs();
        assert_eq!(bases[0].n_estimators, 300);
        assert_eq!(bases[1].n_estimators, 42);
        assert_eq!(bases[1].learning_rate, 0.05);
        assert_eq!(bases[1].growth, Growth::LeafWise);
        assert_eq!(bases[2].growth, Growth::Symmetric);
        assert_eq!(cfg.meta_config().max_depth, 2);
        assert_eq!(cfg.meta_config().n_estimators, 50);
    }
}
