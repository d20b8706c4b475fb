//! The run loop: for every seed repetition, prepare the data once, then walk
//! the amputation case grid, impute with every configured method, score the
//! imputed cells, and train/evaluate every configured classifier.
//!
//! Cases run in a work pool; every random stream derives from (master seed,
//! case index, method slot, model slot), so concurrency cannot change any
//! result.

use std::time::Instant;

use rayon::prelude::*;

use super::config::{DataSource, MlpGridMode, StudyConfig};
use super::{CaseResult, PipelineError, StrategyKind};
use crate::ampute::{
    achieved_missing_rate, ampute, build_filtered_matrix, cell_missing_rate, AmputationSpec,
    AmputedDataset,
};
use crate::impute::{delete_incomplete, impute, impute_simple, ImputeOptions, SimpleStrategy};
use crate::metrics::metric_report;
use crate::neural::{
    enumerate_mlp_topologies_with, mlp_topology, predict_classes, som_classify, train_mlp,
    train_som, BudgetClass, Matrix, MlpTopology, SizeClass, SomTopology, TaskKind, TrainParams,
};
use crate::seeded::derive_seed;
use crate::synth::generate_blobs;
use crate::tabular::{
    infer_schema, load_csv, normalize_value, Dataset, NormParams, SplitIndices,
};

const STREAM_SPLIT: u64 = 0xA11C;
const STREAM_CASES: u64 = 0xCA5E;
const STREAM_BASELINE: u64 = 0xBA5E;

#[derive(Debug, Clone)]
enum ModelSpec {
    Mlp(MlpTopology),
    Som(SomTopology),
}

impl ModelSpec {
    fn label(&self) -> String {
        match self {
            ModelSpec::Mlp(t) => t.label(),
            ModelSpec::Som(t) => t.label(),
        }
    }
}

struct Prepared {
    ds: Dataset,
    std_dev: Option<f64>,
    split: SplitIndices,
    feature_cols: Vec<usize>,
    target_col: usize,
    n_classes: usize,
    models: Vec<ModelSpec>,
}

fn prepare(config: &StudyConfig, master_seed: u64) -> Result<Prepared, PipelineError> {
    let default_blobs = super::config::BlobsConfig::default();
    let (ds, std_dev) = match config.source() {
        DataSource::Blobs(blobs) => {
            (generate_blobs(&blobs.to_spec(master_seed))?.0, Some(blobs.std_dev))
        }
        DataSource::Default => (
            generate_blobs(&default_blobs.to_spec(master_seed))?.0,
            Some(default_blobs.std_dev),
        ),
        DataSource::Csv(csv) => {
            if !std::path::Path::new(&csv.path).exists() {
                return Err(PipelineError::DataSourceUnavailable(csv.path.clone()));
            }
            let schema = infer_schema(&csv.path, csv.target.as_deref())?;
            (load_csv(&csv.path, &schema)?.0, None)
        }
    };
    let split = crate::tabular::split_dataset(
        &ds,
        (config.split[0], config.split[1], config.split[2]),
        derive_seed(master_seed, STREAM_SPLIT),
    )?;
    let target_col = ds.schema().target_index();
    let feature_cols = ds.schema().non_target_indices();
    let n_classes = ds
        .observed(target_col)
        .map(|v| v as usize)
        .max()
        .map(|m| m + 1)
        .ok_or_else(|| PipelineError::DataSourceUnavailable("empty dataset".into()))?;

    let mut models = Vec::new();
    match config.models.mlp {
        MlpGridMode::Full => {
            for t in enumerate_mlp_topologies_with(
                feature_cols.len(),
                n_classes,
                config.layer_count_semantics,
            ) {
                models.push(ModelSpec::Mlp(t));
            }
        }
        MlpGridMode::PerDepth => {
            for depth in [2usize, 3, 4] {
                if let Ok(t) =
                    mlp_topology(feature_cols.len(), n_classes, depth, BudgetClass::Medium)
                {
                    models.push(ModelSpec::Mlp(t));
                }
            }
        }
        MlpGridMode::Off => {}
    }
    if config.models.som {
        // sized once from the full train split so the label is stable across
        // strategies; delete simply trains the same map on fewer rows
        for class in SizeClass::ALL {
            models.push(ModelSpec::Som(SomTopology::from_data_size(
                feature_cols.len(),
                split.train.len(),
                class,
            )));
        }
    }
    Ok(Prepared { ds, std_dev, split, feature_cols, target_col, n_classes, models })
}

/// Feature matrix for the given rows: all columns min-max scaled; under
/// `zerofill_missing`, absent cells become 0 in the scaled space.
fn feature_matrix(
    ds: &Dataset,
    rows: &[usize],
    feature_cols: &[usize],
    scaler: &NormParams,
    zerofill_missing: bool,
) -> Matrix {
    let mut m = Matrix::zeros(rows.len(), feature_cols.len());
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in feature_cols.iter().enumerate() {
            let v = match ds.get(r, c) {
                Some(v) => normalize_value(scaler, c, v),
                None if zerofill_missing => 0.0,
                None => panic!("unexpected missing cell outside zerofill mode"),
            };
            m.set(i, j, v);
        }
    }
    m
}

fn labels_for(ds: &Dataset, rows: &[usize], target_col: usize) -> Vec<usize> {
    rows.iter().map(|&r| ds.get(r, target_col).expect("target complete") as usize).collect()
}

struct EvalData {
    train_x: Matrix,
    train_y: Vec<usize>,
    test_x: Matrix,
    test_y: Vec<usize>,
}

/// Build normalized train/test matrices. The scaler is fitted on the rows
/// handed to model training, matching the lazy-normalization rule.
fn eval_data(
    features_from: &Dataset,
    labels_from: &Dataset,
    train_rows: &[usize],
    test_rows: &[usize],
    feature_cols: &[usize],
    target_col: usize,
    zerofill_missing: bool,
) -> Result<EvalData, String> {
    if train_rows.is_empty() {
        return Err("no training rows survive".into());
    }
    if test_rows.is_empty() {
        return Err("no test rows survive".into());
    }
    let scaler = NormParams::fit_all_columns(&features_from.select_rows(train_rows));
    Ok(EvalData {
        train_x: feature_matrix(features_from, train_rows, feature_cols, &scaler, zerofill_missing),
        train_y: labels_for(labels_from, train_rows, target_col),
        test_x: feature_matrix(features_from, test_rows, feature_cols, &scaler, zerofill_missing),
        test_y: labels_for(labels_from, test_rows, target_col),
    })
}

fn eval_model(
    spec: &ModelSpec,
    data: &EvalData,
    n_classes: usize,
    config: &StudyConfig,
    seed: u64,
) -> Result<f64, String> {
    let predicted = match spec {
        ModelSpec::Mlp(topology) => {
            let params = TrainParams {
                epochs: config.train.epochs,
                batch_size: config.train.batch_size,
                learning_rate: config.train.learning_rate,
                seed,
                ..TrainParams::default()
            };
            let mut y = Matrix::zeros(data.train_y.len(), 1);
            for (i, &c) in data.train_y.iter().enumerate() {
                y.set(i, 0, c as f64);
            }
            let model = train_mlp(topology, TaskKind::Classification, &data.train_x, &y, &params)
                .map_err(|e| e.to_string())?;
            predict_classes(&model, &data.test_x).map_err(|e| e.to_string())?
        }
        ModelSpec::Som(topology) => {
            let params = TrainParams {
                epochs: config.som_train.epochs,
                batch_size: 1,
                learning_rate: config.som_train.learning_rate,
                seed,
                ..TrainParams::default()
            };
            let mut model =
                train_som(topology, &data.train_x, &params).map_err(|e| e.to_string())?;
            som_classify(&mut model, &data.train_x, &data.train_y, &data.test_x)
                .map_err(|e| e.to_string())?
        }
    };
    crate::metrics::f1_macro(&data.test_y, &predicted, n_classes).map_err(|e| e.to_string())
}

fn blank_row(
    case_index: Option<usize>,
    seed: u64,
    std_dev: Option<f64>,
    strategy: StrategyKind,
    method: String,
) -> CaseResult {
    CaseResult {
        case_index,
        seed,
        std_dev,
        pattern: None,
        mechanism: None,
        rate: None,
        achieved_rate: None,
        cell_rate: None,
        strategy,
        method,
        model: None,
        imputation: None,
        mean_nrmse2: None,
        mean_acc: None,
        f1_macro: None,
        wall_seconds: 0.0,
        warnings: Vec::new(),
        error: None,
    }
}

fn fill_case_fields(row: &mut CaseResult, amp: &AmputedDataset) {
    row.pattern = Some(amp.spec.pattern);
    row.mechanism = Some(amp.spec.mechanism);
    row.rate = Some(amp.spec.rate);
    row.achieved_rate = Some(achieved_missing_rate(&amp.mask));
    row.cell_rate = Some(cell_missing_rate(&amp.mask));
}

/// Expand a template into per-model rows (or keep the single row when no
/// models are configured).
#[allow(clippy::too_many_arguments)]
fn rows_for_models(
    template: CaseResult,
    prepared: &Prepared,
    config: &StudyConfig,
    features_from: &Dataset,
    zerofill_missing: bool,
    kept: Option<&[usize]>,
    slot_seed: u64,
    impute_seconds: f64,
) -> Vec<CaseResult> {
    if prepared.models.is_empty() {
        let mut row = template;
        row.wall_seconds = impute_seconds;
        return vec![row];
    }
    let (train_rows, test_rows) = match kept {
        None => (prepared.split.train.clone(), prepared.split.test.clone()),
        Some(kept_rows) => {
            let keep: std::collections::HashSet<usize> = kept_rows.iter().copied().collect();
            (
                prepared.split.train.iter().copied().filter(|r| keep.contains(r)).collect(),
                prepared.split.test.iter().copied().filter(|r| keep.contains(r)).collect(),
            )
        }
    };
    let data = eval_data(
        features_from,
        &prepared.ds,
        &train_rows,
        &test_rows,
        &prepared.feature_cols,
        prepared.target_col,
        zerofill_missing,
    );
    let mut rows = Vec::with_capacity(prepared.models.len());
    for (model_idx, spec) in prepared.models.iter().enumerate() {
        let mut row = template.clone();
        row.model = Some(spec.label());
        let started = Instant::now();
        match &data {
            Ok(d) => {
                let seed = derive_seed(slot_seed, model_idx as u64);
                match eval_model(spec, d, prepared.n_classes, config, seed) {
                    Ok(f1) => row.f1_macro = Some(f1),
                    Err(e) => row.error = Some(e),
                }
            }
            Err(e) => row.error = Some(e.clone()),
        }
        row.wall_seconds = impute_seconds + started.elapsed().as_secs_f64();
        rows.push(row);
    }
    rows
}

fn run_case(
    prepared: &Prepared,
    config: &StudyConfig,
    case_index: usize,
    spec: &AmputationSpec,
    master_seed: u64,
) -> Vec<CaseResult> {
    let blank = |strategy: StrategyKind, method: String| {
        blank_row(Some(case_index), master_seed, prepared.std_dev, strategy, method)
    };
    let amp = match ampute(&prepared.ds, spec) {
        Ok(a) => a,
        Err(e) => {
            let mut row = blank(StrategyKind::Imputed, "ampute".into());
            row.pattern = Some(spec.pattern);
            row.mechanism = Some(spec.mechanism);
            row.rate = Some(spec.rate);
            row.error = Some(e.to_string());
            return vec![row];
        }
    };
    let opts = ImputeOptions { use_target: config.use_target_in_imputation };
    let mut rows = Vec::new();
    let mut slot = 0u64;

    if config.strategies.contains(&StrategyKind::Imputed) {
        for method in &config.methods {
            let slot_seed = derive_seed(spec.seed, slot);
            slot += 1;
            let mut template = blank(StrategyKind::Imputed, method.to_string());
            fill_case_fields(&mut template, &amp);
            let started = Instant::now();
            let train = TrainParams {
                epochs: config.train.epochs,
                batch_size: config.train.batch_size,
                learning_rate: config.train.learning_rate,
                seed: slot_seed,
                ..TrainParams::default()
            };
            match impute(&amp, method, &train, opts) {
                Ok(outcome) => {
                    let impute_seconds = started.elapsed().as_secs_f64();
                    template.warnings = outcome.warnings.clone();
                    match metric_report(&prepared.ds, &outcome.data, &amp.mask) {
                        Ok(report) => {
                            template.mean_nrmse2 = report.mean_nrmse2();
                            template.mean_acc = report.mean_acc();
                            template.imputation = Some(report);
                        }
                        Err(e) => {
                            template.error = Some(e.to_string());
                            rows.push(template);
                            continue;
                        }
                    }
                    rows.extend(rows_for_models(
                        template,
                        prepared,
                        config,
                        &outcome.data,
                        false,
                        None,
                        slot_seed,
                        impute_seconds,
                    ));
                }
                Err(e) => {
                    template.error = Some(e.to_string());
                    rows.push(template);
                }
            }
        }
    }

    if config.strategies.contains(&StrategyKind::Zerofill) {
        let slot_seed = derive_seed(spec.seed, slot);
        slot += 1;
        let mut template = blank(StrategyKind::Zerofill, "zerofill".into());
        fill_case_fields(&mut template, &amp);
        let started = Instant::now();
        match impute_simple(&amp, SimpleStrategy::Zerofill) {
            Ok(outcome) => {
                let impute_seconds = started.elapsed().as_secs_f64();
                match metric_report(&prepared.ds, &outcome.data, &amp.mask) {
                    Ok(report) => {
                        template.mean_nrmse2 = report.mean_nrmse2();
                        template.mean_acc = report.mean_acc();
                        template.imputation = Some(report);
                        // models consume the masked data, zeros in scaled space
                        rows.extend(rows_for_models(
                            template,
                            prepared,
                            config,
                            &amp.data,
                            true,
                            None,
                            slot_seed,
                            impute_seconds,
                        ));
                    }
                    Err(e) => {
                        template.error = Some(e.to_string());
                        rows.push(template);
                    }
                }
            }
            Err(e) => {
                template.error = Some(e.to_string());
                rows.push(template);
            }
        }
    }

    if config.strategies.contains(&StrategyKind::Delete) && !prepared.models.is_empty() {
        let slot_seed = derive_seed(spec.seed, slot);
        let mut template = blank(StrategyKind::Delete, "delete".into());
        fill_case_fields(&mut template, &amp);
        let started = Instant::now();
        match delete_incomplete(&amp) {
            Ok(outcome) => {
                let impute_seconds = started.elapsed().as_secs_f64();
                rows.extend(rows_for_models(
                    template,
                    prepared,
                    config,
                    &prepared.ds,
                    false,
                    Some(&outcome.kept_rows),
                    slot_seed,
                    impute_seconds,
                ));
            }
            Err(e) => {
                template.error = Some(e.to_string());
                rows.push(template);
            }
        }
    }
    rows
}

/// Execute the full study. Results come back in a stable order (seed, then
/// baseline, then case-major) regardless of worker count.
pub fn run_study(config: &StudyConfig) -> Result<Vec<CaseResult>, PipelineError> {
    config.validate()?;
    let mut results = Vec::new();
    for &master_seed in &config.seeds {
        let prepared = prepare(config, master_seed)?;

        if config.strategies.contains(&StrategyKind::Original) && !prepared.models.is_empty() {
            let template =
                blank_row(None, master_seed, prepared.std_dev, StrategyKind::Original, "original".into());
            results.extend(rows_for_models(
                template,
                &prepared,
                config,
                &prepared.ds,
                false,
                None,
                derive_seed(master_seed, STREAM_BASELINE),
                0.0,
            ));
        }

        let cases = build_filtered_matrix(
            &config.patterns,
            &config.mechanisms,
            &config.rates,
            derive_seed(master_seed, STREAM_CASES),
        )?;
        let case_rows: Vec<Vec<CaseResult>> = cases
            .par_iter()
            .enumerate()
            .map(|(i, spec)| run_case(&prepared, config, i, spec, master_seed))
            .collect();
        for case in case_rows {
            results.extend(case);
        }
    }
    debug_assert!(
        results.iter().all(|r| r.is_error()
            || r.mean_nrmse2.is_some()
            || r.mean_acc.is_some()
            || r.f1_macro.is_some()),
        "non-error rows must carry at least one metric"
    );
    Ok(results)
}
