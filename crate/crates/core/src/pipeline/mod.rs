//! Study orchestration: configuration, the five-step run loop
//! (prepare, simulate missingness, impute, score imputation, classify),
//! and result persistence.

mod config;
mod persist;
mod runner;

pub use config::{
    load_config, load_config_str, BlobsConfig, CsvConfig, DataConfig, MlpGridMode, ModelsConfig,
    SomTrainConfig, StudyConfig, TrainConfig,
};
pub use persist::{persist_results, RunManifest};
pub use runner::run_study;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ampute::{MissingMechanism, MissingPattern};
use crate::metrics::MetricReport;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config parse error: {0}")]
    ParseError(String),
    #[error("unknown config key: {0}")]
    UnknownKey(String),
    #[error("invalid config value: {0}")]
    InvalidValue(String),
    #[error("data source unavailable: {0}")]
    DataSourceUnavailable(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Ampute(#[from] crate::ampute::AmputeError),
    #[error(transparent)]
    Synth(#[from] crate::synth::SynthError),
    #[error(transparent)]
    Tabular(#[from] crate::tabular::TabularError),
}

/// How missingness is handled before the downstream models run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    /// Explicit imputation fills the cells first.
    Imputed,
    /// Missing cells become 0 in the model's normalized input space.
    Zerofill,
    /// Incomplete rows are dropped from training and evaluation.
    Delete,
    /// Unamputed data; the comparison baseline.
    Original,
}

impl StrategyKind {
    pub fn label(self) -> &'static str {
        match self {
            StrategyKind::Imputed => "imputed",
            StrategyKind::Zerofill => "zerofill",
            StrategyKind::Delete => "delete",
            StrategyKind::Original => "original",
        }
    }
}

/// One result row: a (case, method-or-strategy, model) combination for one
/// seed repetition. Baseline rows carry no amputation factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    /// Index into the amputation case grid; `None` for baseline rows.
    pub case_index: Option<usize>,
    pub seed: u64,
    /// Generator dispersion when the data came from the blob source.
    pub std_dev: Option<f64>,
    pub pattern: Option<MissingPattern>,
    pub mechanism: Option<MissingMechanism>,
    pub rate: Option<f64>,
    pub achieved_rate: Option<f64>,
    pub cell_rate: Option<f64>,
    pub strategy: StrategyKind,
    /// Canonical method label (`mean`, `knn:5`, ... or the strategy name).
    pub method: String,
    /// Model label (`mlp_7_4`, `som_289`), `None` when no model ran.
    pub model: Option<String>,
    pub imputation: Option<MetricReport>,
    pub mean_nrmse2: Option<f64>,
    pub mean_acc: Option<f64>,
    pub f1_macro: Option<f64>,
    /// Not persisted into results.csv so reruns stay byte-identical.
    pub wall_seconds: f64,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

impl CaseResult {
    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }
}
