//! YAML study configuration. Every key has a default; the empty file
//! reproduces the reference grid of 4 patterns x 3 mechanisms x 5 rates.
//! Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{PipelineError, StrategyKind};
use crate::ampute::{MissingMechanism, MissingPattern, DEFAULT_RATES};
use crate::impute::ImputationMethod;
use crate::neural::LayerCountSemantics;
use crate::synth::BlobSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub data: DataConfig,
    pub rates: Vec<f64>,
    pub patterns: Vec<MissingPattern>,
    pub mechanisms: Vec<MissingMechanism>,
    pub methods: Vec<ImputationMethod>,
    pub strategies: Vec<StrategyKind>,
    pub models: ModelsConfig,
    pub train: TrainConfig,
    pub som_train: SomTrainConfig,
    pub split: [f64; 3],
    pub seeds: Vec<u64>,
    pub use_target_in_imputation: bool,
    pub layer_count_semantics: LayerCountSemantics,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            data: DataConfig::default(),
            rates: DEFAULT_RATES.to_vec(),
            patterns: MissingPattern::ALL.to_vec(),
            mechanisms: MissingMechanism::ALL.to_vec(),
            methods: vec![
                ImputationMethod::Mean,
                ImputationMethod::Median,
                ImputationMethod::Knn { k: 5 },
                ImputationMethod::Mice {
                    max_iter: crate::impute::DEFAULT_MICE_MAX_ITER,
                    tol: crate::impute::DEFAULT_MICE_TOL,
                },
                ImputationMethod::MultipleMlp { hidden_layers: vec![32, 16] },
            ],
            strategies: vec![
                StrategyKind::Imputed,
                StrategyKind::Zerofill,
                StrategyKind::Delete,
                StrategyKind::Original,
            ],
            models: ModelsConfig::default(),
            train: TrainConfig::default(),
            som_train: SomTrainConfig::default(),
            split: [0.8, 0.15, 0.05],
            seeds: vec![1, 2, 3],
            use_target_in_imputation: false,
            layer_count_semantics: LayerCountSemantics::Hidden,
        }
    }
}

/// Exactly one source: generated blobs or a CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub blobs: Option<BlobsConfig>,
    pub csv: Option<CsvConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlobsConfig {
    pub rows: usize,
    pub numeric_features: usize,
    pub categorical_features: usize,
    pub clusters: usize,
    pub std_dev: f64,
    /// One range shared by all features.
    pub range: [f64; 2],
    pub bins: usize,
}

impl Default for BlobsConfig {
    fn default() -> Self {
        Self {
            rows: 1000,
            numeric_features: 6,
            categorical_features: 0,
            clusters: 5,
            std_dev: 1.0,
            range: [0.0, 10.0],
            bins: 8,
        }
    }
}

impl BlobsConfig {
    pub fn to_spec(&self, seed: u64) -> BlobSpec {
        BlobSpec::uniform(
            self.rows,
            self.numeric_features,
            self.clusters,
            self.std_dev,
            (self.range[0], self.range[1]),
            seed,
        )
        .with_categorical(self.categorical_features, (self.range[0], self.range[1]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CsvConfig {
    pub path: String,
    /// Target column name; default: the last categorical column.
    pub target: Option<String>,
}

impl Default for CsvConfig {
    fn default() -> Self {
        Self { path: "data.csv".into(), target: None }
    }
}

/// Which classifier grids run on every case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelsConfig {
    pub mlp: MlpGridMode,
    pub som: bool,
}

impl Default for ModelsConfig {
    fn default() -> Self {
        Self { mlp: MlpGridMode::Full, som: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MlpGridMode {
    /// All nine depth x budget topologies.
    #[default]
    Full,
    /// One medium-budget topology per depth.
    PerDepth,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 200, batch_size: 32, learning_rate: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SomTrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for SomTrainConfig {
    fn default() -> Self {
        Self { epochs: 50, learning_rate: 0.5 }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let invalid = |msg: String| Err(PipelineError::InvalidValue(msg));
        for &r in &self.rates {
            if !(0.0 < r && r < 1.0) {
                return invalid(format!("rate {r} outside (0, 1)"));
            }
        }
        if self.rates.is_empty() {
            return invalid("rates must not be empty".into());
        }
        if self.patterns.is_empty() || self.mechanisms.is_empty() {
            return invalid("patterns and mechanisms must not be empty".into());
        }
        if self.seeds.is_empty() {
            return invalid("seeds must not be empty".into());
        }
        if self.strategies.is_empty() {
            return invalid("at least one strategy must be enabled".into());
        }
        if self.strategies.contains(&StrategyKind::Imputed) && self.methods.is_empty() {
            return invalid("the imputed strategy needs at least one method".into());
        }
        for m in &self.methods {
            if !m.is_explicit() {
                return invalid(format!(
                    "{m} is an implicit strategy; list it under `strategies`, not `methods`"
                ));
            }
            m.validate().map_err(|e| PipelineError::InvalidValue(e.to_string()))?;
        }
        if self.split.iter().any(|&f| f <= 0.0)
            || (self.split.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return invalid(format!("split fractions {:?} must be positive and sum to 1", self.split));
        }
        if self.train.epochs == 0 || self.train.batch_size == 0 || self.som_train.epochs == 0 {
            return invalid("training epochs and batch sizes must be >= 1".into());
        }
        if self.train.learning_rate.is_nan()
            || self.train.learning_rate <= 0.0
            || self.som_train.learning_rate.is_nan()
            || self.som_train.learning_rate <= 0.0
        {
            return invalid("learning rates must be > 0".into());
        }
        match (&self.data.blobs, &self.data.csv) {
            (Some(_), Some(_)) => {
                return invalid("configure either data.blobs or data.csv, not both".into())
            }
            (Some(b), None) => {
                if b.rows == 0
                    || b.clusters == 0
                    || b.std_dev.is_nan()
                    || b.std_dev <= 0.0
                    || b.range[0] >= b.range[1]
                {
                    return invalid("blob source needs rows/clusters >= 1, std_dev > 0, lo < hi".into());
                }
                if b.numeric_features + b.categorical_features < 2 {
                    return invalid("blob source needs at least two feature columns".into());
                }
            }
            _ => {}
        }
        let mut seen = std::collections::HashSet::new();
        for &s in &self.seeds {
            if !seen.insert(s) {
                return invalid(format!("duplicate seed {s}"));
            }
        }
        Ok(())
    }

    /// Effective data source: blobs by default.
    pub fn source(&self) -> DataSource<'_> {
        match (&self.data.blobs, &self.data.csv) {
            (None, Some(csv)) => DataSource::Csv(csv),
            (Some(blobs), None) => DataSource::Blobs(blobs),
            (None, None) => DataSource::Default,
            (Some(blobs), Some(_)) => DataSource::Blobs(blobs), // rejected by validate
        }
    }
}

pub enum DataSource<'a> {
    Blobs(&'a BlobsConfig),
    Csv(&'a CsvConfig),
    Default,
}

/// Parse a configuration from YAML text.
pub fn load_config_str(text: &str) -> Result<StudyConfig, PipelineError> {
    let config: StudyConfig = if text.trim().is_empty() {
        StudyConfig::default()
    } else {
        serde_yaml::from_str(text).map_err(|e| {
            let msg = e.to_string();
            if msg.contains("unknown field") {
                PipelineError::UnknownKey(msg)
            } else {
                PipelineError::ParseError(msg)
            }
        })?
    };
    config.validate()?;
    Ok(config)
}

/// Read and parse a YAML configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<StudyConfig, PipelineError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| PipelineError::Io { path: path.display().to_string(), source: e })?;
    load_config_str(&text)
}
