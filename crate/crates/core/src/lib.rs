//! Benchmarking toolkit for missing-value imputation on tabular data.
//!
//! The crate covers the full study loop: generate or load a complete dataset,
//! simulate missingness under controlled patterns/mechanisms/rates, impute
//! with statistical and neural methods, score imputation quality (NRMSE2 /
//! ACC on the imputed cells) and downstream classification quality
//! (F1-macro), and render missingness diagnostics as SVG.
//!
//! Modules map onto the study steps:
//!
//! - [`tabular`]: data model, CSV I/O, encoding, normalization, splitting
//! - [`synth`]: clustered Gaussian pseudo-data generation
//! - [`ampute`]: missing value simulation (pattern x mechanism x rate)
//! - [`impute`]: mean/median/KNN/MICE/per-pattern-MLP imputers plus the
//!   implicit zerofill and delete strategies
//! - [`neural`]: minimal MLP with backpropagation, self-organizing map, and
//!   the topology enumeration rules
//! - [`metrics`]: NRMSE2, categorical accuracy, F1-macro, factor aggregation
//! - [`pipeline`]: YAML-configured study runner with CSV/JSON persistence
//! - [`viz`]: aggregation plot, matrix plot and parallel boxplot renderers

pub mod ampute;
pub mod impute;
pub mod metrics;
pub mod neural;
pub mod pipeline;
pub mod seeded;
pub mod synth;
pub mod tabular;
pub mod viz;

pub use tabular::{ColumnKind, ColumnSchema, Dataset, EncodingMap, NormParams, Schema};
