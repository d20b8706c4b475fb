//! Explicit imputation methods (mean, median, KNN, MICE, per-pattern MLP)
//! and the implicit zerofill/delete strategies.
//!
//! Every imputer leaves observed cells untouched and returns a complete
//! dataset; Delete instead drops incomplete rows and records the surviving
//! original indices.

mod knn;
mod mice;
mod mlp;
mod simple;

pub use knn::impute_knn;
pub use mice::impute_mice;
pub use mlp::impute_mlp;
pub use simple::{delete_incomplete, impute_simple, SimpleStrategy};

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ampute::AmputedDataset;
use crate::neural::TrainParams;
use crate::tabular::Dataset;

#[derive(Debug, Error)]
pub enum ImputeError {
    #[error("column {0} has no observed values")]
    AllMissingColumn(usize),
    #[error("no complete rows remain")]
    NoCompleteRows,
    #[error("no complete donor rows available")]
    NoDonors,
    #[error("least-squares system is singular even after ridge damping")]
    SingularSystem,
    #[error("no complete rows to train signature models on")]
    EmptyCompleteSet,
    #[error("invalid method parameter: {0}")]
    InvalidParam(String),
    #[error(transparent)]
    Neural(#[from] crate::neural::NeuralError),
    #[error(transparent)]
    Tabular(#[from] crate::tabular::TabularError),
}

/// An imputation method together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ImputationMethod {
    Mean,
    Median,
    Knn { k: usize },
    Mice { max_iter: usize, tol: f64 },
    MultipleMlp { hidden_layers: Vec<usize> },
    Zerofill,
    Delete,
}

impl ImputationMethod {
    pub fn validate(&self) -> Result<(), ImputeError> {
        match self {
            ImputationMethod::Knn { k } if *k == 0 => {
                Err(ImputeError::InvalidParam("knn needs k >= 1".into()))
            }
            ImputationMethod::Mice { max_iter, .. } if *max_iter == 0 => {
                Err(ImputeError::InvalidParam("mice needs max_iter >= 1".into()))
            }
            ImputationMethod::MultipleMlp { hidden_layers } if hidden_layers.is_empty() => {
                Err(ImputeError::InvalidParam("multiplemlp needs at least one hidden layer".into()))
            }
            ImputationMethod::MultipleMlp { hidden_layers } if hidden_layers.contains(&0) =>
            {
                Err(ImputeError::InvalidParam("hidden layer sizes must be >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Whether this is an explicit imputer (fills cells before modeling).
    pub fn is_explicit(&self) -> bool {
        !matches!(self, ImputationMethod::Zerofill | ImputationMethod::Delete)
    }
}

pub const DEFAULT_MICE_MAX_ITER: usize = 10;
pub const DEFAULT_MICE_TOL: f64 = 1e-4;

impl std::fmt::Display for ImputationMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ImputationMethod::Mean => write!(f, "mean"),
            ImputationMethod::Median => write!(f, "median"),
            ImputationMethod::Knn { k } => write!(f, "knn:{k}"),
            ImputationMethod::Mice { max_iter, tol } => {
                if *max_iter == DEFAULT_MICE_MAX_ITER && *tol == DEFAULT_MICE_TOL {
                    write!(f, "mice")
                } else {
                    write!(f, "mice:{max_iter}:{tol}")
                }
            }
            ImputationMethod::MultipleMlp { hidden_layers } => {
                let sizes: Vec<String> = hidden_layers.iter().map(|h| h.to_string()).collect();
                write!(f, "multiplemlp:{}", sizes.join("-"))
            }
            ImputationMethod::Zerofill => write!(f, "zerofill"),
            ImputationMethod::Delete => write!(f, "delete"),
        }
    }
}

/// Grammar: `mean | median | knn:K | mice[:MAX_ITER[:TOL]] |
/// multiplemlp:H1-H2-... | zerofill | delete`.
impl std::str::FromStr for ImputationMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let (head, rest) = match lower.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (lower.as_str(), None),
        };
        let method = match (head, rest) {
            ("mean", None) => ImputationMethod::Mean,
            ("median", None) => ImputationMethod::Median,
            ("knn", Some(k)) => ImputationMethod::Knn {
                k: k.parse().map_err(|_| format!("bad knn parameter {k:?}"))?,
            },
            ("knn", None) => return Err("knn needs a neighbor count, e.g. knn:5".into()),
            ("mice", None) => {
                ImputationMethod::Mice { max_iter: DEFAULT_MICE_MAX_ITER, tol: DEFAULT_MICE_TOL }
            }
            ("mice", Some(rest)) => {
                let mut parts = rest.split(':');
                let max_iter = parts
                    .next()
                    .unwrap()
                    .parse()
                    .map_err(|_| format!("bad mice max_iter in {s:?}"))?;
                let tol = match parts.next() {
                    Some(t) => t.parse().map_err(|_| format!("bad mice tol in {s:?}"))?,
                    None => DEFAULT_MICE_TOL,
                };
                ImputationMethod::Mice { max_iter, tol }
            }
            ("multiplemlp", Some(layers)) => {
                let hidden_layers: Result<Vec<usize>, _> =
                    layers.split('-').map(|p| p.parse::<usize>()).collect();
                ImputationMethod::MultipleMlp {
                    hidden_layers: hidden_layers
                        .map_err(|_| format!("bad multiplemlp layers {layers:?}"))?,
                }
            }
            ("multiplemlp", None) => {
                return Err("multiplemlp needs layer sizes, e.g. multiplemlp:32-16".into())
            }
            ("zerofill", None) => ImputationMethod::Zerofill,
            ("delete", None) => ImputationMethod::Delete,
            _ => return Err(format!("unknown imputation method {s:?}")),
        };
        method.validate().map_err(|e| e.to_string())?;
        Ok(method)
    }
}

impl Serialize for ImputationMethod {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ImputationMethod {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Options shared by the multivariate imputers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ImputeOptions {
    /// Allow the (always observed) target column as an imputer input. Off by
    /// default to avoid leaking the downstream label.
    pub use_target: bool,
}

/// Result of one imputation: a complete dataset plus bookkeeping.
#[derive(Debug, Clone)]
pub struct ImputationOutcome {
    pub data: Dataset,
    /// Original indices of surviving rows; identity except under Delete.
    pub kept_rows: Vec<usize>,
    pub method: ImputationMethod,
    pub fit_seconds: f64,
    pub warnings: Vec<String>,
}

impl ImputationOutcome {
    pub(crate) fn new(data: Dataset, method: ImputationMethod, started: Instant) -> Self {
        let kept_rows = (0..data.n_rows()).collect();
        Self { data, kept_rows, method, fit_seconds: started.elapsed().as_secs_f64(), warnings: Vec::new() }
    }
}

/// Dispatch a method. `train` is only consulted by `MultipleMlp`.
pub fn impute(
    amp: &AmputedDataset,
    method: &ImputationMethod,
    train: &TrainParams,
    opts: ImputeOptions,
) -> Result<ImputationOutcome, ImputeError> {
    method.validate()?;
    match method {
        ImputationMethod::Mean => impute_simple(amp, SimpleStrategy::Mean),
        ImputationMethod::Median => impute_simple(amp, SimpleStrategy::Median),
        ImputationMethod::Zerofill => impute_simple(amp, SimpleStrategy::Zerofill),
        ImputationMethod::Delete => delete_incomplete(amp),
        ImputationMethod::Knn { k } => impute_knn(amp, *k),
        ImputationMethod::Mice { max_iter, tol } => impute_mice(amp, *max_iter, *tol, opts),
        ImputationMethod::MultipleMlp { hidden_layers } => {
            impute_mlp(amp, hidden_layers, train, opts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_strings_round_trip() {
        for s in ["mean", "median", "knn:5", "mice", "mice:20:0.001", "multiplemlp:64-32", "zerofill", "delete"] {
            let m: ImputationMethod = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
    }

    #[test]
    fn bad_method_strings_rejected() {
        for s in ["knn", "knn:zero", "multiplemlp", "multiplemlp:a-b", "knn:0", "nonsense"] {
            assert!(s.parse::<ImputationMethod>().is_err(), "{s} should fail");
        }
    }
}
