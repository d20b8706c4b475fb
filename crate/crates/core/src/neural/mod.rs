//! Minimal neural core: a feed-forward MLP trained with backpropagation, a
//! self-organizing map, and the topology enumeration rules that size them.
//!
//! Everything is plain `f64` on flat buffers, single-threaded and seeded, so
//! trained models are bit-reproducible.

mod mlp;
mod som;
mod topology;

pub use mlp::{predict_classes, predict_mlp, train_mlp, LayerGrads, MlpModel};
pub use som::{som_classify, train_som, SomModel};
pub use topology::{
    enumerate_mlp_topologies, enumerate_mlp_topologies_with, mlp_topology, som_dimensions,
    som_edge_length, BudgetClass, LayerCountSemantics, MlpTopology, SizeClass, SomTopology,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("hidden budget {budget} cannot give {depth} layers at least one neuron each")]
    BudgetTooSmall { budget: usize, depth: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("empty input")]
    EmptyInput,
    #[error("model has not been trained")]
    UntrainedModel,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

/// Training budget shared by the MLP and SOM trainers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// MLP training restarts from derived seeds; the lowest-training-loss
    /// model wins. Ignored by the SOM trainer.
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

fn default_restarts() -> usize {
    3
}

impl Default for TrainParams {
    fn default() -> Self {
        Self { epochs: 200, batch_size: 32, learning_rate: 0.05, seed: 0, restarts: 3 }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<(), NeuralError> {
        if self.epochs == 0 || self.batch_size == 0 || self.restarts == 0 {
            return Err(NeuralError::InvalidParam(
                "epochs, batch_size and restarts must be >= 1".into(),
            ));
        }
        if self.learning_rate.is_nan() || self.learning_rate < 0.0 {
            return Err(NeuralError::InvalidParam("learning_rate must be >= 0".into()));
        }
        Ok(())
    }
}

/// Output head of an MLP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    /// Identity head trained on mean squared error.
    Regression,
    /// Softmax head trained on cross-entropy; targets are class codes.
    Classification,
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, NeuralError> {
        if data.len() != rows * cols {
            return Err(NeuralError::ShapeMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, NeuralError> {
        let n = rows.len();
        let k = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != k) {
            return Err(NeuralError::ShapeMismatch("ragged rows".into()));
        }
        Ok(Self { rows: n, cols: k, data: rows.into_iter().flatten().collect() })
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}
