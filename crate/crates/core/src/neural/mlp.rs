//! Feed-forward MLP: ReLU hidden layers, identity or softmax head,
//! mini-batch SGD with seeded shuffling and He initialization.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Matrix, NeuralError, TaskKind, TrainParams};
use crate::neural::MlpTopology;
use crate::seeded::rng_from_seed;

/// Trained network. Layer `l` maps `dims[l]` inputs to `dims[l+1]` outputs
/// through `weights[l]` (out x in, row-major) and `biases[l]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub topology: MlpTopology,
    pub task: TaskKind,
    weights: Vec<Matrix>,
    biases: Vec<Vec<f64>>,
    pub final_loss: f64,
}

/// Per-layer parameter gradients in the same shapes as the model parameters.
#[derive(Debug, Clone)]
pub struct LayerGrads {
    pub d_weights: Vec<Matrix>,
    pub d_biases: Vec<Vec<f64>>,
}

impl MlpModel {
    fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.topology.input_size];
        d.extend(&self.topology.hidden);
        d.push(self.topology.output_size);
        d
    }

    pub fn n_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self, layer: usize) -> &Matrix {
        &self.weights[layer]
    }

    pub fn weights_mut(&mut self, layer: usize) -> &mut Matrix {
        &mut self.weights[layer]
    }

    pub fn biases(&self, layer: usize) -> &[f64] {
        &self.biases[layer]
    }

    pub fn biases_mut(&mut self, layer: usize) -> &mut Vec<f64> {
        &mut self.biases[layer]
    }

    /// Seeded He-normal initialization. Hidden biases start slightly
    /// positive so that one-neuron layers from the tight topology budgets do
    /// not begin fully dead.
    pub fn init(topology: &MlpTopology, task: TaskKind, seed: u64) -> Self {
        let mut model = MlpModel {
            topology: topology.clone(),
            task,
            weights: Vec::new(),
            biases: Vec::new(),
            final_loss: f64::NAN,
        };
        let dims = model.dims();
        let mut rng = rng_from_seed(seed);
        let last = dims.len() - 2;
        for l in 0..dims.len() - 1 {
            let (fan_in, fan_out) = (dims[l], dims[l + 1]);
            let normal = Normal::new(0.0, (2.0 / fan_in as f64).sqrt()).expect("positive std");
            let data: Vec<f64> = (0..fan_in * fan_out).map(|_| normal.sample(&mut rng)).collect();
            model.weights.push(Matrix::from_vec(fan_out, fan_in, data).expect("shape fits"));
            let bias = if l < last { 0.05 } else { 0.0 };
            model.biases.push(vec![bias; fan_out]);
        }
        model
    }

    /// Forward pass storing post-activation values per layer (input first).
    fn forward_store(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![x.to_vec()];
        let last = self.weights.len() - 1;
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let prev = &acts[l];
            let mut out = vec![0.0; b.len()];
            for o in 0..b.len() {
                let row = w.row(o);
                let mut z = b[o];
                for (i, &p) in prev.iter().enumerate() {
                    z += row[i] * p;
                }
                out[o] = if l < last { z.max(0.0) } else { z };
            }
            acts.push(out);
        }
        if self.task == TaskKind::Classification {
            let out = acts.last_mut().expect("at least one layer");
            softmax_in_place(out);
        }
        acts
    }

    /// Mean loss over a batch: MSE/2 for regression, cross-entropy for
    /// classification (targets are codes in the first column of `y`).
    pub fn loss(&self, x: &Matrix, y: &Matrix) -> Result<f64, NeuralError> {
        self.check_shapes(x, y)?;
        let n = x.n_rows() as f64;
        let mut total = 0.0;
        for r in 0..x.n_rows() {
            let acts = self.forward_store(x.row(r));
            let out = acts.last().expect("output layer");
            match self.task {
                TaskKind::Regression => {
                    for (o, &v) in out.iter().enumerate() {
                        total += 0.5 * (v - y.get(r, o)).powi(2);
                    }
                }
                TaskKind::Classification => {
                    let code = y.get(r, 0) as usize;
                    total -= out[code].max(1e-300).ln();
                }
            }
        }
        Ok(total / n)
    }

    /// Mean loss and analytic parameter gradients over a batch.
    pub fn loss_and_gradients(&self, x: &Matrix, y: &Matrix) -> Result<(f64, LayerGrads), NeuralError> {
        self.check_shapes(x, y)?;
        let dims = self.dims();
        let mut grads = LayerGrads {
            d_weights: (0..self.weights.len())
                .map(|l| Matrix::zeros(dims[l + 1], dims[l]))
                .collect(),
            d_biases: (0..self.weights.len()).map(|l| vec![0.0; dims[l + 1]]).collect(),
        };
        let n = x.n_rows() as f64;
        let mut total = 0.0;
        for r in 0..x.n_rows() {
            let acts = self.forward_store(x.row(r));
            let out = acts.last().expect("output layer");
            // head delta = dL/dz for the last pre-activation
            let mut delta: Vec<f64> = match self.task {
                TaskKind::Regression => {
                    let mut d = vec![0.0; out.len()];
                    for (o, &v) in out.iter().enumerate() {
                        let diff = v - y.get(r, o);
                        total += 0.5 * diff * diff;
                        d[o] = diff / n;
                    }
                    d
                }
                TaskKind::Classification => {
                    let code = y.get(r, 0) as usize;
                    total -= out[code].max(1e-300).ln();
                    let mut d: Vec<f64> = out.iter().map(|&p| p / n).collect();
                    d[code] -= 1.0 / n;
                    d
                }
            };
            for l in (0..self.weights.len()).rev() {
                let prev = &acts[l];
                for (o, &d) in delta.iter().enumerate() {
                    grads.d_biases[l][o] += d;
                    let row = grads.d_weights[l].row_mut(o);
                    for (i, &p) in prev.iter().enumerate() {
                        row[i] += d * p;
                    }
                }
                if l > 0 {
                    let w = &self.weights[l];
                    let mut next = vec![0.0; prev.len()];
                    for (i, nx) in next.iter_mut().enumerate() {
                        let mut s = 0.0;
                        for (o, &d) in delta.iter().enumerate() {
                            s += d * w.get(o, i);
                        }
                        // ReLU derivative via the stored activation
                        *nx = if prev[i] > 0.0 { s } else { 0.0 };
                    }
                    delta = next;
                }
            }
        }
        Ok((total / n, grads))
    }

    fn sgd_step(&mut self, grads: &LayerGrads, lr: f64) {
        for l in 0..self.weights.len() {
            let dw = &grads.d_weights[l];
            let w = &mut self.weights[l];
            for (wv, gv) in w.data_mut().iter_mut().zip(dw.data()) {
                *wv -= lr * gv;
            }
            for (bv, gv) in self.biases[l].iter_mut().zip(&grads.d_biases[l]) {
                *bv -= lr * gv;
            }
        }
    }

    fn check_shapes(&self, x: &Matrix, y: &Matrix) -> Result<(), NeuralError> {
        if x.n_cols() != self.topology.input_size {
            return Err(NeuralError::ShapeMismatch(format!(
                "input has {} columns, model expects {}",
                x.n_cols(),
                self.topology.input_size
            )));
        }
        if x.n_rows() != y.n_rows() {
            return Err(NeuralError::ShapeMismatch(format!(
                "{} input rows vs {} target rows",
                x.n_rows(),
                y.n_rows()
            )));
        }
        if x.n_rows() == 0 {
            return Err(NeuralError::EmptyInput);
        }
        match self.task {
            TaskKind::Regression => {
                if y.n_cols() != self.topology.output_size {
                    return Err(NeuralError::ShapeMismatch(format!(
                        "target has {} columns, model outputs {}",
                        y.n_cols(),
                        self.topology.output_size
                    )));
                }
            }
            TaskKind::Classification => {
                if y.n_cols() != 1 {
                    return Err(NeuralError::ShapeMismatch(
                        "classification targets must be a single code column".into(),
                    ));
                }
                for r in 0..y.n_rows() {
                    let code = y.get(r, 0);
                    if code.fract() != 0.0 || code < 0.0 || code as usize >= self.topology.output_size
                    {
                        return Err(NeuralError::ShapeMismatch(format!(
                            "class code {code} outside 0..{}",
                            self.topology.output_size
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// Train with mini-batch SGD. Deterministic for a fixed seed: He init,
/// per-epoch shuffling and all restart seeds derive from `params.seed`.
///
/// The tight topology budgets produce one- and two-neuron ReLU layers whose
/// fate depends heavily on the initialization draw. Training therefore runs
/// `params.restarts` times from derived seeds and keeps the model with the
/// lowest full-data training loss (ties to the earlier attempt).
pub fn train_mlp(
    topology: &MlpTopology,
    task: TaskKind,
    x: &Matrix,
    y: &Matrix,
    params: &TrainParams,
) -> Result<MlpModel, NeuralError> {
    params.validate()?;
    if params.learning_rate == 0.0 {
        // nothing to select between; keep the base-seed initialization
        return train_once(topology, task, x, y, params);
    }
    let mut best: Option<(f64, MlpModel)> = None;
    for attempt in 0..params.restarts.max(1) as u64 {
        let seed = if attempt == 0 {
            params.seed
        } else {
            crate::seeded::derive_seed(params.seed, 0x5EED + attempt)
        };
        let candidate = train_once(topology, task, x, y, &TrainParams { seed, ..*params })?;
        let loss = candidate.loss(x, y)?;
        let better = match &best {
            None => true,
            Some((best_loss, _)) => loss < *best_loss && !loss.is_nan(),
        };
        if better {
            best = Some((loss, candidate));
        }
    }
    Ok(best.expect("restarts >= 1").1)
}

fn train_once(
    topology: &MlpTopology,
    task: TaskKind,
    x: &Matrix,
    y: &Matrix,
    params: &TrainParams,
) -> Result<MlpModel, NeuralError> {
    let mut model = MlpModel::init(topology, task, params.seed);
    model.check_shapes(x, y)?;
    let n = x.n_rows();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = rng_from_seed(crate::seeded::derive_seed(params.seed, 1));
    let mut last_loss = f64::NAN;
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(params.batch_size) {
            let bx = gather(x, chunk);
            let by = gather(y, chunk);
            let (loss, grads) = model.loss_and_gradients(&bx, &by)?;
            epoch_loss += loss * chunk.len() as f64;
            if params.learning_rate > 0.0 {
                model.sgd_step(&grads, params.learning_rate);
            }
        }
        last_loss = epoch_loss / n as f64;
    }
    model.final_loss = last_loss;
    Ok(model)
}

fn gather(m: &Matrix, rows: &[usize]) -> Matrix {
    let mut out = Matrix::zeros(rows.len(), m.n_cols());
    for (i, &r) in rows.iter().enumerate() {
        out.row_mut(i).copy_from_slice(m.row(r));
    }
    out
}

/// Forward pass over a batch. Regression returns raw outputs; classification
/// returns per-class softmax scores.
pub fn predict_mlp(model: &MlpModel, x: &Matrix) -> Result<Matrix, NeuralError> {
    if x.n_cols() != model.topology.input_size {
        return Err(NeuralError::ShapeMismatch(format!(
            "input has {} columns, model expects {}",
            x.n_cols(),
            model.topology.input_size
        )));
    }
    let mut out = Matrix::zeros(x.n_rows(), model.topology.output_size);
    for r in 0..x.n_rows() {
        let acts = model.forward_store(x.row(r));
        out.row_mut(r).copy_from_slice(acts.last().expect("output layer"));
    }
    Ok(out)
}

/// Argmax codes from classification scores; ties go to the lowest code.
pub fn predict_classes(model: &MlpModel, x: &Matrix) -> Result<Vec<usize>, NeuralError> {
    let scores = predict_mlp(model, x)?;
    Ok((0..scores.n_rows())
        .map(|r| {
            let row = scores.row(r);
            let mut best = 0;
            for (i, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = i;
                }
            }
            best
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::{mlp_topology, BudgetClass};

    fn xor_data() -> (Matrix, Matrix) {
        let x = Matrix::from_rows(vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        let y = Matrix::from_rows(vec![vec![0.0], vec![1.0], vec![1.0], vec![0.0]]).unwrap();
        (x, y)
    }

    #[test]
    fn xor_is_learned_by_a_depth_two_net() {
        let (x, y) = xor_data();
        let topology = mlp_topology(2, 2, 2, BudgetClass::Maximum).unwrap();
        let params = TrainParams { epochs: 2000, batch_size: 4, learning_rate: 0.5, seed: 5, ..TrainParams::default() };
        let model = train_mlp(&topology, TaskKind::Classification, &x, &y, &params).unwrap();
        let classes = predict_classes(&model, &x).unwrap();
        assert_eq!(classes, vec![0, 1, 1, 0]);
    }

    #[test]
    fn zero_learning_rate_keeps_weights() {
        let (x, y) = xor_data();
        let topology = mlp_topology(2, 2, 2, BudgetClass::Medium).unwrap();
        let init = MlpModel::init(&topology, TaskKind::Classification, 3);
        let params = TrainParams { epochs: 5, batch_size: 2, learning_rate: 0.0, seed: 3, ..TrainParams::default() };
        let trained = train_mlp(&topology, TaskKind::Classification, &x, &y, &params).unwrap();
        for l in 0..init.n_layers() {
            assert_eq!(init.weights(l), trained.weights(l));
            assert_eq!(init.biases(l), trained.biases(l));
        }
    }

    #[test]
    fn gradients_match_central_differences() {
        let data: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..3).map(|j| ((i * 3 + j) as f64 * 0.37).sin() * 0.5 + 0.5).collect())
            .collect();
        let x = Matrix::from_rows(data).unwrap();
        for (task, y) in [
            (
                TaskKind::Regression,
                Matrix::from_rows((0..5).map(|i| vec![(i as f64 * 0.21).cos(), i as f64 / 5.0]).collect())
                    .unwrap(),
            ),
            (
                TaskKind::Classification,
                Matrix::from_rows(vec![vec![0.0], vec![1.0], vec![1.0], vec![0.0], vec![1.0]])
                    .unwrap(),
            ),
        ] {
            let topology = MlpTopology::custom(3, vec![4, 3], 2);
            let mut model = MlpModel::init(&topology, task, 11);
            let (_, grads) = model.loss_and_gradients(&x, &y).unwrap();
            let eps = 1e-4;
            for l in 0..model.n_layers() {
                for idx in 0..model.weights(l).data().len() {
                    let orig = model.weights(l).data()[idx];
                    model.weights_mut(l).data_mut()[idx] = orig + eps;
                    let up = model.loss(&x, &y).unwrap();
                    model.weights_mut(l).data_mut()[idx] = orig - eps;
                    let down = model.loss(&x, &y).unwrap();
                    model.weights_mut(l).data_mut()[idx] = orig;
                    let numeric = (up - down) / (2.0 * eps);
                    let analytic = grads.d_weights[l].data()[idx];
                    let scale = analytic.abs().max(numeric.abs()).max(1e-8);
                    assert!(
                        (analytic - numeric).abs() / scale < 1e-3,
                        "{task:?} layer {l} weight {idx}: {analytic} vs {numeric}"
                    );
                }
                for idx in 0..model.biases(l).len() {
                    let orig = model.biases(l)[idx];
                    model.biases_mut(l)[idx] = orig + eps;
                    let up = model.loss(&x, &y).unwrap();
                    model.biases_mut(l)[idx] = orig - eps;
                    let down = model.loss(&x, &y).unwrap();
                    model.biases_mut(l)[idx] = orig;
                    let numeric = (up - down) / (2.0 * eps);
                    let analytic = grads.d_biases[l][idx];
                    let scale = analytic.abs().max(numeric.abs()).max(1e-8);
                    assert!(
                        (analytic - numeric).abs() / scale < 1e-3,
                        "{task:?} layer {l} bias {idx}: {analytic} vs {numeric}"
                    );
                }
            }
        }
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let topology = MlpTopology::custom(2, vec![3], 4);
        let model = MlpModel::init(&topology, TaskKind::Classification, 1);
        let x = Matrix::from_rows(vec![vec![0.2, -0.4], vec![10.0, 3.0]]).unwrap();
        let scores = predict_mlp(&model, &x).unwrap();
        for r in 0..scores.n_rows() {
            let sum: f64 = scores.row(r).iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_row_and_batch_predictions_agree() {
        let topology = MlpTopology::custom(3, vec![4, 2], 2);
        let model = MlpModel::init(&topology, TaskKind::Regression, 7);
        let x = Matrix::from_rows(vec![
            vec![0.1, 0.9, 0.4],
            vec![0.8, 0.2, 0.6],
            vec![0.3, 0.3, 0.3],
        ])
        .unwrap();
        let batch = predict_mlp(&model, &x).unwrap();
        for r in 0..x.n_rows() {
            let single = predict_mlp(&model, &Matrix::from_rows(vec![x.row(r).to_vec()]).unwrap())
                .unwrap();
            assert_eq!(single.row(0), batch.row(r));
        }
    }

    #[test]
    fn zero_weights_regression_outputs_bias() {
        let topology = MlpTopology::custom(2, vec![2], 1);
        let mut model = MlpModel::init(&topology, TaskKind::Regression, 0);
        for l in 0..model.n_layers() {
            model.weights_mut(l).data_mut().fill(0.0);
            model.biases_mut(l).fill(0.0);
        }
        let x = Matrix::from_rows(vec![vec![5.0, -3.0]]).unwrap();
        let out = predict_mlp(&model, &x).unwrap();
        assert_eq!(out.row(0), &[0.0]);
    }

    #[test]
    fn shape_mismatches_rejected() {
        let topology = MlpTopology::custom(3, vec![2], 2);
        let model = MlpModel::init(&topology, TaskKind::Regression, 0);
        let bad = Matrix::from_rows(vec![vec![1.0, 2.0]]).unwrap();
        assert!(matches!(predict_mlp(&model, &bad), Err(NeuralError::ShapeMismatch(_))));
        let x = Matrix::from_rows(vec![vec![1.0, 2.0, 3.0]]).unwrap();
        let bad_y = Matrix::from_rows(vec![vec![1.0]]).unwrap();
        assert!(model.loss(&x, &bad_y).is_err());
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let (x, y) = xor_data();
        let topology = mlp_topology(2, 2, 3, BudgetClass::Maximum).unwrap();
        let params = TrainParams { epochs: 50, batch_size: 2, learning_rate: 0.1, seed: 9, ..TrainParams::default() };
        let a = train_mlp(&topology, TaskKind::Classification, &x, &y, &params).unwrap();
        let b = train_mlp(&topology, TaskKind::Classification, &x, &y, &params).unwrap();
        assert_eq!(a, b);
    }
}
