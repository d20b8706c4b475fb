//! Self-organizing map: online training with a Gaussian neighborhood whose
//! radius decays linearly from `edge/2` to 1, learning rate decaying linearly
//! to 0.01, and majority-vote node labeling for classification.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Matrix, NeuralError, SomTopology, TrainParams};
use crate::seeded::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomModel {
    pub topology: SomTopology,
    /// `edge * edge` prototype vectors of `input_dim` values.
    codebook: Vec<Vec<f64>>,
    /// Majority class per node, filled by [`som_classify`].
    pub node_labels: Vec<Option<usize>>,
    /// Mean distance to the best matching unit, one entry per epoch.
    pub quantization_errors: Vec<f64>,
    trained: bool,
}

impl SomModel {
    /// Untrained map with a seeded random codebook in `[0, 1]^d`.
    pub fn untrained(topology: SomTopology, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let nodes = topology.n_nodes();
        let codebook = (0..nodes)
            .map(|_| (0..topology.input_dim).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        Self {
            topology,
            codebook,
            node_labels: vec![None; nodes],
            quantization_errors: Vec::new(),
            trained: false,
        }
    }

    pub fn is_trained(&self) -> bool {
        self.trained
    }

    pub fn codebook(&self) -> &[Vec<f64>] {
        &self.codebook
    }

    fn grid_pos(&self, node: usize) -> (usize, usize) {
        (node / self.topology.edge_length, node % self.topology.edge_length)
    }

    /// Best matching unit: closest prototype, ties to the lowest index.
    pub fn bmu(&self, x: &[f64]) -> (usize, f64) {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, proto) in self.codebook.iter().enumerate() {
            let d: f64 = proto.iter().zip(x).map(|(p, v)| (p - v) * (p - v)).sum();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        (best, best_d.sqrt())
    }
}

/// Train a SOM on normalized inputs. Deterministic per `params.seed`.
pub fn train_som(
    topology: &SomTopology,
    x: &Matrix,
    params: &TrainParams,
) -> Result<SomModel, NeuralError> {
    params.validate()?;
    if x.n_rows() == 0 {
        return Err(NeuralError::EmptyInput);
    }
    if x.n_cols() != topology.input_dim {
        return Err(NeuralError::ShapeMismatch(format!(
            "input has {} columns, map expects {}",
            x.n_cols(),
            topology.input_dim
        )));
    }
    let mut model = SomModel::untrained(*topology, params.seed);
    let mut rng = rng_from_seed(crate::seeded::derive_seed(params.seed, 1));
    let mut order: Vec<usize> = (0..x.n_rows()).collect();
    let edge = topology.edge_length as f64;
    let epochs = params.epochs;
    let radius_start = (edge / 2.0).max(1.0);
    for epoch in 0..epochs {
        let t = if epochs > 1 { epoch as f64 / (epochs - 1) as f64 } else { 1.0 };
        let radius = radius_start + (1.0 - radius_start) * t;
        let lr = params.learning_rate + (0.01 - params.learning_rate) * t;
        order.shuffle(&mut rng);
        let mut qe = 0.0;
        for &r in &order {
            let sample = x.row(r);
            let (bmu, dist) = model.bmu(sample);
            qe += dist;
            let (br, bc) = model.grid_pos(bmu);
            // nodes beyond 3 radii get a vanishing update; skip them
            let reach = (3.0 * radius).ceil() as isize;
            let e = model.topology.edge_length as isize;
            for dr in -reach..=reach {
                let nr = br as isize + dr;
                if nr < 0 || nr >= e {
                    continue;
                }
                for dc in -reach..=reach {
                    let nc = bc as isize + dc;
                    if nc < 0 || nc >= e {
                        continue;
                    }
                    let grid_d2 = (dr * dr + dc * dc) as f64;
                    let h = (-grid_d2 / (2.0 * radius * radius)).exp();
                    let node = (nr * e + nc) as usize;
                    let proto = &mut model.codebook[node];
                    for (p, &v) in proto.iter_mut().zip(sample) {
                        *p += lr * h * (v - *p);
                    }
                }
            }
        }
        model.quantization_errors.push(qe / x.n_rows() as f64);
    }
    model.trained = true;
    Ok(model)
}

/// Label every node by the majority class of the training rows mapped to it
/// (ties to the lowest code; unvisited nodes inherit the nearest labeled
/// node's label by grid distance), then classify queries by their BMU label.
pub fn som_classify(
    model: &mut SomModel,
    x_labeled: &Matrix,
    labels: &[usize],
    x_query: &Matrix,
) -> Result<Vec<usize>, NeuralError> {
    if !model.is_trained() {
        return Err(NeuralError::UntrainedModel);
    }
    if x_labeled.n_rows() != labels.len() {
        return Err(NeuralError::ShapeMismatch(format!(
            "{} rows vs {} labels",
            x_labeled.n_rows(),
            labels.len()
        )));
    }
    if x_labeled.n_rows() == 0 {
        return Err(NeuralError::EmptyInput);
    }
    let nodes = model.topology.n_nodes();
    let n_classes = labels.iter().max().expect("non-empty") + 1;
    let mut votes = vec![vec![0usize; n_classes]; nodes];
    for r in 0..x_labeled.n_rows() {
        let (bmu, _) = model.bmu(x_labeled.row(r));
        votes[bmu][labels[r]] += 1;
    }
    let mut node_labels: Vec<Option<usize>> = votes
        .iter()
        .map(|v| {
            let total: usize = v.iter().sum();
            if total == 0 {
                None
            } else {
                let mut best = 0;
                for (c, &count) in v.iter().enumerate() {
                    if count > v[best] {
                        best = c;
                    }
                }
                Some(best)
            }
        })
        .collect();
    // unvisited nodes inherit from the nearest labeled node on the grid
    let labeled: Vec<usize> = (0..nodes).filter(|&i| node_labels[i].is_some()).collect();
    for i in 0..nodes {
        if node_labels[i].is_some() {
            continue;
        }
        let (ir, ic) = model.grid_pos(i);
        let mut best = labeled[0];
        let mut best_d = usize::MAX;
        for &j in &labeled {
            let (jr, jc) = model.grid_pos(j);
            let d = ir.abs_diff(jr).pow(2) + ic.abs_diff(jc).pow(2);
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        node_labels[i] = node_labels[best];
    }
    model.node_labels = node_labels;
    Ok((0..x_query.n_rows())
        .map(|r| {
            let (bmu, _) = model.bmu(x_query.row(r));
            model.node_labels[bmu].expect("all nodes labeled")
        })
        .collect())
}
