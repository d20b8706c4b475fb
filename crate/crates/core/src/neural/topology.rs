//! Topology enumeration rules for the classification model grids.
//!
//! MLP grids combine three hidden depths (2, 3, 4) with three neuron budgets:
//! Minimum = input size, Medium = input + output, Maximum = 2*input + output.
//! The budget is spread over the hidden layers along a ratio-2 geometric
//! taper so layer sizes never increase toward the output.
//!
//! SOM maps are square; the reference edge length comes from estimating the
//! output layer at `5 * sqrt(N)` neurons, so `L = floor((25 N)^(1/4))`, with
//! quarter and quadruple variants.

use serde::{Deserialize, Serialize};

use super::NeuralError;

/// Hidden-neuron budget rule relative to the input/output sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetClass {
    Minimum,
    Medium,
    Maximum,
}

impl BudgetClass {
    pub const ALL: [BudgetClass; 3] = [BudgetClass::Minimum, BudgetClass::Medium, BudgetClass::Maximum];

    pub fn budget(self, input_size: usize, output_size: usize) -> usize {
        match self {
            BudgetClass::Minimum => input_size,
            BudgetClass::Medium => input_size + output_size,
            BudgetClass::Maximum => 2 * input_size + output_size,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BudgetClass::Minimum => "minimum",
            BudgetClass::Medium => "medium",
            BudgetClass::Maximum => "maximum",
        }
    }
}

/// Layer-size descriptor of a feed-forward network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpTopology {
    pub input_size: usize,
    pub hidden: Vec<usize>,
    pub output_size: usize,
    /// Budget rule that produced this topology; `None` for hand-built layouts.
    pub budget: Option<BudgetClass>,
}

impl MlpTopology {
    /// Hand-built topology with explicit hidden sizes.
    pub fn custom(input_size: usize, hidden: Vec<usize>, output_size: usize) -> Self {
        Self { input_size, hidden, output_size, budget: None }
    }

    /// Canonical label, e.g. `mlp_7_4` for hidden layers (7, 4).
    pub fn label(&self) -> String {
        let sizes: Vec<String> = self.hidden.iter().map(|h| h.to_string()).collect();
        format!("mlp_{}", sizes.join("_"))
    }
}

/// Spread `budget` neurons over `depth` layers: one guaranteed neuron per
/// layer, the rest proportional to a ratio-2 taper, rounded by largest
/// remainder so the total is exact, then sorted non-increasing.
fn taper_distribute(budget: usize, depth: usize) -> Result<Vec<usize>, NeuralError> {
    if budget < depth {
        return Err(NeuralError::BudgetTooSmall { budget, depth });
    }
    let extra = (budget - depth) as f64;
    let weights: Vec<f64> = (0..depth).map(|i| 2f64.powi((depth - 1 - i) as i32)).collect();
    let total: f64 = weights.iter().sum();
    let raw: Vec<f64> = weights.iter().map(|w| extra * w / total).collect();
    let mut sizes: Vec<usize> = raw.iter().map(|&r| 1 + r.floor() as usize).collect();
    let mut leftover = budget - sizes.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..depth).collect();
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if leftover == 0 {
            break;
        }
        sizes[i] += 1;
        leftover -= 1;
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(sizes)
}

/// Build one topology for a (depth, budget) pair.
pub fn mlp_topology(
    input_size: usize,
    output_size: usize,
    depth: usize,
    class: BudgetClass,
) -> Result<MlpTopology, NeuralError> {
    if input_size == 0 || output_size == 0 || depth == 0 {
        return Err(NeuralError::InvalidParam("sizes and depth must be >= 1".into()));
    }
    let hidden = taper_distribute(class.budget(input_size, output_size), depth)?;
    Ok(MlpTopology { input_size, hidden, output_size, budget: Some(class) })
}

/// How to read the grid's "two, three and four layers".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LayerCountSemantics {
    /// Counts hidden layers: depths 2, 3, 4.
    #[default]
    Hidden,
    /// Counts all layers including input and output: hidden depths 0, 1, 2.
    Total,
}

/// The 3x3 topology grid (three depths x three budgets) under the default
/// hidden-layer reading. Infeasible combinations (budget < depth) are
/// skipped, so small inputs can yield fewer than nine topologies.
pub fn enumerate_mlp_topologies(input_size: usize, output_size: usize) -> Vec<MlpTopology> {
    enumerate_mlp_topologies_with(input_size, output_size, LayerCountSemantics::Hidden)
}

pub fn enumerate_mlp_topologies_with(
    input_size: usize,
    output_size: usize,
    semantics: LayerCountSemantics,
) -> Vec<MlpTopology> {
    let depths: &[usize] = match semantics {
        LayerCountSemantics::Hidden => &[2, 3, 4],
        LayerCountSemantics::Total => &[0, 1, 2],
    };
    let mut out = Vec::new();
    for &depth in depths {
        if depth == 0 {
            // direct input -> output layer; budgets are moot, emit once
            out.push(MlpTopology {
                input_size,
                hidden: Vec::new(),
                output_size,
                budget: Some(BudgetClass::Minimum),
            });
            continue;
        }
        for class in BudgetClass::ALL {
            if let Ok(t) = mlp_topology(input_size, output_size, depth, class) {
                out.push(t);
            }
        }
    }
    out
}

/// Map-size rule variants around the reference edge length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeClass {
    Minimum,
    Medium,
    Maximum,
}

impl SizeClass {
    pub const ALL: [SizeClass; 3] = [SizeClass::Minimum, SizeClass::Medium, SizeClass::Maximum];

    pub fn label(self) -> &'static str {
        match self {
            SizeClass::Minimum => "minimum",
            SizeClass::Medium => "medium",
            SizeClass::Maximum => "maximum",
        }
    }
}

/// Square-map descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SomTopology {
    pub input_dim: usize,
    pub edge_length: usize,
    pub size_class: SizeClass,
}

impl SomTopology {
    pub fn new(input_dim: usize, edge_length: usize, size_class: SizeClass) -> Self {
        Self { input_dim, edge_length, size_class }
    }

    /// Topology sized from the number of training rows.
    pub fn from_data_size(input_dim: usize, n_rows: usize, size_class: SizeClass) -> Self {
        Self::new(input_dim, som_dimensions(n_rows, size_class), size_class)
    }

    pub fn n_nodes(&self) -> usize {
        self.edge_length * self.edge_length
    }

    /// Canonical label carrying the output-layer neuron count.
    pub fn label(&self) -> String {
        format!("som_{}", self.n_nodes())
    }
}

/// Reference edge length `floor(sqrt(5 * sqrt(N))) = floor((25 N)^(1/4))`,
/// computed with an exact integer correction so float rounding near integer
/// boundaries cannot change the result.
pub fn som_edge_length(n_rows: usize) -> usize {
    if n_rows == 0 {
        return 1;
    }
    let target = 25u128 * n_rows as u128;
    let mut l = (target as f64).powf(0.25).floor() as u128;
    while (l + 1).checked_pow(4).is_some_and(|p| p <= target) {
        l += 1;
    }
    while l > 1 && l.pow(4) > target {
        l -= 1;
    }
    l.max(1) as usize
}

/// Edge length for a size class: Minimum = `max(1, floor(0.25 L))`,
/// Medium = `L`, Maximum = `4 L`.
pub fn som_dimensions(n_rows: usize, size_class: SizeClass) -> usize {
    let l = som_edge_length(n_rows);
    match size_class {
        SizeClass::Minimum => (l / 4).max(1),
        SizeClass::Medium => l,
        SizeClass::Maximum => 4 * l,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_topologies_for_the_reference_sizes() {
        let ts = enumerate_mlp_topologies(6, 5);
        assert_eq!(ts.len(), 9);
        for t in &ts {
            assert!(t.hidden.iter().all(|&h| h >= 1));
            assert!(t.hidden.windows(2).all(|w| w[0] >= w[1]), "{:?}", t.hidden);
            let budget = t.budget.unwrap().budget(6, 5);
            assert_eq!(t.hidden.iter().sum::<usize>(), budget);
        }
    }

    #[test]
    fn medium_depth_two_example() {
        let t = mlp_topology(6, 5, 2, BudgetClass::Medium).unwrap();
        assert_eq!(t.hidden.iter().sum::<usize>(), 11);
        assert!(t.hidden[0] >= t.hidden[1]);
    }

    #[test]
    fn budget_too_small_is_an_error() {
        let err = mlp_topology(2, 2, 4, BudgetClass::Minimum);
        assert!(matches!(err, Err(NeuralError::BudgetTooSmall { budget: 2, depth: 4 })));
    }

    #[test]
    fn total_layer_semantics_shifts_depths() {
        let ts = enumerate_mlp_topologies_with(6, 5, LayerCountSemantics::Total);
        let depths: Vec<usize> = ts.iter().map(|t| t.hidden.len()).collect();
        assert!(depths.contains(&0) && depths.contains(&1) && depths.contains(&2));
        assert!(!depths.contains(&3));
    }

    #[test]
    fn som_reference_values() {
        assert_eq!(som_dimensions(10_000, SizeClass::Medium), 22);
        assert_eq!(som_dimensions(10_000, SizeClass::Minimum), 5);
        assert_eq!(som_dimensions(10_000, SizeClass::Maximum), 88);
        assert_eq!(som_dimensions(1, SizeClass::Medium), 2);
        assert_eq!(som_dimensions(1, SizeClass::Minimum), 1);
    }

    #[test]
    fn som_edge_matches_integer_oracle_on_log_grid() {
        let mut n = 1usize;
        while n <= 10_000_000 {
            for cand in [n, n + 1, n.saturating_sub(1).max(1)] {
                let expected = {
                    let target = 25u128 * cand as u128;
                    (1u128..).take_while(|l| l.pow(4) <= target).last().unwrap()
                } as usize;
                assert_eq!(som_edge_length(cand), expected, "n = {cand}");
            }
            n *= 3;
        }
    }

    #[test]
    fn enumeration_invariants_hold_over_size_grid() {
        for input in 1..=64usize {
            for output in [2usize, 5, 17, 32] {
                for t in enumerate_mlp_topologies(input, output) {
                    let budget = t.budget.unwrap().budget(input, output);
                    assert_eq!(
                        t.hidden.iter().sum::<usize>(),
                        budget,
                        "input {input} output {output} hidden {:?}",
                        t.hidden
                    );
                    assert!(t.hidden.iter().all(|&h| h >= 1));
                    assert!(t.hidden.windows(2).all(|w| w[0] >= w[1]));
                }
            }
        }
    }
}
