//! Seeded row partitioning into train/test/validation index lists.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, TabularError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Partition row indices by a uniform random permutation.
///
/// Subset sizes follow largest-remainder rounding of `n * fraction`, so the
/// three lists are always an exact partition of `0..n`.
pub fn split_dataset(
    ds: &Dataset,
    fractions: (f64, f64, f64),
    seed: u64,
) -> Result<SplitIndices, TabularError> {
    let f = [fractions.0, fractions.1, fractions.2];
    if f.iter().any(|&x| x <= 0.0) || (f.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(TabularError::FractionSumInvalid(f));
    }
    let n = ds.n_rows();
    let sizes = largest_remainder_sizes(n, &f);

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let train = order[..sizes[0]].to_vec();
    let test = order[sizes[0]..sizes[0] + sizes[1]].to_vec();
    let validation = order[sizes[0] + sizes[1]..].to_vec();
    Ok(SplitIndices { train, test, validation })
}

fn largest_remainder_sizes(n: usize, fractions: &[f64; 3]) -> [usize; 3] {
    let raw: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
    let mut sizes: Vec<usize> = raw.iter().map(|&r| r.floor() as usize).collect();
    let mut leftover = n - sizes.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..3).collect();
    // ties broken toward the earlier subset
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &i in &order {
        if leftover == 0 {
            break;
        }
        sizes[i] += 1;
        leftover -= 1;
    }
    [sizes[0], sizes[1], sizes[2]]
}
