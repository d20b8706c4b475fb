//! Pattern definitions: which column groups go missing together.

use rand::Rng;

use super::{AmputeError, MissingPattern, PatternDef};
use crate::seeded::rng_from_seed;
use crate::tabular::Schema;

/// Derive the column groups for a pattern over a schema. The target column is
/// never amputed.
///
/// - Univariate: one definition amputing a single (seeded random) column.
/// - Multivariate: one definition amputing a contiguous window of
///   `ceil((K-1)/2)` non-target columns at a seeded offset.
/// - Monotone: `min(3, K-1)` nested definitions; definition `i` amputes the
///   last `i` non-target columns, forming the staircase.
/// - General: one single-column definition per non-target column; rows mix
///   across definitions, scattering the missing cells.
pub fn derive_pattern_defs(
    pattern: MissingPattern,
    schema: &Schema,
    seed: u64,
) -> Result<Vec<PatternDef>, AmputeError> {
    let candidates = schema.non_target_indices();
    if candidates.len() < 2 {
        return Err(AmputeError::TooFewColumns(candidates.len()));
    }
    let k = schema.len();
    let n = candidates.len();
    let mut rng = rng_from_seed(seed);
    let defs = match pattern {
        MissingPattern::Univariate => {
            let col = candidates[rng.random_range(0..n)];
            vec![PatternDef::new(vec![col], k)]
        }
        MissingPattern::Multivariate => {
            let width = (k - 1).div_ceil(2).min(n);
            let start = rng.random_range(0..=(n - width));
            vec![PatternDef::new(candidates[start..start + width].to_vec(), k)]
        }
        MissingPattern::Monotone => {
            let m = 3.min(n);
            (1..=m).map(|i| PatternDef::new(candidates[n - i..].to_vec(), k)).collect()
        }
        MissingPattern::General => {
            candidates.iter().map(|&c| PatternDef::new(vec![c], k)).collect()
        }
    };
    Ok(defs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{ColumnKind, ColumnSchema, Schema};

    fn schema_with(non_target: usize) -> Schema {
        let mut cols: Vec<ColumnSchema> =
            (0..non_target).map(|i| ColumnSchema::numeric(&format!("x{i}"))).collect();
        cols.push(ColumnSchema::target("class"));
        Schema::new(cols).unwrap()
    }

    #[test]
    fn univariate_amputes_one_column() {
        let schema = schema_with(6);
        let defs = derive_pattern_defs(MissingPattern::Univariate, &schema, 1).unwrap();
        assert_eq!(defs.len(), 1);
        assert_eq!(defs[0].amputed_columns.len(), 1);
    }

    #[test]
    fn monotone_builds_the_staircase() {
        // columns {A, B, C} + target -> {C}, {B, C}, {A, B, C}
        let schema = schema_with(3);
        let defs = derive_pattern_defs(MissingPattern::Monotone, &schema, 1).unwrap();
        let sets: Vec<Vec<usize>> = defs.iter().map(|d| d.amputed_columns.clone()).collect();
        assert_eq!(sets, vec![vec![2], vec![1, 2], vec![0, 1, 2]]);
    }

    #[test]
    fn multivariate_is_contiguous_half() {
        let schema = schema_with(6); // K = 7 -> ceil((K-1)/2) = 3 columns
        for seed in 0..20 {
            let defs = derive_pattern_defs(MissingPattern::Multivariate, &schema, seed).unwrap();
            assert_eq!(defs.len(), 1);
            let cols = &defs[0].amputed_columns;
            assert_eq!(cols.len(), 3);
            assert!(cols.windows(2).all(|w| w[1] == w[0] + 1), "not contiguous: {cols:?}");
        }
    }

    #[test]
    fn general_covers_every_non_target_column() {
        let schema = schema_with(5);
        let defs = derive_pattern_defs(MissingPattern::General, &schema, 3).unwrap();
        assert_eq!(defs.len(), 5);
        let mut seen: Vec<usize> = defs.iter().flat_map(|d| d.amputed_columns.clone()).collect();
        seen.sort_unstable();
        assert_eq!(seen, schema.non_target_indices());
    }

    #[test]
    fn target_never_appears_over_random_schemas() {
        let mut rng = crate::seeded::rng_from_seed(99);
        for trial in 0..1000 {
            let n_cols = rng.random_range(3..10usize);
            let target = rng.random_range(0..n_cols);
            let cols: Vec<ColumnSchema> = (0..n_cols)
                .map(|i| {
                    if i == target {
                        ColumnSchema::target("class")
                    } else if rng.random_bool(0.3) {
                        ColumnSchema { name: format!("c{i}"), kind: ColumnKind::Categorical, is_target: false }
                    } else {
                        ColumnSchema::numeric(&format!("x{i}"))
                    }
                })
                .collect();
            let schema = Schema::new(cols).unwrap();
            for pattern in MissingPattern::ALL {
                let defs = derive_pattern_defs(pattern, &schema, trial).unwrap();
                for def in defs {
                    assert!(!def.amputed_columns.contains(&target));
                }
            }
        }
    }

    #[test]
    fn too_few_columns_rejected() {
        let schema = schema_with(1);
        assert!(matches!(
            derive_pattern_defs(MissingPattern::Univariate, &schema, 0),
            Err(AmputeError::TooFewColumns(1))
        ));
    }
}
