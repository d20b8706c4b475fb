//! Missing value simulation: mask a complete dataset under a controlled
//! (pattern, mechanism, rate) study case.
//!
//! Each row is assigned to one pattern definition; within a definition the
//! mechanism decides which rows lose that definition's columns. MCAR picks
//! rows uniformly. MAR and MNAR rank rows by a weighted-sum score (over
//! observed columns for MAR, over the to-be-amputed columns for MNAR) and
//! sample without replacement with weights that rise logistically in the rank
//! percentile, so the achieved row-wise rate is exact while high-scoring rows
//! are strongly preferred.

mod io;
mod patterns;
mod study;

pub use io::{read_mask_csv, write_mask_csv};
pub use patterns::derive_pattern_defs;
pub use study::{build_filtered_matrix, build_study_matrix, DEFAULT_RATES};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seeded::rng_from_seed;
use crate::tabular::{Dataset, NormParams, Schema};

#[derive(Debug, Error)]
pub enum AmputeError {
    #[error("missing rate {0} outside [0, 1)")]
    InvalidRate(f64),
    #[error("need at least 2 non-target columns, found {0}")]
    TooFewColumns(usize),
    #[error("input dataset already has missing cells")]
    IncompleteInput,
    #[error("pattern definition is invalid: {0}")]
    InvalidPatternDef(String),
    #[error("mask shape {mask:?} does not match dataset shape {data:?}")]
    ShapeMismatch { mask: (usize, usize), data: (usize, usize) },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error on {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("mask cell at row {row}, column {col} must be 0 or 1, got {value:?}")]
    BadMaskCell { row: usize, col: usize, value: String },
}

/// Structural shape of missingness across attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissingPattern {
    /// Missing values occur in a single attribute.
    Univariate,
    /// A contiguous group of attributes goes missing together.
    Multivariate,
    /// Nested attribute sets form a staircase of increasing loss.
    Monotone,
    /// Missing values scatter over all attributes, one per row.
    General,
}

impl MissingPattern {
    pub const ALL: [MissingPattern; 4] = [
        MissingPattern::Univariate,
        MissingPattern::Multivariate,
        MissingPattern::Monotone,
        MissingPattern::General,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MissingPattern::Univariate => "univariate",
            MissingPattern::Multivariate => "multivariate",
            MissingPattern::Monotone => "monotone",
            MissingPattern::General => "general",
        }
    }
}

impl std::str::FromStr for MissingPattern {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "univariate" => Ok(MissingPattern::Univariate),
            "multivariate" => Ok(MissingPattern::Multivariate),
            "monotone" => Ok(MissingPattern::Monotone),
            "general" => Ok(MissingPattern::General),
            other => Err(format!("unknown missing pattern {other:?}")),
        }
    }
}

/// Statistical dependence of missingness on the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissingMechanism {
    /// Independent of all values.
    Mcar,
    /// Depends on observed values of other attributes.
    Mar,
    /// Depends on the missing attribute's own values.
    Mnar,
}

impl MissingMechanism {
    pub const ALL: [MissingMechanism; 3] =
        [MissingMechanism::Mcar, MissingMechanism::Mar, MissingMechanism::Mnar];

    pub fn label(self) -> &'static str {
        match self {
            MissingMechanism::Mcar => "mcar",
            MissingMechanism::Mar => "mar",
            MissingMechanism::Mnar => "mnar",
        }
    }
}

impl std::str::FromStr for MissingMechanism {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mcar" => Ok(MissingMechanism::Mcar),
            "mar" => Ok(MissingMechanism::Mar),
            "mnar" => Ok(MissingMechanism::Mnar),
            other => Err(format!("unknown missing mechanism {other:?}")),
        }
    }
}

/// One group of columns amputed together, with per-column score weights.
///
/// All-zero weights select the mechanism default at amputation time: MAR
/// weighs the observed non-target columns, MNAR the amputed columns, and
/// MCAR uses no scores at all.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternDef {
    pub amputed_columns: Vec<usize>,
    pub weights: Vec<f64>,
}

impl PatternDef {
    pub fn new(amputed_columns: Vec<usize>, n_cols: usize) -> Self {
        let mut cols = amputed_columns;
        cols.sort_unstable();
        cols.dedup();
        Self { amputed_columns: cols, weights: vec![0.0; n_cols] }
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = weights;
        self
    }
}

/// One study case: pattern, mechanism, rate, optional explicit definitions
/// and the seed that makes the mask reproducible.
///
/// Empty `pattern_defs` are derived from the dataset schema when the spec is
/// applied, which lets a study matrix be built before any data is seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmputationSpec {
    pub pattern: MissingPattern,
    pub mechanism: MissingMechanism,
    pub rate: f64,
    #[serde(default)]
    pub pattern_defs: Vec<PatternDef>,
    pub seed: u64,
}

impl AmputationSpec {
    pub fn new(pattern: MissingPattern, mechanism: MissingMechanism, rate: f64, seed: u64) -> Self {
        Self { pattern, mechanism, rate, pattern_defs: Vec::new(), seed }
    }
}

/// Cell-level missingness matrix; `true` marks a missing cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingMask {
    n_rows: usize,
    n_cols: usize,
    cells: Vec<bool>,
}

impl MissingMask {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self { n_rows, n_cols, cells: vec![false; n_rows * n_cols] }
    }

    /// Mask derived from the `None` cells of a dataset.
    pub fn from_dataset(ds: &Dataset) -> Self {
        let mut mask = Self::new(ds.n_rows(), ds.n_cols());
        for r in 0..ds.n_rows() {
            for c in 0..ds.n_cols() {
                if ds.get(r, c).is_none() {
                    mask.set(r, c, true);
                }
            }
        }
        mask
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.n_cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, missing: bool) {
        self.cells[row * self.n_cols + col] = missing;
    }

    pub fn row_has_missing(&self, row: usize) -> bool {
        self.cells[row * self.n_cols..(row + 1) * self.n_cols].iter().any(|&b| b)
    }

    /// Per-row missing-column flags.
    pub fn row_signature(&self, row: usize) -> &[bool] {
        &self.cells[row * self.n_cols..(row + 1) * self.n_cols]
    }

    pub fn count_missing(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn column_missing_count(&self, col: usize) -> usize {
        (0..self.n_rows).filter(|&r| self.get(r, col)).count()
    }
}

/// A dataset with masked cells set to `None`, the mask itself, and the spec
/// that produced it.
#[derive(Debug, Clone)]
pub struct AmputedDataset {
    pub data: Dataset,
    pub mask: MissingMask,
    pub spec: AmputationSpec,
    pub warnings: Vec<String>,
}

impl AmputedDataset {
    /// Assemble from already-masked data and its mask file, checking that
    /// `None` cells and mask bits agree. Used when masked data comes from
    /// disk and the producing spec is unknown; the stored spec is a
    /// placeholder.
    pub fn from_incomplete(data: Dataset, mask: MissingMask) -> Result<Self, AmputeError> {
        if (mask.n_rows(), mask.n_cols()) != (data.n_rows(), data.n_cols()) {
            return Err(AmputeError::ShapeMismatch {
                mask: (mask.n_rows(), mask.n_cols()),
                data: (data.n_rows(), data.n_cols()),
            });
        }
        for r in 0..data.n_rows() {
            for c in 0..data.n_cols() {
                if mask.get(r, c) != data.get(r, c).is_none() {
                    return Err(AmputeError::InvalidPatternDef(format!(
                        "mask and data disagree at row {r}, column {c}"
                    )));
                }
            }
        }
        let rate = achieved_missing_rate(&mask);
        let spec = AmputationSpec::new(
            MissingPattern::General,
            MissingMechanism::Mcar,
            rate.min(0.999_999),
            0,
        );
        Ok(Self { data, mask, spec, warnings: Vec::new() })
    }

    /// Assemble from an existing mask (for externally loaded masks or tests).
    pub fn from_mask(
        original: &Dataset,
        mask: MissingMask,
        spec: AmputationSpec,
    ) -> Result<Self, AmputeError> {
        if (mask.n_rows(), mask.n_cols()) != (original.n_rows(), original.n_cols()) {
            return Err(AmputeError::ShapeMismatch {
                mask: (mask.n_rows(), mask.n_cols()),
                data: (original.n_rows(), original.n_cols()),
            });
        }
        let mut data = original.clone();
        for r in 0..mask.n_rows() {
            for c in 0..mask.n_cols() {
                if mask.get(r, c) {
                    data.set(r, c, None);
                }
            }
        }
        Ok(Self { data, mask, spec, warnings: Vec::new() })
    }
}

/// Fraction of rows with at least one missing cell.
pub fn achieved_missing_rate(mask: &MissingMask) -> f64 {
    if mask.n_rows() == 0 {
        return 0.0;
    }
    let rows = (0..mask.n_rows()).filter(|&r| mask.row_has_missing(r)).count();
    rows as f64 / mask.n_rows() as f64
}

/// Fraction of missing cells over all cells; reported alongside the row-wise
/// rate as metadata.
pub fn cell_missing_rate(mask: &MissingMask) -> f64 {
    let total = mask.n_rows() * mask.n_cols();
    if total == 0 {
        return 0.0;
    }
    mask.count_missing() as f64 / total as f64
}

/// Logistic sharpness for MAR/MNAR rank selection. At this value the top
/// decile of scores is ~e^(0.45*K) = 36x more likely to be selected than the
/// bottom decile (the floor is 5x).
pub const MECHANISM_SHARPNESS: f64 = 8.0;

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn resolve_weights(
    def: &PatternDef,
    mechanism: MissingMechanism,
    schema: &Schema,
) -> Result<Vec<f64>, AmputeError> {
    let k = schema.len();
    if def.weights.len() != k {
        return Err(AmputeError::InvalidPatternDef(format!(
            "weight vector has {} entries, expected {k}",
            def.weights.len()
        )));
    }
    let is_amputed = |c: usize| def.amputed_columns.contains(&c);
    let custom = def.weights.iter().any(|&w| w != 0.0);
    match mechanism {
        MissingMechanism::Mcar => {
            if custom {
                return Err(AmputeError::InvalidPatternDef(
                    "MCAR weights must all be zero".into(),
                ));
            }
            Ok(vec![0.0; k])
        }
        MissingMechanism::Mar => {
            if custom {
                if def.amputed_columns.iter().any(|&c| def.weights[c] != 0.0) {
                    return Err(AmputeError::InvalidPatternDef(
                        "MAR weights must be zero on amputed columns".into(),
                    ));
                }
                return Ok(def.weights.clone());
            }
            Ok((0..k)
                .map(|c| if !is_amputed(c) && c != schema.target_index() { 1.0 } else { 0.0 })
                .collect())
        }
        MissingMechanism::Mnar => {
            if custom {
                if (0..k).any(|c| def.weights[c] != 0.0 && !is_amputed(c)) {
                    return Err(AmputeError::InvalidPatternDef(
                        "MNAR weights must be zero outside amputed columns".into(),
                    ));
                }
                return Ok(def.weights.clone());
            }
            Ok((0..k).map(|c| if is_amputed(c) { 1.0 } else { 0.0 }).collect())
        }
    }
}

fn validate_defs(defs: &[PatternDef], schema: &Schema) -> Result<(), AmputeError> {
    let target = schema.target_index();
    for def in defs {
        if def.amputed_columns.is_empty() {
            return Err(AmputeError::InvalidPatternDef("empty amputed column set".into()));
        }
        if def.amputed_columns.contains(&target) {
            return Err(AmputeError::InvalidPatternDef(
                "target column may not be amputed".into(),
            ));
        }
        if def.amputed_columns.iter().any(|&c| c >= schema.len()) {
            return Err(AmputeError::InvalidPatternDef("column index out of range".into()));
        }
    }
    Ok(())
}

/// Select `quota` rows from `rows`, biased toward high scores.
///
/// Rows are ranked by score (stable on the original order); selection weight
/// is `logistic(K * (rank_pct - 0.5))` and the draw is weighted sampling
/// without replacement, so the selected count is exact.
fn select_biased(
    rows: &[usize],
    scores: &[f64],
    quota: usize,
    rng: &mut impl Rng,
) -> Vec<usize> {
    let n = rows.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        scores[a].partial_cmp(&scores[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    let mut rank = vec![0usize; n];
    for (pos, &i) in order.iter().enumerate() {
        rank[i] = pos;
    }
    let denom = (n - 1).max(1) as f64;
    // Efraimidis-Spirakis keys: top `quota` of u^(1/w)
    let mut keyed: Vec<(f64, usize)> = (0..n)
        .map(|i| {
            let pct = rank[i] as f64 / denom;
            let w = logistic(MECHANISM_SHARPNESS * (pct - 0.5));
            let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
            (u.powf(1.0 / w), i)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    keyed[..quota].iter().map(|&(_, i)| rows[i]).collect()
}

/// Apply a study case to a complete dataset.
///
/// Deterministic per `spec.seed`. Missing pattern definitions are derived
/// from the schema when `spec.pattern_defs` is empty.
pub fn ampute(ds: &Dataset, spec: &AmputationSpec) -> Result<AmputedDataset, AmputeError> {
    if !ds.is_complete() {
        return Err(AmputeError::IncompleteInput);
    }
    if !(0.0..1.0).contains(&spec.rate) {
        return Err(AmputeError::InvalidRate(spec.rate));
    }
    let schema = ds.schema();
    let mut resolved = spec.clone();
    if resolved.pattern_defs.is_empty() {
        resolved.pattern_defs = derive_pattern_defs(spec.pattern, schema, spec.seed)?;
    }
    validate_defs(&resolved.pattern_defs, schema)?;
    let weights: Vec<Vec<f64>> = resolved
        .pattern_defs
        .iter()
        .map(|d| resolve_weights(d, resolved.mechanism, schema))
        .collect::<Result<_, _>>()?;
    for (def, w) in resolved.pattern_defs.iter_mut().zip(&weights) {
        def.weights = w.clone();
    }

    let n = ds.n_rows();
    let mut mask = MissingMask::new(n, ds.n_cols());
    let mut warnings = Vec::new();
    if resolved.rate > 0.0 && n > 0 {
        // score space: min-max normalized columns so weights are comparable
        let (normed, _) = crate::tabular::normalize(
            ds,
            Some(&NormParams::fit_all_columns(ds)),
        );
        let mut rng = rng_from_seed(resolved.seed);
        let n_defs = resolved.pattern_defs.len();
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n_defs];
        for r in 0..n {
            groups[rng.random_range(0..n_defs)].push(r);
        }
        for (def, rows) in resolved.pattern_defs.iter().zip(groups) {
            if rows.is_empty() {
                continue;
            }
            let mut quota = (rows.len() as f64 * resolved.rate).round() as usize;
            if quota >= rows.len() {
                // keep at least one complete row in each definition's pool
                quota = rows.len() - 1;
                warnings.push(format!(
                    "quota capped to {} for columns {:?} to keep a complete-row pool",
                    quota, def.amputed_columns
                ));
            }
            if quota == 0 {
                continue;
            }
            let selected: Vec<usize> = match resolved.mechanism {
                MissingMechanism::Mcar => {
                    let mut pool = rows.clone();
                    pool.shuffle(&mut rng);
                    pool.truncate(quota);
                    pool
                }
                MissingMechanism::Mar | MissingMechanism::Mnar => {
                    let scores: Vec<f64> = rows
                        .iter()
                        .map(|&r| {
                            (0..ds.n_cols())
                                .map(|c| {
                                    let w = def.weights[c];
                                    if w != 0.0 {
                                        w * normed.get(r, c).unwrap_or(0.0)
                                    } else {
                                        0.0
                                    }
                                })
                                .sum()
                        })
                        .collect();
                    select_biased(&rows, &scores, quota, &mut rng)
                }
            };
            for r in selected {
                for &c in &def.amputed_columns {
                    mask.set(r, c, true);
                }
            }
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let mut out = AmputedDataset::from_mask(ds, mask, resolved)?;
    out.warnings = warnings;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_blobs, BlobSpec};
    use crate::tabular::{ColumnSchema, Schema};

    fn blob(n: usize, seed: u64) -> Dataset {
        generate_blobs(&BlobSpec::uniform(n, 6, 5, 1.0, (0.0, 10.0), seed)).unwrap().0
    }

    #[test]
    fn zero_rate_leaves_everything_observed() {
        let ds = blob(100, 1);
        let spec =
            AmputationSpec::new(MissingPattern::Univariate, MissingMechanism::Mcar, 0.0, 7);
        let amp = ampute(&ds, &spec).unwrap();
        assert_eq!(amp.mask.count_missing(), 0);
        assert!(amp.data.is_complete());
    }

    #[test]
    fn mcar_univariate_rate_is_tight_at_scale() {
        let ds = blob(10_000, 2);
        let spec =
            AmputationSpec::new(MissingPattern::Univariate, MissingMechanism::Mcar, 0.5, 3);
        let amp = ampute(&ds, &spec).unwrap();
        let rate = achieved_missing_rate(&amp.mask);
        assert!((0.47..=0.53).contains(&rate), "rate {rate}");
    }

    #[test]
    fn mnar_selects_high_values() {
        // standard-Gaussian-ish column: single cluster, centered
        let ds = generate_blobs(&BlobSpec::uniform(10_000, 2, 1, 1.0, (5.0, 5.000001), 4))
            .unwrap()
            .0;
        let spec =
            AmputationSpec::new(MissingPattern::Univariate, MissingMechanism::Mnar, 0.3, 5);
        let amp = ampute(&ds, &spec).unwrap();
        let col = amp.spec.pattern_defs[0].amputed_columns[0];
        let mut masked = Vec::new();
        let mut kept = Vec::new();
        for r in 0..ds.n_rows() {
            let v = ds.get(r, col).unwrap();
            if amp.mask.get(r, col) {
                masked.push(v);
            } else {
                kept.push(v);
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let gap = mean(&masked) - mean(&kept);
        let margin = 2.0 / (masked.len() as f64).sqrt();
        assert!(gap > margin, "gap {gap} not above {margin}");
    }

    #[test]
    fn mar_scores_of_masked_rows_exceed_unmasked() {
        let ds = blob(10_000, 6);
        let spec = AmputationSpec::new(MissingPattern::Univariate, MissingMechanism::Mar, 0.3, 8);
        let amp = ampute(&ds, &spec).unwrap();
        let def = &amp.spec.pattern_defs[0];
        let score = |r: usize| -> f64 {
            (0..ds.n_cols()).map(|c| def.weights[c] * ds.get(r, c).unwrap()).sum()
        };
        let (mut masked, mut kept) = (Vec::new(), Vec::new());
        for r in 0..ds.n_rows() {
            if amp.mask.row_has_missing(r) {
                masked.push(score(r));
            } else {
                kept.push(score(r));
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let var = |v: &[f64]| {
            let m = mean(v);
            v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
        };
        let gap = mean(&masked) - mean(&kept);
        let sigma = (var(&masked) / masked.len() as f64 + var(&kept) / kept.len() as f64).sqrt();
        assert!(gap > 3.0 * sigma, "gap {gap} below 3 sigma ({sigma})");
    }

    #[test]
    fn mcar_masking_uncorrelated_with_values() {
        let ds = blob(10_000, 9);
        for seed in 0..20u64 {
            let spec =
                AmputationSpec::new(MissingPattern::Univariate, MissingMechanism::Mcar, 0.3, seed);
            let amp = ampute(&ds, &spec).unwrap();
            for c in ds.schema().non_target_indices() {
                let vals: Vec<f64> = (0..ds.n_rows()).map(|r| ds.get(r, c).unwrap()).collect();
                let flags: Vec<f64> = (0..ds.n_rows())
                    .map(|r| if amp.mask.row_has_missing(r) { 1.0 } else { 0.0 })
                    .collect();
                let n = vals.len() as f64;
                let (mv, mf) = (
                    vals.iter().sum::<f64>() / n,
                    flags.iter().sum::<f64>() / n,
                );
                let cov: f64 =
                    vals.iter().zip(&flags).map(|(v, f)| (v - mv) * (f - mf)).sum::<f64>() / n;
                let sv = (vals.iter().map(|v| (v - mv).powi(2)).sum::<f64>() / n).sqrt();
                let sf = (flags.iter().map(|f| (f - mf).powi(2)).sum::<f64>() / n).sqrt();
                let r = cov / (sv * sf);
                assert!(r.abs() <= 0.05, "seed {seed} col {c}: |r| = {}", r.abs());
            }
        }
    }

    #[test]
    fn deterministic_mask_per_seed() {
        let ds = blob(500, 3);
        let spec = AmputationSpec::new(MissingPattern::Monotone, MissingMechanism::Mnar, 0.5, 42);
        let a = ampute(&ds, &spec).unwrap();
        let b = ampute(&ds, &spec).unwrap();
        assert_eq!(a.mask, b.mask);
        let mut other = spec.clone();
        other.seed = 43;
        let c = ampute(&ds, &other).unwrap();
        assert_ne!(a.mask, c.mask);
    }

    #[test]
    fn incomplete_input_rejected() {
        let ds = blob(10, 1);
        let spec = AmputationSpec::new(MissingPattern::Univariate, MissingMechanism::Mcar, 0.5, 1);
        let mut amp = ampute(&ds, &spec).unwrap();
        amp.data.set(0, 0, None);
        assert!(matches!(ampute(&amp.data, &spec), Err(AmputeError::IncompleteInput)));
    }

    #[test]
    fn rate_out_of_range_rejected() {
        let ds = blob(10, 1);
        for rate in [-0.1, 1.0, 1.5] {
            let spec =
                AmputationSpec::new(MissingPattern::Univariate, MissingMechanism::Mcar, rate, 1);
            assert!(matches!(ampute(&ds, &spec), Err(AmputeError::InvalidRate(_))));
        }
    }

    #[test]
    fn custom_weights_validated_against_mechanism() {
        let schema = Schema::new(vec![
            ColumnSchema::numeric("a"),
            ColumnSchema::numeric("b"),
            ColumnSchema::target("class"),
        ])
        .unwrap();
        let ds = Dataset::from_complete_rows(
            schema.clone(),
            (0..50).map(|i| vec![i as f64, (50 - i) as f64, (i % 2) as f64]).collect(),
        )
        .unwrap();
        // MAR weight on the amputed column itself is invalid
        let def = PatternDef::new(vec![0], 3).with_weights(vec![1.0, 0.0, 0.0]);
        let mut spec = AmputationSpec::new(MissingPattern::Univariate, MissingMechanism::Mar, 0.3, 1);
        spec.pattern_defs = vec![def];
        assert!(matches!(ampute(&ds, &spec), Err(AmputeError::InvalidPatternDef(_))));
        // valid MAR weights on another column
        let def = PatternDef::new(vec![0], 3).with_weights(vec![0.0, 1.0, 0.0]);
        spec.pattern_defs = vec![def];
        assert!(ampute(&ds, &spec).is_ok());
    }

    #[test]
    fn achieved_rate_counts_rows() {
        let mut mask = MissingMask::new(10, 3);
        assert_eq!(achieved_missing_rate(&mask), 0.0);
        mask.set(0, 1, true);
        mask.set(0, 2, true);
        mask.set(4, 0, true);
        mask.set(9, 2, true);
        assert_eq!(achieved_missing_rate(&mask), 0.3);
    }
}
