//! Clustered Gaussian pseudo-data generation.
//!
//! Cluster centers are drawn uniformly inside the configured value ranges and
//! each row is an isotropic Gaussian draw around its cluster center. The
//! cluster index becomes the categorical `class` target, so downstream
//! classification has a known ground truth.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seeded::rng_from_seed;
use crate::tabular::{ColumnSchema, Dataset, EncodingMap, Schema};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid blob spec: {0}")]
    InvalidSpec(String),
}

/// Parameters for one generated dataset.
///
/// `value_ranges` holds one `(lo, hi)` pair per feature (numeric features
/// first, then categorical features). Categorical features are Gaussian draws
/// quantized into `categorical_bins` equal-width bins over their range; their
/// recoverability from the numeric columns degrades as `std_dev` grows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobSpec {
    pub n_rows: usize,
    pub n_numeric_features: usize,
    #[serde(default)]
    pub n_categorical_features: usize,
    pub n_clusters: usize,
    pub std_dev: f64,
    pub value_ranges: Vec<(f64, f64)>,
    #[serde(default = "default_bins")]
    pub categorical_bins: usize,
    pub seed: u64,
}

fn default_bins() -> usize {
    8
}

impl BlobSpec {
    /// Uniform-range spec covering the common case of identical feature ranges.
    pub fn uniform(
        n_rows: usize,
        n_numeric_features: usize,
        n_clusters: usize,
        std_dev: f64,
        range: (f64, f64),
        seed: u64,
    ) -> Self {
        Self {
            n_rows,
            n_numeric_features,
            n_categorical_features: 0,
            n_clusters,
            std_dev,
            value_ranges: vec![range; n_numeric_features],
            categorical_bins: default_bins(),
            seed,
        }
    }

    pub fn with_categorical(mut self, n: usize, range: (f64, f64)) -> Self {
        self.n_categorical_features = n;
        self.value_ranges.extend(std::iter::repeat_n(range, n));
        self
    }

    fn n_features(&self) -> usize {
        self.n_numeric_features + self.n_categorical_features
    }

    fn validate(&self) -> Result<(), SynthError> {
        if self.n_rows == 0 {
            return Err(SynthError::InvalidSpec("n_rows must be >= 1".into()));
        }
        if self.n_features() == 0 {
            return Err(SynthError::InvalidSpec("at least one feature is required".into()));
        }
        if self.n_clusters == 0 {
            return Err(SynthError::InvalidSpec("n_clusters must be >= 1".into()));
        }
        if self.std_dev.is_nan() || self.std_dev <= 0.0 {
            return Err(SynthError::InvalidSpec("std_dev must be > 0".into()));
        }
        if self.value_ranges.len() != self.n_features() {
            return Err(SynthError::InvalidSpec(format!(
                "value_ranges has {} entries, expected {}",
                self.value_ranges.len(),
                self.n_features()
            )));
        }
        if self.value_ranges.iter().any(|&(lo, hi)| hi <= lo || lo.is_nan() || hi.is_nan()) {
            return Err(SynthError::InvalidSpec("each range needs lo < hi".into()));
        }
        if self.n_categorical_features > 0 && self.categorical_bins < 2 {
            return Err(SynthError::InvalidSpec("categorical_bins must be >= 2".into()));
        }
        Ok(())
    }
}

fn draw_centers(spec: &BlobSpec, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let k = spec.n_clusters;
    let mut centers: Vec<Vec<f64>> = Vec::new();
    // Resample layouts whose closest center pair is under 2*std_dev; give up
    // after 4*k attempts and keep the last draw.
    for _ in 0..(4 * k).max(1) {
        centers = (0..k)
            .map(|_| spec.value_ranges.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect())
            .collect();
        let mut min_dist = f64::INFINITY;
        for i in 0..k {
            for j in i + 1..k {
                let dist: f64 = centers[i]
                    .iter()
                    .zip(&centers[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                min_dist = min_dist.min(dist);
            }
        }
        if min_dist >= 2.0 * spec.std_dev {
            break;
        }
    }
    centers
}

/// Generate a clustered Gaussian dataset.
///
/// Rows are assigned to clusters round-robin, so class counts are balanced
/// within one row. The returned encoding map carries the class labels
/// (`c0`, `c1`, ...) and bin labels (`b0`, ...) for categorical features.
pub fn generate_blobs(spec: &BlobSpec) -> Result<(Dataset, EncodingMap), SynthError> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let centers = draw_centers(spec, &mut rng);
    let normal = Normal::new(0.0, spec.std_dev).expect("std_dev checked positive");

    let d = spec.n_features();
    let mut columns: Vec<ColumnSchema> = Vec::with_capacity(d + 1);
    for f in 0..spec.n_numeric_features {
        columns.push(ColumnSchema::numeric(&format!("x{}", f + 1)));
    }
    for f in 0..spec.n_categorical_features {
        columns.push(ColumnSchema::categorical(&format!("cat{}", f + 1)));
    }
    columns.push(ColumnSchema::target("class"));
    let schema = Schema::new(columns).expect("generated schema is valid");

    let mut map = EncodingMap::new();
    for f in 0..spec.n_categorical_features {
        let col = spec.n_numeric_features + f;
        map = map.with_labels(col, (0..spec.categorical_bins).map(|b| format!("b{b}")).collect());
    }
    map = map.with_labels(d, (0..spec.n_clusters).map(|c| format!("c{c}")).collect());

    let mut rows = Vec::with_capacity(spec.n_rows);
    for r in 0..spec.n_rows {
        let cluster = r % spec.n_clusters;
        let mut row = Vec::with_capacity(d + 1);
        for (f, &center) in centers[cluster].iter().enumerate() {
            let v = center + normal.sample(&mut rng);
            if f < spec.n_numeric_features {
                row.push(v);
            } else {
                let (lo, hi) = spec.value_ranges[f];
                let bins = spec.categorical_bins as f64;
                let code = (((v - lo) / (hi - lo)) * bins).floor().clamp(0.0, bins - 1.0);
                row.push(code);
            }
        }
        row.push(cluster as f64);
        rows.push(row);
    }
    let ds = Dataset::from_complete_rows(schema, rows).expect("generated rows are well-formed");
    Ok((ds, map))
}

/// Person-shaped preset: the core generator ranges are mapped onto plausible
/// person attributes. Values are synthetic and carry no real-world meaning.
pub fn generate_personpseudo(
    n_rows: usize,
    std_dev: f64,
    seed: u64,
) -> Result<(Dataset, EncodingMap), SynthError> {
    let named: [(&str, (f64, f64)); 5] = [
        ("id", (1.0, 10_000.0)),
        ("age", (18.0, 80.0)),
        ("weight", (50.0, 120.0)),
        ("salary", (20_000.0, 90_000.0)),
        ("shoesize", (36.0, 48.0)),
    ];
    // Generate on a common scale, then map each feature onto its range so the
    // single isotropic std_dev stays meaningful.
    let base = BlobSpec::uniform(n_rows, named.len(), 5, std_dev, (0.0, 10.0), seed);
    let (ds, map) = generate_blobs(&base)?;
    let mut columns: Vec<ColumnSchema> =
        named.iter().map(|(name, _)| ColumnSchema::numeric(name)).collect();
    columns.push(ColumnSchema::target("class"));
    let schema = Schema::new(columns).expect("preset schema is valid");
    let rows = (0..ds.n_rows())
        .map(|r| {
            let mut row: Vec<f64> = Vec::with_capacity(named.len() + 1);
            for (c, (_, (lo, hi))) in named.iter().enumerate() {
                let v = ds.get(r, c).expect("generated data is complete");
                row.push(lo + v / 10.0 * (hi - lo));
            }
            row.push(ds.get(r, named.len()).expect("class present"));
            row
        })
        .collect();
    let out = Dataset::from_complete_rows(schema, rows).expect("mapped rows are well-formed");
    Ok((out, map))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_scale_example() {
        let spec = BlobSpec::uniform(200, 2, 5, 1.0, (0.0, 10.0), 3);
        let (ds, _) = generate_blobs(&spec).unwrap();
        assert_eq!(ds.n_rows(), 200);
        assert_eq!(ds.n_cols(), 3);
        let classes: Vec<f64> = ds.observed(2).collect();
        assert!(classes.iter().all(|&c| (0.0..5.0).contains(&c)));
    }

    #[test]
    fn tiny_dispersion_collapses_to_centers() {
        let spec = BlobSpec::uniform(100, 3, 4, 1e-6, (0.0, 10.0), 9);
        let (ds, _) = generate_blobs(&spec).unwrap();
        for cluster in 0..4 {
            for f in 0..3 {
                let vals: Vec<f64> = (0..100)
                    .filter(|r| r % 4 == cluster)
                    .map(|r| ds.get(r, f).unwrap())
                    .collect();
                let spread = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    - vals.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(spread <= 3.0 * 1e-6 * 2.0, "cluster spread {spread} too wide");
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = BlobSpec::uniform(50, 4, 3, 0.5, (0.0, 1.0), 11);
        let (a, _) = generate_blobs(&spec).unwrap();
        let (b, _) = generate_blobs(&spec).unwrap();
        assert_eq!(a, b);
        let mut other = spec.clone();
        other.seed = 12;
        let (c, _) = generate_blobs(&other).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn class_balance_within_one_row() {
        let spec = BlobSpec::uniform(103, 2, 5, 1.0, (0.0, 10.0), 1);
        let (ds, _) = generate_blobs(&spec).unwrap();
        let mut counts = [0usize; 5];
        for v in ds.observed(2) {
            counts[v as usize] += 1;
        }
        let max = counts.iter().max().unwrap();
        let min = counts.iter().min().unwrap();
        assert!(max - min <= 1, "counts {counts:?}");
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = BlobSpec::uniform(10, 2, 3, 1.0, (0.0, 1.0), 0);
        spec.std_dev = 0.0;
        assert!(matches!(generate_blobs(&spec), Err(SynthError::InvalidSpec(_))));
        let mut spec = BlobSpec::uniform(10, 2, 3, 1.0, (0.0, 1.0), 0);
        spec.value_ranges[0] = (2.0, 2.0);
        assert!(matches!(generate_blobs(&spec), Err(SynthError::InvalidSpec(_))));
        let spec = BlobSpec::uniform(10, 2, 0, 1.0, (0.0, 1.0), 0);
        assert!(matches!(generate_blobs(&spec), Err(SynthError::InvalidSpec(_))));
    }

    #[test]
    fn categorical_features_are_binned_codes() {
        let spec = BlobSpec::uniform(60, 2, 3, 0.5, (0.0, 10.0), 5).with_categorical(1, (0.0, 10.0));
        let (ds, map) = generate_blobs(&spec).unwrap();
        assert_eq!(ds.n_cols(), 4);
        for v in ds.observed(2) {
            assert!(v.fract() == 0.0 && (0.0..8.0).contains(&v));
        }
        assert_eq!(map.n_codes(2), 8);
        assert_eq!(map.decode(2, 0), Some("b0"));
    }

    #[test]
    fn personpseudo_has_named_columns() {
        let (ds, _) = generate_personpseudo(40, 1.0, 2).unwrap();
        let names = ds.schema().names();
        assert_eq!(names, vec!["id", "age", "weight", "salary", "shoesize", "class"]);
        for r in 0..ds.n_rows() {
            let age = ds.get(r, 1).unwrap();
            assert!((-40.0..150.0).contains(&age), "age {age} far outside preset range");
        }
    }
}
