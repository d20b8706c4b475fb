//! K-nearest-neighbor imputation.
//!
//! Donors are the complete rows. Distance is Euclidean over the incomplete
//! row's observed *numeric* columns in min-max normalized space; categorical
//! codes carry no metric structure and are excluded. Missing numeric cells
//! take the donor mean, missing categorical cells the donor mode.

use std::time::Instant;

use super::{ImputationMethod, ImputationOutcome, ImputeError};
use crate::ampute::AmputedDataset;
use crate::tabular::{normalize, ColumnKind, NormParams};

pub fn impute_knn(amp: &AmputedDataset, k: usize) -> Result<ImputationOutcome, ImputeError> {
    let started = Instant::now();
    if k == 0 {
        return Err(ImputeError::InvalidParam("knn needs k >= 1".into()));
    }
    let ds = &amp.data;
    let donors: Vec<usize> = (0..ds.n_rows()).filter(|&r| ds.row_is_complete(r)).collect();
    if donors.is_empty() {
        return Err(ImputeError::NoDonors);
    }
    let mut warnings = Vec::new();
    let effective_k = if donors.len() < k {
        warnings.push(format!("k shrunk from {k} to {} available donors", donors.len()));
        donors.len()
    } else {
        k
    };

    // distances in normalized space, fitted on the observed cells
    let (normed, _) = normalize(ds, Some(&NormParams::fit(ds)));
    let numeric: Vec<bool> =
        (0..ds.n_cols()).map(|c| ds.schema().kind(c) == ColumnKind::Numeric).collect();

    let mut out = ds.clone();
    let mut warned_no_numeric = false;
    for r in 0..ds.n_rows() {
        if ds.row_is_complete(r) {
            continue;
        }
        let observed_numeric: Vec<usize> = (0..ds.n_cols())
            .filter(|&c| numeric[c] && normed.get(r, c).is_some())
            .collect();
        if observed_numeric.is_empty() && !warned_no_numeric {
            warnings.push(format!(
                "row {r} has no observed numeric columns; all donors are equidistant"
            ));
            warned_no_numeric = true;
        }
        let mut ranked: Vec<(f64, usize)> = donors
            .iter()
            .map(|&d| {
                let dist: f64 = observed_numeric
                    .iter()
                    .map(|&c| {
                        let a = normed.get(r, c).expect("observed");
                        let b = normed.get(d, c).expect("donor complete");
                        (a - b) * (a - b)
                    })
                    .sum();
                (dist, d)
            })
            .collect();
        // ties at the k-th distance resolve to the lowest row index
        ranked.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("no NaN distances").then(a.1.cmp(&b.1)));
        let neighbors = &ranked[..effective_k];
        for c in 0..ds.n_cols() {
            if !amp.mask.get(r, c) {
                continue;
            }
            let values = neighbors.iter().map(|&(_, d)| ds.get(d, c).expect("donor complete"));
            let fill = match ds.schema().kind(c) {
                ColumnKind::Numeric => {
                    let v: Vec<f64> = values.collect();
                    v.iter().sum::<f64>() / v.len() as f64
                }
                ColumnKind::Categorical => {
                    let mut counts: std::collections::BTreeMap<i64, usize> = Default::default();
                    for v in values {
                        *counts.entry(v as i64).or_insert(0) += 1;
                    }
                    counts
                        .into_iter()
                        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                        .map(|(code, _)| code as f64)
                        .expect("k >= 1 donors")
                }
            };
            out.set(r, c, Some(fill));
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let mut outcome = ImputationOutcome::new(out, ImputationMethod::Knn { k }, started);
    outcome.warnings = warnings;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ampute::{ampute, AmputationSpec, AmputedDataset, MissingMask, MissingMechanism, MissingPattern};
    use crate::synth::{generate_blobs, BlobSpec};
    use crate::tabular::{ColumnSchema, Dataset, Schema};

    fn schema() -> Schema {
        Schema::new(vec![
            ColumnSchema::numeric("a"),
            ColumnSchema::numeric("b"),
            ColumnSchema::target("class"),
        ])
        .unwrap()
    }

    fn amputed(rows: Vec<Vec<f64>>, masked: &[(usize, usize)]) -> AmputedDataset {
        let ds = Dataset::from_complete_rows(schema(), rows).unwrap();
        let mut mask = MissingMask::new(ds.n_rows(), ds.n_cols());
        for &(r, c) in masked {
            mask.set(r, c, true);
        }
        let spec = AmputationSpec::new(MissingPattern::General, MissingMechanism::Mcar, 0.3, 0);
        AmputedDataset::from_mask(&ds, mask, spec).unwrap()
    }

    #[test]
    fn zero_distance_donor_is_copied_with_k1() {
        let amp = amputed(
            vec![
                vec![1.0, 10.0, 0.0],
                vec![5.0, 77.0, 1.0],
                vec![1.0, 0.0, 0.0], // same observed "a" as row 0
            ],
            &[(2, 1)],
        );
        let out = impute_knn(&amp, 1).unwrap();
        assert_eq!(out.data.get(2, 1), Some(10.0));
    }

    #[test]
    fn equidistant_donors_average() {
        let amp = amputed(
            vec![
                vec![2.0, 10.0, 0.0],
                vec![4.0, 20.0, 0.0],
                vec![3.0, 0.0, 1.0], // equidistant to both donors on "a"
            ],
            &[(2, 1)],
        );
        let out = impute_knn(&amp, 2).unwrap();
        assert_eq!(out.data.get(2, 1), Some(15.0));
    }

    #[test]
    fn donor_shortage_shrinks_k_with_warning() {
        let amp = amputed(
            vec![vec![1.0, 10.0, 0.0], vec![1.5, 0.0, 0.0]],
            &[(1, 1)],
        );
        let out = impute_knn(&amp, 5).unwrap();
        assert_eq!(out.data.get(1, 1), Some(10.0));
        assert!(!out.warnings.is_empty());
    }

    #[test]
    fn no_donors_is_an_error() {
        let amp = amputed(vec![vec![1.0, 10.0, 0.0], vec![2.0, 20.0, 0.0]], &[(0, 0), (1, 1)]);
        assert!(matches!(impute_knn(&amp, 1), Err(ImputeError::NoDonors)));
    }

    #[test]
    fn tight_clusters_impute_within_cluster() {
        // std far below center separation: imputed values should land in the
        // row's own cluster range almost always
        let spec = BlobSpec::uniform(2_000, 4, 4, 0.2, (0.0, 100.0), 17);
        let (ds, _) = generate_blobs(&spec).unwrap();
        let case = AmputationSpec::new(MissingPattern::Univariate, MissingMechanism::Mcar, 0.3, 21);
        let amp = ampute(&ds, &case).unwrap();
        let out = impute_knn(&amp, 5).unwrap();

        // per-cluster per-column min/max from the original data
        let n_clusters = 4;
        let mut lo = vec![vec![f64::INFINITY; ds.n_cols()]; n_clusters];
        let mut hi = vec![vec![f64::NEG_INFINITY; ds.n_cols()]; n_clusters];
        for r in 0..ds.n_rows() {
            let cl = ds.get(r, 4).unwrap() as usize;
            for c in 0..4 {
                let v = ds.get(r, c).unwrap();
                lo[cl][c] = lo[cl][c].min(v);
                hi[cl][c] = hi[cl][c].max(v);
            }
        }
        let mut total = 0;
        let mut inside = 0;
        for r in 0..ds.n_rows() {
            let cl = ds.get(r, 4).unwrap() as usize;
            for c in 0..4 {
                if amp.mask.get(r, c) {
                    total += 1;
                    let v = out.data.get(r, c).unwrap();
                    if v >= lo[cl][c] && v <= hi[cl][c] {
                        inside += 1;
                    }
                }
            }
        }
        assert!(total > 100);
        let frac = inside as f64 / total as f64;
        assert!(frac >= 0.95, "only {frac:.3} of imputed cells inside their cluster range");
    }
}
