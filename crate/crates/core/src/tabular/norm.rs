//! Min-max normalization of numeric columns into `[0, 1]`.
//!
//! Parameters fitted on one dataset may be applied to another, in which case
//! values can fall outside `[0, 1]`. Constant columns map to 0.

use serde::{Deserialize, Serialize};

use super::{ColumnKind, Dataset, TabularError};

/// Observed min/max per column; columns without an entry pass through
/// normalization unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormParams {
    per_col: Vec<Option<(f64, f64)>>,
}

impl NormParams {
    /// Fit on the numeric columns of `ds`, ignoring missing cells.
    pub fn fit(ds: &Dataset) -> Self {
        Self::fit_columns(ds, |c| ds.schema().kind(c) == ColumnKind::Numeric)
    }

    /// Fit on every column, treating categorical codes as plain numbers.
    /// Used to bring model inputs onto a common scale; not part of the
    /// dataset-level normalization contract.
    pub fn fit_all_columns(ds: &Dataset) -> Self {
        Self::fit_columns(ds, |_| true)
    }

    fn fit_columns(ds: &Dataset, include: impl Fn(usize) -> bool) -> Self {
        let per_col = (0..ds.n_cols())
            .map(|c| if include(c) { ds.column_range(c) } else { None })
            .collect();
        Self { per_col }
    }

    pub fn range(&self, col: usize) -> Option<(f64, f64)> {
        self.per_col.get(col).copied().flatten()
    }

    pub fn n_cols(&self) -> usize {
        self.per_col.len()
    }
}

/// Map each parameterized column through `(x - min) / (max - min)`.
///
/// With `params = None` the parameters are fitted on `ds` first; the fitted
/// (or given) parameters are returned alongside the transformed data.
pub fn normalize(ds: &Dataset, params: Option<&NormParams>) -> (Dataset, NormParams) {
    let fitted = match params {
        Some(p) => p.clone(),
        None => NormParams::fit(ds),
    };
    let mut out = ds.clone();
    for c in 0..ds.n_cols() {
        if let Some((lo, hi)) = fitted.range(c) {
            let span = hi - lo;
            for r in 0..ds.n_rows() {
                if let Some(v) = ds.get(r, c) {
                    let t = if span > 0.0 { (v - lo) / span } else { 0.0 };
                    out.set(r, c, Some(t));
                }
            }
        }
    }
    (out, fitted)
}

/// Inverse of [`normalize`]. Every numeric column must have parameters.
pub fn denormalize(ds: &Dataset, params: &NormParams) -> Result<Dataset, TabularError> {
    for c in 0..ds.n_cols() {
        if ds.schema().kind(c) == ColumnKind::Numeric && params.range(c).is_none() {
            return Err(TabularError::MissingParams(c));
        }
    }
    let mut out = ds.clone();
    for c in 0..ds.n_cols() {
        if let Some((lo, hi)) = params.range(c) {
            let span = hi - lo;
            for r in 0..ds.n_rows() {
                if let Some(v) = ds.get(r, c) {
                    out.set(r, c, Some(lo + v * span));
                }
            }
        }
    }
    Ok(out)
}

/// Denormalize a single value of one column.
pub fn denormalize_value(params: &NormParams, col: usize, v: f64) -> f64 {
    match params.range(col) {
        Some((lo, hi)) => lo + v * (hi - lo),
        None => v,
    }
}

/// Normalize a single value of one column.
pub fn normalize_value(params: &NormParams, col: usize, v: f64) -> f64 {
    match params.range(col) {
        Some((lo, hi)) if hi > lo => (v - lo) / (hi - lo),
        Some(_) => 0.0,
        None => v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{ColumnSchema, Schema};

    fn ds(values: &[f64]) -> Dataset {
        let schema =
            Schema::new(vec![ColumnSchema::numeric("x"), ColumnSchema::target("class")]).unwrap();
        Dataset::from_complete_rows(schema, values.iter().map(|&v| vec![v, 0.0]).collect()).unwrap()
    }

    fn col(ds: &Dataset) -> Vec<f64> {
        ds.observed(0).collect()
    }

    #[test]
    fn fit_maps_into_unit_interval() {
        let (out, params) = normalize(&ds(&[0.0, 5.0, 10.0]), None);
        assert_eq!(col(&out), vec![0.0, 0.5, 1.0]);
        assert_eq!(params.range(0), Some((0.0, 10.0)));
        assert_eq!(params.range(1), None);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let (out, _) = normalize(&ds(&[7.0, 7.0, 7.0]), None);
        assert_eq!(col(&out), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn external_params_can_leave_unit_interval() {
        let input = ds(&[2.0, 4.0]);
        let mut params = NormParams::fit(&ds(&[0.0, 8.0]));
        // same column layout, fitted on other data
        let (out, _) = normalize(&input, Some(&params));
        assert_eq!(col(&out), vec![0.25, 0.5]);
        params = NormParams::fit(&ds(&[0.0, 10.0]));
        let denorm = denormalize(&ds(&[1.2]), &params).unwrap();
        assert!((col(&denorm)[0] - 12.0).abs() < 1e-12);
    }

    #[test]
    fn denormalize_requires_numeric_params() {
        let input = ds(&[1.0]);
        let empty = NormParams { per_col: vec![None, None] };
        assert!(matches!(denormalize(&input, &empty), Err(TabularError::MissingParams(0))));
    }

    #[test]
    fn round_trip_is_identity() {
        let input = ds(&[3.0, -1.5, 9.25, 4.0]);
        let (normed, params) = normalize(&input, None);
        let back = denormalize(&normed, &params).unwrap();
        for (a, b) in col(&input).iter().zip(col(&back)) {
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }
}
