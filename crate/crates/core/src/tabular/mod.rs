//! Tabular data model: typed columns, ordinal categorical encoding, min-max
//! normalization and seeded train/test/validation splitting.
//!
//! A [`Dataset`] stores cells as `Option<f64>`: numeric columns hold raw
//! values, categorical columns hold non-negative integer codes assigned by
//! an [`EncodingMap`] in first-appearance order, and `None` marks a missing
//! cell. Data loaded from a complete source has no `None` cells; masking is
//! done by the amputation module.

mod csv_io;
mod encode;
mod norm;
mod split;

pub use csv_io::{infer_schema, load_csv, load_csv_allow_missing, write_csv};
pub use encode::EncodingMap;
pub use norm::{denormalize, denormalize_value, normalize, normalize_value, NormParams};
pub use split::{split_dataset, SplitIndices};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TabularError {
    #[error("schema must contain exactly one target column, found {0}")]
    TargetCount(usize),
    #[error("target column {0:?} must be categorical")]
    TargetNotCategorical(String),
    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),
    #[error("schema has no columns")]
    EmptySchema,
    #[error("csv header does not match schema (expected {expected:?}, got {got:?})")]
    MissingHeader { expected: Vec<String>, got: Vec<String> },
    #[error("cell at row {row}, column {col} cannot be parsed: {value:?}")]
    UnparsableCell { row: usize, col: usize, value: String },
    #[error("cell at row {row}, column {col} is empty; input data must be complete")]
    EmptyCell { row: usize, col: usize },
    #[error("row {row} has {got} cells, expected {expected}")]
    RowLength { row: usize, expected: usize, got: usize },
    #[error("categorical code {value} at row {row}, column {col} is not a non-negative integer")]
    InvalidCode { row: usize, col: usize, value: f64 },
    #[error("unknown label {label:?} for column {col}")]
    UnknownLabel { col: usize, label: String },
    #[error("split fractions must be positive and sum to 1, got {0:?}")]
    FractionSumInvalid([f64; 3]),
    #[error("no normalization parameters for numeric column {0}")]
    MissingParams(usize),
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
}

/// Whether a column holds raw numeric values or ordinal category codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

/// Name, kind and target flag of a single column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    #[serde(default)]
    pub is_target: bool,
}

impl ColumnSchema {
    pub fn numeric(name: &str) -> Self {
        Self { name: name.to_string(), kind: ColumnKind::Numeric, is_target: false }
    }

    pub fn categorical(name: &str) -> Self {
        Self { name: name.to_string(), kind: ColumnKind::Categorical, is_target: false }
    }

    pub fn target(name: &str) -> Self {
        Self { name: name.to_string(), kind: ColumnKind::Categorical, is_target: true }
    }
}

/// Validated column list: exactly one target column and it is categorical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ColumnSchema>", into = "Vec<ColumnSchema>")]
pub struct Schema {
    columns: Vec<ColumnSchema>,
    target: usize,
}

impl Schema {
    pub fn new(columns: Vec<ColumnSchema>) -> Result<Self, TabularError> {
        if columns.is_empty() {
            return Err(TabularError::EmptySchema);
        }
        let mut seen = std::collections::HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(TabularError::DuplicateColumn(c.name.clone()));
            }
        }
        let targets: Vec<usize> = columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_target)
            .map(|(i, _)| i)
            .collect();
        if targets.len() != 1 {
            return Err(TabularError::TargetCount(targets.len()));
        }
        let target = targets[0];
        if columns[target].kind != ColumnKind::Categorical {
            return Err(TabularError::TargetNotCategorical(columns[target].name.clone()));
        }
        Ok(Self { columns, target })
    }

    pub fn columns(&self) -> &[ColumnSchema] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn target_index(&self) -> usize {
        self.target
    }

    pub fn kind(&self, col: usize) -> ColumnKind {
        self.columns[col].kind
    }

    pub fn name(&self, col: usize) -> &str {
        &self.columns[col].name
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Column indices that may be amputed or used as model features.
    pub fn non_target_indices(&self) -> Vec<usize> {
        (0..self.columns.len()).filter(|&i| i != self.target).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }
}

impl TryFrom<Vec<ColumnSchema>> for Schema {
    type Error = TabularError;
    fn try_from(v: Vec<ColumnSchema>) -> Result<Self, Self::Error> {
        Schema::new(v)
    }
}

impl From<Schema> for Vec<ColumnSchema> {
    fn from(s: Schema) -> Self {
        s.columns
    }
}

/// Row-major cell matrix with its schema. `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    cells: Vec<Option<f64>>,
    n_rows: usize,
}

impl Dataset {
    /// Build from rows that may contain missing cells. Categorical codes are
    /// checked to be non-negative integers.
    pub fn from_rows(schema: Schema, rows: Vec<Vec<Option<f64>>>) -> Result<Self, TabularError> {
        let k = schema.len();
        let mut cells = Vec::with_capacity(rows.len() * k);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(TabularError::RowLength { row: r, expected: k, got: row.len() });
            }
            for (c, &v) in row.iter().enumerate() {
                if let Some(x) = v {
                    if schema.kind(c) == ColumnKind::Categorical
                        && (x < 0.0 || x.fract() != 0.0 || !x.is_finite())
                    {
                        return Err(TabularError::InvalidCode { row: r, col: c, value: x });
                    }
                }
                cells.push(v);
            }
        }
        let n_rows = rows.len();
        Ok(Self { schema, cells, n_rows })
    }

    /// Build from complete rows.
    pub fn from_complete_rows(schema: Schema, rows: Vec<Vec<f64>>) -> Result<Self, TabularError> {
        let wrapped = rows
            .into_iter()
            .map(|r| r.into_iter().map(Some).collect())
            .collect();
        Self::from_rows(schema, wrapped)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.schema.len()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.cells[row * self.schema.len() + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Option<f64>) {
        let k = self.schema.len();
        self.cells[row * k + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Option<f64>] {
        let k = self.schema.len();
        &self.cells[row * k..(row + 1) * k]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = Option<f64>> + '_ {
        (0..self.n_rows).map(move |r| self.get(r, col))
    }

    /// Observed (non-missing) values of a column.
    pub fn observed(&self, col: usize) -> impl Iterator<Item = f64> + '_ {
        self.column(col).flatten()
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(|c| c.is_some())
    }

    pub fn row_is_complete(&self, row: usize) -> bool {
        self.row(row).iter().all(|c| c.is_some())
    }

    /// Min and max of a column's observed values, if any are present.
    pub fn column_range(&self, col: usize) -> Option<(f64, f64)> {
        let mut range: Option<(f64, f64)> = None;
        for v in self.observed(col) {
            range = Some(match range {
                None => (v, v),
                Some((lo, hi)) => (lo.min(v), hi.max(v)),
            });
        }
        range
    }

    /// New dataset containing only the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let k = self.schema.len();
        let mut cells = Vec::with_capacity(rows.len() * k);
        for &r in rows {
            cells.extend_from_slice(self.row(r));
        }
        Dataset { schema: self.schema.clone(), cells, n_rows: rows.len() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_col_schema() -> Schema {
        Schema::new(vec![ColumnSchema::numeric("age"), ColumnSchema::target("class")]).unwrap()
    }

    #[test]
    fn schema_requires_single_categorical_target() {
        let err = Schema::new(vec![ColumnSchema::numeric("a"), ColumnSchema::numeric("b")]);
        assert!(matches!(err, Err(TabularError::TargetCount(0))));

        let err = Schema::new(vec![ColumnSchema::target("a"), ColumnSchema::target("b")]);
        assert!(matches!(err, Err(TabularError::TargetCount(2))));

        let mut bad = ColumnSchema::numeric("y");
        bad.is_target = true;
        let err = Schema::new(vec![ColumnSchema::numeric("x"), bad]);
        assert!(matches!(err, Err(TabularError::TargetNotCategorical(_))));
    }

    #[test]
    fn dataset_rejects_ragged_rows() {
        let schema = two_col_schema();
        let err = Dataset::from_complete_rows(schema, vec![vec![1.0, 0.0], vec![2.0]]);
        assert!(matches!(err, Err(TabularError::RowLength { row: 1, .. })));
    }

    #[test]
    fn dataset_rejects_fractional_codes() {
        let schema = two_col_schema();
        let err = Dataset::from_complete_rows(schema, vec![vec![1.0, 0.5]]);
        assert!(matches!(err, Err(TabularError::InvalidCode { .. })));
    }

    #[test]
    fn select_rows_reorders() {
        let schema = two_col_schema();
        let ds =
            Dataset::from_complete_rows(schema, vec![vec![1.0, 0.0], vec![2.0, 1.0], vec![3.0, 0.0]])
                .unwrap();
        let sub = ds.select_rows(&[2, 0]);
        assert_eq!(sub.n_rows(), 2);
        assert_eq!(sub.get(0, 0), Some(3.0));
        assert_eq!(sub.get(1, 0), Some(1.0));
    }
}
