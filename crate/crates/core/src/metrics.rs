//! Imputation-quality metrics (NRMSE2, categorical accuracy) scored on the
//! imputed cells only, the F1-macro model metric, and factor-wise
//! aggregation of study results.
//!
//! NRMSE2 normalizes the per-column RMSE by the column's range taken over
//! the *entire original dataset*, not just the masked cells, because imputed
//! values may fall outside the masked cells' own range.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ampute::MissingMask;
use crate::pipeline::CaseResult;
use crate::tabular::{ColumnKind, Dataset};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("shape mismatch between original, imputed and mask")]
    ShapeMismatch,
    #[error("column {0} is constant in the original data; NRMSE2 is undefined")]
    ConstantColumn(usize),
    #[error("no imputed cells selected for column {0}")]
    EmptySelection(usize),
    #[error("empty input")]
    EmptyInput,
    #[error("label {0} outside 0..{1}")]
    LabelOutOfRange(usize, usize),
    #[error("column {0} has kind {1:?}, expected {2:?}")]
    WrongColumnKind(usize, ColumnKind, ColumnKind),
}

/// One masked-then-imputed cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectedCell {
    pub row: usize,
    pub original: f64,
    pub imputed: f64,
}

/// Per-column lists of the cells that were masked and then imputed. Only
/// those cells enter the quality metrics; untouched cells would dilute the
/// score in proportion to the missing rate.
#[derive(Debug, Clone, Default)]
pub struct CellSelection {
    per_column: Vec<Vec<SelectedCell>>,
}

impl CellSelection {
    pub fn column(&self, col: usize) -> &[SelectedCell] {
        &self.per_column[col]
    }

    pub fn n_cols(&self) -> usize {
        self.per_column.len()
    }

    pub fn total_cells(&self) -> usize {
        self.per_column.iter().map(|c| c.len()).sum()
    }
}

/// Pair original and imputed values for exactly the masked cells.
pub fn select_imputed_cells(
    original: &Dataset,
    imputed: &Dataset,
    mask: &MissingMask,
) -> Result<CellSelection, MetricsError> {
    let shape = (original.n_rows(), original.n_cols());
    if shape != (imputed.n_rows(), imputed.n_cols())
        || shape != (mask.n_rows(), mask.n_cols())
    {
        return Err(MetricsError::ShapeMismatch);
    }
    let mut per_column: Vec<Vec<SelectedCell>> = vec![Vec::new(); original.n_cols()];
    for r in 0..original.n_rows() {
        for (c, cells) in per_column.iter_mut().enumerate() {
            if mask.get(r, c) {
                let (Some(orig), Some(imp)) = (original.get(r, c), imputed.get(r, c)) else {
                    return Err(MetricsError::ShapeMismatch);
                };
                cells.push(SelectedCell { row: r, original: orig, imputed: imp });
            }
        }
    }
    Ok(CellSelection { per_column })
}

/// Root mean squared error over the selected cells of a numeric column,
/// normalized by the column's range over the full original dataset.
pub fn nrmse2(
    sel: &CellSelection,
    original_full: &Dataset,
    column: usize,
) -> Result<f64, MetricsError> {
    if original_full.schema().kind(column) != ColumnKind::Numeric {
        return Err(MetricsError::WrongColumnKind(
            column,
            original_full.schema().kind(column),
            ColumnKind::Numeric,
        ));
    }
    let cells = sel.column(column);
    if cells.is_empty() {
        return Err(MetricsError::EmptySelection(column));
    }
    let (lo, hi) = original_full.column_range(column).ok_or(MetricsError::EmptySelection(column))?;
    if hi <= lo {
        return Err(MetricsError::ConstantColumn(column));
    }
    let mse =
        cells.iter().map(|c| (c.imputed - c.original).powi(2)).sum::<f64>() / cells.len() as f64;
    Ok(mse.sqrt() / (hi - lo))
}

/// Fraction of selected cells whose imputed code matches the original code.
pub fn categorical_accuracy(
    sel: &CellSelection,
    schema_kind: ColumnKind,
    column: usize,
) -> Result<f64, MetricsError> {
    if schema_kind != ColumnKind::Categorical {
        return Err(MetricsError::WrongColumnKind(column, schema_kind, ColumnKind::Categorical));
    }
    let cells = sel.column(column);
    if cells.is_empty() {
        return Err(MetricsError::EmptySelection(column));
    }
    let hits = cells.iter().filter(|c| c.imputed == c.original).count();
    Ok(hits as f64 / cells.len() as f64)
}

/// Unweighted mean of per-class F1 over `n_classes` classes. A class with an
/// undefined F1 (no relevant predictions and no relevant truth) contributes 0
/// and the divisor stays `n_classes`.
pub fn f1_macro(
    truth: &[usize],
    predicted: &[usize],
    n_classes: usize,
) -> Result<f64, MetricsError> {
    if truth.is_empty() || truth.len() != predicted.len() || n_classes == 0 {
        return Err(MetricsError::EmptyInput);
    }
    for &l in truth.iter().chain(predicted) {
        if l >= n_classes {
            return Err(MetricsError::LabelOutOfRange(l, n_classes));
        }
    }
    let mut tp = vec![0usize; n_classes];
    let mut fp = vec![0usize; n_classes];
    let mut fn_ = vec![0usize; n_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        if t == p {
            tp[t] += 1;
        } else {
            fp[p] += 1;
            fn_[t] += 1;
        }
    }
    let mut sum = 0.0;
    for j in 0..n_classes {
        let precision_den = tp[j] + fp[j];
        let recall_den = tp[j] + fn_[j];
        if precision_den == 0 || recall_den == 0 {
            continue; // F1_j = 0
        }
        let precision = tp[j] as f64 / precision_den as f64;
        let recall = tp[j] as f64 / recall_den as f64;
        if precision + recall > 0.0 {
            sum += 2.0 * precision * recall / (precision + recall);
        }
    }
    Ok(sum / n_classes as f64)
}

/// Per-column imputation quality for one (case, method) pair. Columns that
/// cannot be scored (no imputed cells, or a constant original column) hold
/// `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub nrmse2: Vec<Option<f64>>,
    pub acc: Vec<Option<f64>>,
    pub counts: Vec<usize>,
}

impl MetricReport {
    /// Mean NRMSE2 over the scored numeric columns, each attribute weighted
    /// equally.
    pub fn mean_nrmse2(&self) -> Option<f64> {
        mean_of(self.nrmse2.iter().flatten().copied())
    }

    /// Mean accuracy over the scored categorical columns.
    pub fn mean_acc(&self) -> Option<f64> {
        mean_of(self.acc.iter().flatten().copied())
    }
}

fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        None
    } else {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Score every amputed column of an imputed dataset against the original.
pub fn metric_report(
    original: &Dataset,
    imputed: &Dataset,
    mask: &MissingMask,
) -> Result<MetricReport, MetricsError> {
    let sel = select_imputed_cells(original, imputed, mask)?;
    let k = original.n_cols();
    let mut report = MetricReport {
        nrmse2: vec![None; k],
        acc: vec![None; k],
        counts: (0..k).map(|c| sel.column(c).len()).collect(),
    };
    for c in 0..k {
        if sel.column(c).is_empty() {
            continue;
        }
        match original.schema().kind(c) {
            ColumnKind::Numeric => match nrmse2(&sel, original, c) {
                Ok(v) => report.nrmse2[c] = Some(v),
                Err(MetricsError::ConstantColumn(_)) => {
                    log::warn!("column {c} is constant; NRMSE2 reported as null");
                }
                Err(e) => return Err(e),
            },
            ColumnKind::Categorical => {
                report.acc[c] = Some(categorical_accuracy(&sel, ColumnKind::Categorical, c)?);
            }
        }
    }
    Ok(report)
}

/// Grouping keys for result aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    Pattern,
    Rate,
    Mechanism,
    Method,
    Strategy,
    StdDev,
    Seed,
}

impl Factor {
    pub const ALL: [Factor; 7] = [
        Factor::Pattern,
        Factor::Rate,
        Factor::Mechanism,
        Factor::Method,
        Factor::Strategy,
        Factor::StdDev,
        Factor::Seed,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Factor::Pattern => "pattern",
            Factor::Rate => "rate",
            Factor::Mechanism => "mechanism",
            Factor::Method => "method",
            Factor::Strategy => "strategy",
            Factor::StdDev => "std_dev",
            Factor::Seed => "seed",
        }
    }

    fn value_of(self, r: &CaseResult) -> Option<String> {
        match self {
            Factor::Pattern => r.pattern.map(|p| p.label().to_string()),
            Factor::Rate => r.rate.map(|x| format!("{x}")),
            Factor::Mechanism => r.mechanism.map(|m| m.label().to_string()),
            Factor::Method => Some(r.method.clone()),
            Factor::Strategy => Some(r.strategy.label().to_string()),
            Factor::StdDev => r.std_dev.map(|x| format!("{x}")),
            Factor::Seed => Some(format!("{}", r.seed)),
        }
    }
}

/// Which evaluation criterion to aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Nrmse2,
    Acc,
    F1Macro,
}

impl MetricKind {
    pub fn label(self) -> &'static str {
        match self {
            MetricKind::Nrmse2 => "nrmse2",
            MetricKind::Acc => "acc",
            MetricKind::F1Macro => "f1_macro",
        }
    }
}

/// Mean of one evaluation criterion over all results sharing a factor value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSummary {
    pub key: Factor,
    pub value: String,
    pub metric: MetricKind,
    pub mean_metric: f64,
    pub n_cases: usize,
}

/// Group results by a factor and average one criterion per group.
///
/// Imputation criteria are pooled at the attribute level: each scored column
/// of a case contributes one observation, mirroring per-attribute evaluation.
/// `n_cases` counts the contributing result rows. Results without the factor
/// value or without the metric are skipped; groups are sorted by value.
pub fn aggregate_by_factor(
    results: &[CaseResult],
    key: Factor,
    metric: MetricKind,
) -> Result<Vec<FactorSummary>, MetricsError> {
    if results.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<String, (f64, usize, usize)> = BTreeMap::new(); // sum, n_obs, n_cases
    for r in results {
        let Some(value) = key.value_of(r) else { continue };
        let observations: Vec<f64> = match metric {
            MetricKind::Nrmse2 => r
                .imputation
                .as_ref()
                .map(|rep| rep.nrmse2.iter().flatten().copied().collect())
                .unwrap_or_default(),
            MetricKind::Acc => r
                .imputation
                .as_ref()
                .map(|rep| rep.acc.iter().flatten().copied().collect())
                .unwrap_or_default(),
            MetricKind::F1Macro => r.f1_macro.into_iter().collect(),
        };
        if observations.is_empty() {
            continue;
        }
        let entry = groups.entry(value).or_insert((0.0, 0, 0));
        entry.0 += observations.iter().sum::<f64>();
        entry.1 += observations.len();
        entry.2 += 1;
    }
    Ok(groups
        .into_iter()
        .map(|(value, (sum, n_obs, n_cases))| FactorSummary {
            key,
            value,
            metric,
            mean_metric: sum / n_obs as f64,
            n_cases,
        })
        .collect())
}
