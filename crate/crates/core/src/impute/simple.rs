//! Column-statistic baselines and the implicit strategies.

use std::time::Instant;

use super::{ImputationMethod, ImputationOutcome, ImputeError};
use crate::ampute::AmputedDataset;
use crate::tabular::ColumnKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimpleStrategy {
    Mean,
    Median,
    Zerofill,
}

/// Most frequent code; ties resolve to the lowest code.
fn mode(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut counts: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
    for v in values {
        *counts.entry(v as i64).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(code, _)| code as f64)
}

/// Lower-middle median: element `(n-1)/2` of the sorted values.
fn median(mut values: Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN cells"));
    Some(values[(values.len() - 1) / 2])
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Fill each missing cell with a per-column statistic: the observed mean or
/// median for numeric columns (mode for categorical ones), or a literal 0
/// for zerofill.
pub fn impute_simple(
    amp: &AmputedDataset,
    strategy: SimpleStrategy,
) -> Result<ImputationOutcome, ImputeError> {
    let started = Instant::now();
    let ds = &amp.data;
    let mut out = ds.clone();
    for c in 0..ds.n_cols() {
        let has_missing = (0..ds.n_rows()).any(|r| amp.mask.get(r, c));
        if !has_missing {
            continue;
        }
        let fill = match strategy {
            SimpleStrategy::Zerofill => 0.0,
            SimpleStrategy::Mean | SimpleStrategy::Median => {
                let observed: Vec<f64> = ds.observed(c).collect();
                if observed.is_empty() {
                    return Err(ImputeError::AllMissingColumn(c));
                }
                match ds.schema().kind(c) {
                    ColumnKind::Categorical => mode(observed.into_iter()).expect("non-empty"),
                    ColumnKind::Numeric => match strategy {
                        SimpleStrategy::Mean => mean(&observed).expect("non-empty"),
                        SimpleStrategy::Median => median(observed).expect("non-empty"),
                        SimpleStrategy::Zerofill => unreachable!(),
                    },
                }
            }
        };
        for r in 0..ds.n_rows() {
            if amp.mask.get(r, c) {
                out.set(r, c, Some(fill));
            }
        }
    }
    let method = match strategy {
        SimpleStrategy::Mean => ImputationMethod::Mean,
        SimpleStrategy::Median => ImputationMethod::Median,
        SimpleStrategy::Zerofill => ImputationMethod::Zerofill,
    };
    Ok(ImputationOutcome::new(out, method, started))
}

/// Drop incomplete rows; the outcome's `kept_rows` lists the survivors'
/// original indices.
pub fn delete_incomplete(amp: &AmputedDataset) -> Result<ImputationOutcome, ImputeError> {
    let started = Instant::now();
    let kept_rows: Vec<usize> =
        (0..amp.data.n_rows()).filter(|&r| !amp.mask.row_has_missing(r)).collect();
    if kept_rows.is_empty() {
        return Err(ImputeError::NoCompleteRows);
    }
    let data = amp.data.select_rows(&kept_rows);
    let mut outcome = ImputationOutcome::new(data, ImputationMethod::Delete, started);
    outcome.kept_rows = kept_rows;
    Ok(outcome)
}
