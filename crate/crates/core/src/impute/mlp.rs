//! Neural imputation with one model per missingness signature.
//!
//! Rows are grouped by their exact set of missing columns. For each group a
//! model is trained on the complete rows, mapping the group's observed
//! columns to its missing columns. A signature whose single missing column
//! is categorical gets a softmax classifier; every other signature gets a
//! multi-output regressor. Training happens in min-max normalized space and
//! predictions are mapped back.

use std::collections::BTreeMap;
use std::time::Instant;

use super::{ImputationMethod, ImputationOutcome, ImputeError, ImputeOptions};
use crate::ampute::AmputedDataset;
use crate::neural::{
    predict_classes, predict_mlp, train_mlp, Matrix, MlpTopology, TaskKind, TrainParams,
};
use crate::seeded::derive_seed;
use crate::tabular::{ColumnKind, Dataset, NormParams};

fn observed_codes(ds: &Dataset, col: usize) -> Vec<f64> {
    let mut codes: Vec<i64> = ds.observed(col).map(|v| v as i64).collect();
    codes.sort_unstable();
    codes.dedup();
    codes.into_iter().map(|c| c as f64).collect()
}

fn round_to_code(prediction: f64, codes: &[f64]) -> f64 {
    let mut best = codes[0];
    let mut best_d = (prediction - codes[0]).abs();
    for &c in &codes[1..] {
        let d = (prediction - c).abs();
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

fn column_fallback(ds: &Dataset, col: usize) -> Result<f64, ImputeError> {
    let observed: Vec<f64> = ds.observed(col).collect();
    if observed.is_empty() {
        return Err(ImputeError::AllMissingColumn(col));
    }
    Ok(match ds.schema().kind(col) {
        ColumnKind::Numeric => observed.iter().sum::<f64>() / observed.len() as f64,
        ColumnKind::Categorical => {
            let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
            for v in &observed {
                *counts.entry(*v as i64).or_insert(0) += 1;
            }
            counts
                .into_iter()
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                .map(|(code, _)| code as f64)
                .expect("non-empty")
        }
    })
}

pub fn impute_mlp(
    amp: &AmputedDataset,
    hidden_layers: &[usize],
    train: &TrainParams,
    opts: ImputeOptions,
) -> Result<ImputationOutcome, ImputeError> {
    let started = Instant::now();
    if hidden_layers.is_empty() || hidden_layers.contains(&0) {
        return Err(ImputeError::InvalidParam("hidden layer sizes must be >= 1".into()));
    }
    let ds = &amp.data;
    let complete_rows: Vec<usize> = (0..ds.n_rows()).filter(|&r| ds.row_is_complete(r)).collect();
    if complete_rows.is_empty() {
        return Err(ImputeError::EmptyCompleteSet);
    }

    // group incomplete rows by their exact missingness signature
    let mut signatures: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for r in 0..ds.n_rows() {
        if !ds.row_is_complete(r) {
            signatures.entry(amp.mask.row_signature(r).to_vec()).or_default().push(r);
        }
    }

    // model space: min-max over the complete training subset, all columns
    let x_o = ds.select_rows(&complete_rows);
    let scaler = NormParams::fit_all_columns(&x_o);
    let scale = |col: usize, v: f64| crate::tabular::normalize_value(&scaler, col, v);
    let unscale = |col: usize, v: f64| crate::tabular::denormalize_value(&scaler, col, v);

    let mut out = ds.clone();
    let mut warnings = Vec::new();
    for (sig_index, (signature, rows)) in signatures.into_iter().enumerate() {
        let outputs: Vec<usize> =
            (0..ds.n_cols()).filter(|&c| signature[c]).collect();
        let inputs: Vec<usize> = (0..ds.n_cols())
            .filter(|&c| {
                !signature[c] && (opts.use_target || c != ds.schema().target_index())
            })
            .collect();
        if inputs.is_empty() {
            warnings.push(format!(
                "signature {signature:?} has no usable input columns; falling back to column statistics"
            ));
            for &r in &rows {
                for &c in &outputs {
                    out.set(r, c, Some(column_fallback(ds, c)?));
                }
            }
            continue;
        }

        let gather = |row_ids: &[usize], cols: &[usize], scaled: bool| -> Matrix {
            let mut m = Matrix::zeros(row_ids.len(), cols.len());
            for (i, &r) in row_ids.iter().enumerate() {
                for (j, &c) in cols.iter().enumerate() {
                    let v = ds.get(r, c).expect("cell observed");
                    m.set(i, j, if scaled { scale(c, v) } else { v });
                }
            }
            m
        };
        let x_train = gather(&complete_rows, &inputs, true);
        let x_pred = gather(&rows, &inputs, true);
        let seed = derive_seed(train.seed, sig_index as u64);
        let params = TrainParams { seed, ..*train };

        let single_categorical = outputs.len() == 1
            && ds.schema().kind(outputs[0]) == ColumnKind::Categorical;
        if single_categorical {
            let col = outputs[0];
            let codes = observed_codes(&x_o, col);
            if codes.is_empty() {
                return Err(ImputeError::AllMissingColumn(col));
            }
            let mut y = Matrix::zeros(complete_rows.len(), 1);
            for (i, &r) in complete_rows.iter().enumerate() {
                let v = ds.get(r, col).expect("complete row");
                let class = codes.iter().position(|&c| c == v).expect("code in support");
                y.set(i, 0, class as f64);
            }
            let topology = MlpTopology::custom(inputs.len(), hidden_layers.to_vec(), codes.len());
            let model = train_mlp(&topology, TaskKind::Classification, &x_train, &y, &params)?;
            let predicted = predict_classes(&model, &x_pred)?;
            for (&r, &class) in rows.iter().zip(&predicted) {
                out.set(r, col, Some(codes[class]));
            }
        } else {
            let mut y = Matrix::zeros(complete_rows.len(), outputs.len());
            for (i, &r) in complete_rows.iter().enumerate() {
                for (j, &c) in outputs.iter().enumerate() {
                    y.set(i, j, scale(c, ds.get(r, c).expect("complete row")));
                }
            }
            let topology =
                MlpTopology::custom(inputs.len(), hidden_layers.to_vec(), outputs.len());
            let model = train_mlp(&topology, TaskKind::Regression, &x_train, &y, &params)?;
            let predicted = predict_mlp(&model, &x_pred)?;
            let code_support: Vec<Option<Vec<f64>>> = outputs
                .iter()
                .map(|&c| match ds.schema().kind(c) {
                    ColumnKind::Categorical => Some(observed_codes(ds, c)),
                    ColumnKind::Numeric => None,
                })
                .collect();
            for (i, &r) in rows.iter().enumerate() {
                for (j, &c) in outputs.iter().enumerate() {
                    let raw = unscale(c, predicted.get(i, j));
                    let value = match &code_support[j] {
                        Some(codes) if !codes.is_empty() => round_to_code(raw, codes),
                        _ => raw,
                    };
                    out.set(r, c, Some(value));
                }
            }
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let mut outcome = ImputationOutcome::new(
        out,
        ImputationMethod::MultipleMlp { hidden_layers: hidden_layers.to_vec() },
        started,
    );
    outcome.warnings = warnings;
    Ok(outcome)
}
