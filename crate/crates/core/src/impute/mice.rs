//! Chained-equations imputation: initialize with column statistics, then
//! repeatedly regress each incomplete column on all others (ridge-damped
//! least squares) and re-predict its missing cells until the imputed values
//! stop moving or the sweep budget runs out.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use super::{ImputationMethod, ImputationOutcome, ImputeError, ImputeOptions};
use crate::ampute::AmputedDataset;
use crate::tabular::{ColumnKind, Dataset};

const RIDGE_LAMBDA: f64 = 1e-6;

/// Distinct observed codes of a categorical column, ascending.
fn observed_codes(ds: &Dataset, col: usize) -> Vec<f64> {
    let mut codes: Vec<i64> = ds.observed(col).map(|v| v as i64).collect();
    codes.sort_unstable();
    codes.dedup();
    codes.into_iter().map(|c| c as f64).collect()
}

/// Nearest observed code; ties resolve to the lower code.
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

/// Least squares with an intercept and ridge damping on the normal equations.
fn fit_predict(
    x_train: &[Vec<f64>],
    y_train: &[f64],
    x_pred: &[Vec<f64>],
) -> Result<Vec<f64>, ImputeError> {
    let n = x_train.len();
    let p = x_train[0].len() + 1; // + intercept
    let mut design = DMatrix::zeros(n, p);
    for (r, row) in x_train.iter().enumerate() {
        design[(r, 0)] = 1.0;
        for (c, &v) in row.iter().enumerate() {
            design[(r, c + 1)] = v;
        }
    }
    let y = DVector::from_column_slice(y_train);
    let xtx = design.transpose() * &design + DMatrix::identity(p, p) * RIDGE_LAMBDA;
    let xty = design.transpose() * y;
    let beta = xtx
        .clone()
        .cholesky()
        .map(|ch| ch.solve(&xty))
        .or_else(|| xtx.lu().solve(&xty))
        .ok_or(ImputeError::SingularSystem)?;
    Ok(x_pred
        .iter()
        .map(|row| beta[0] + row.iter().enumerate().map(|(c, &v)| beta[c + 1] * v).sum::<f64>())
        .collect())
}

pub fn impute_mice(
    amp: &AmputedDataset,
    max_iter: usize,
    tol: f64,
    opts: ImputeOptions,
) -> Result<ImputationOutcome, ImputeError> {
    let started = Instant::now();
    if max_iter == 0 {
        return Err(ImputeError::InvalidParam("mice needs max_iter >= 1".into()));
    }
    let ds = &amp.data;
    let k = ds.n_cols();
    let target = ds.schema().target_index();

    // columns with any missing cells, visited in ascending missing count
    let mut incomplete: Vec<(usize, usize)> = (0..k)
        .filter_map(|c| {
            let missing = (0..ds.n_rows()).filter(|&r| amp.mask.get(r, c)).count();
            (missing > 0).then_some((missing, c))
        })
        .collect();
    incomplete.sort_unstable();
    let visit_order: Vec<usize> = incomplete.iter().map(|&(_, c)| c).collect();

    let codes_per_col: Vec<Option<Vec<f64>>> = (0..k)
        .map(|c| match ds.schema().kind(c) {
            ColumnKind::Categorical => {
                let codes = observed_codes(ds, c);
                (!codes.is_empty()).then_some(codes)
            }
            ColumnKind::Numeric => None,
        })
        .collect();

    // init: column mean for numerics, mean rounded to an observed code for
    // categoricals
    let mut work = ds.clone();
    for &c in &visit_order {
        let observed: Vec<f64> = ds.observed(c).collect();
        if observed.is_empty() {
            return Err(ImputeError::AllMissingColumn(c));
        }
        let mean = observed.iter().sum::<f64>() / observed.len() as f64;
        let fill = match &codes_per_col[c] {
            Some(codes) => round_to_code(mean, codes),
            None => mean,
        };
        for r in 0..ds.n_rows() {
            if amp.mask.get(r, c) {
                work.set(r, c, Some(fill));
            }
        }
    }

    if visit_order.is_empty() {
        return Ok(ImputationOutcome::new(
            work,
            ImputationMethod::Mice { max_iter, tol },
            started,
        ));
    }

    let predictors_for = |col: usize| -> Vec<usize> {
        (0..k).filter(|&c| c != col && (opts.use_target || c != target)).collect()
    };

    for _ in 0..max_iter {
        let mut max_change: f64 = 0.0;
        for &col in &visit_order {
            let predictors = predictors_for(col);
            if predictors.is_empty() {
                continue;
            }
            let train_rows: Vec<usize> =
                (0..ds.n_rows()).filter(|&r| !amp.mask.get(r, col)).collect();
            let pred_rows: Vec<usize> =
                (0..ds.n_rows()).filter(|&r| amp.mask.get(r, col)).collect();
            let gather = |rows: &[usize]| -> Vec<Vec<f64>> {
                rows.iter()
                    .map(|&r| {
                        predictors
                            .iter()
                            .map(|&c| work.get(r, c).expect("work matrix complete"))
                            .collect()
                    })
                    .collect()
            };
            let x_train = gather(&train_rows);
            let y_train: Vec<f64> =
                train_rows.iter().map(|&r| work.get(r, col).expect("observed")).collect();
            let x_pred = gather(&pred_rows);
            let predictions = fit_predict(&x_train, &y_train, &x_pred)?;
            for (&r, &raw) in pred_rows.iter().zip(&predictions) {
                let value = match &codes_per_col[col] {
                    Some(codes) => round_to_code(raw, codes),
                    None => raw,
                };
                let previous = work.get(r, col).expect("initialized");
                max_change = max_change.max((value - previous).abs());
                work.set(r, col, Some(value));
            }
        }
        if max_change < tol {
            break;
        }
    }
    Ok(ImputationOutcome::new(work, ImputationMethod::Mice { max_iter, tol }, started))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ampute::{AmputationSpec, AmputedDataset, MissingMask, MissingMechanism, MissingPattern};
    use crate::tabular::{ColumnSchema, Schema};

    fn amputed(rows: Vec<Vec<f64>>, masked: &[(usize, usize)]) -> AmputedDataset {
        let schema = Schema::new(vec![
            ColumnSchema::numeric("x"),
            ColumnSchema::numeric("y"),
            ColumnSchema::target("class"),
        ])
        .unwrap();
        let ds = Dataset::from_complete_rows(schema, rows).unwrap();
        let mut mask = MissingMask::new(ds.n_rows(), ds.n_cols());
        for &(r, c) in masked {
            mask.set(r, c, true);
        }
        let spec = AmputationSpec::new(MissingPattern::General, MissingMechanism::Mcar, 0.3, 0);
        AmputedDataset::from_mask(&ds, mask, spec).unwrap()
    }

    #[test]
    fn exact_linear_tie_is_recovered() {
        // y = 2x with x fully observed; missing y must come back as 2x
        let rows: Vec<Vec<f64>> =
            (0..40).map(|i| vec![i as f64, 2.0 * i as f64, (i % 2) as f64]).collect();
        let masked: Vec<(usize, usize)> = (0..10).map(|i| (i * 4 + 1, 1)).collect();
        let amp = amputed(rows, &masked);
        let out = impute_mice(&amp, 10, 1e-9, ImputeOptions::default()).unwrap();
        for &(r, _) in &masked {
            let x = amp.data.get(r, 0).unwrap();
            let y = out.data.get(r, 1).unwrap();
            assert!((y - 2.0 * x).abs() < 1e-6, "row {r}: {y} vs {}", 2.0 * x);
        }
    }

    #[test]
    fn no_missing_cells_is_identity() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, i as f64, 0.0]).collect();
        let amp = amputed(rows, &[]);
        let out = impute_mice(&amp, 10, 1e-4, ImputeOptions::default()).unwrap();
        assert_eq!(out.data, amp.data);
    }

    #[test]
    fn infinite_tol_stops_after_one_sweep() {
        // with tol = infinity the first sweep must be the last: the outcome
        // equals a hand-rolled single sweep
        let rows: Vec<Vec<f64>> =
            (0..30).map(|i| vec![i as f64, (i * i) as f64 * 0.1, (i % 2) as f64]).collect();
        let masked: Vec<(usize, usize)> = vec![(3, 1), (7, 1), (21, 1)];
        let amp = amputed(rows.clone(), &masked);
        let one = impute_mice(&amp, 50, f64::INFINITY, ImputeOptions::default()).unwrap();
        let hand = impute_mice(&amp, 1, 0.0, ImputeOptions::default()).unwrap();
        assert_eq!(one.data, hand.data);
    }

    #[test]
    fn categorical_predictions_round_to_observed_codes() {
        let schema = Schema::new(vec![
            ColumnSchema::numeric("x"),
            ColumnSchema::categorical("c"),
            ColumnSchema::target("class"),
        ])
        .unwrap();
        // c tracks x: low x -> code 0, high x -> code 3 (code support {0, 3})
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let x = i as f64;
                vec![x, if x < 20.0 { 0.0 } else { 3.0 }, (i % 2) as f64]
            })
            .collect();
        let ds = Dataset::from_complete_rows(schema, rows).unwrap();
        let mut mask = MissingMask::new(ds.n_rows(), ds.n_cols());
        mask.set(2, 1, true);
        mask.set(35, 1, true);
        let spec = AmputationSpec::new(MissingPattern::General, MissingMechanism::Mcar, 0.1, 0);
        let amp = AmputedDataset::from_mask(&ds, mask, spec).unwrap();
        let out = impute_mice(&amp, 10, 1e-6, ImputeOptions::default()).unwrap();
        assert_eq!(out.data.get(2, 1), Some(0.0));
        assert_eq!(out.data.get(35, 1), Some(3.0));
    }
}
