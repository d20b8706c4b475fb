//! Matrix plot: one horizontal line of cells per record, observed cells
//! shaded by their normalized value (darker = larger), missing cells in the
//! highlight color. Rows are ordered by the sort column, largest value at
//! the top; rows missing the sort value sink to the bottom.

use super::{PlotSpec, Svg, VizError};
use crate::ampute::MissingMask;
use crate::tabular::{ColumnKind, Dataset};

/// Row display order: descending by the sort column, ties by row index,
/// missing sort cells last.
pub fn matrix_row_order(
    ds: &Dataset,
    mask: &MissingMask,
    sort_col: usize,
) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ds.n_rows()).collect();
    order.sort_by(|&a, &b| {
        let va = if mask.get(a, sort_col) { None } else { ds.get(a, sort_col) };
        let vb = if mask.get(b, sort_col) { None } else { ds.get(b, sort_col) };
        match (va, vb) {
            (Some(x), Some(y)) => y.partial_cmp(&x).expect("no NaN cells").then(a.cmp(&b)),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => a.cmp(&b),
        }
    });
    order
}

pub fn matrix_plot(ds: &Dataset, mask: &MissingMask, spec: &PlotSpec) -> Result<String, VizError> {
    if (mask.n_rows(), mask.n_cols()) != (ds.n_rows(), ds.n_cols()) {
        return Err(VizError::ShapeMismatch);
    }
    if !spec.categorical_as_ordinal {
        for c in 0..ds.n_cols() {
            if ds.schema().kind(c) == ColumnKind::Categorical {
                return Err(VizError::NominalColumn(ds.schema().name(c).to_string()));
            }
        }
    }
    let sort_col = match &spec.sort_by {
        Some(name) => ds
            .schema()
            .column_index(name)
            .ok_or_else(|| VizError::UnknownSortColumn(name.clone()))?,
        None => 0,
    };
    let order = matrix_row_order(ds, mask, sort_col);

    // per-column observed ranges for the gray scale
    let ranges: Vec<Option<(f64, f64)>> = (0..ds.n_cols())
        .map(|c| {
            let mut range: Option<(f64, f64)> = None;
            for r in 0..ds.n_rows() {
                if mask.get(r, c) {
                    continue;
                }
                if let Some(v) = ds.get(r, c) {
                    range = Some(match range {
                        None => (v, v),
                        Some((lo, hi)) => (lo.min(v), hi.max(v)),
                    });
                }
            }
            range
        })
        .collect();

    let (w, h) = (spec.width as f64, spec.height as f64);
    let margin = 36.0;
    let label_band = 18.0;
    let k = ds.n_cols() as f64;
    let n = ds.n_rows().max(1) as f64;
    let cell_w = (w - 2.0 * margin) / k;
    let cell_h = (h - 2.0 * margin - label_band) / n;
    let mut svg = Svg::new(spec.width, spec.height);
    svg.text(
        margin,
        margin - 8.0,
        12.0,
        &format!("matrix plot, sorted by {}", ds.schema().name(sort_col)),
    );
    for (pos, &r) in order.iter().enumerate() {
        let y = margin + pos as f64 * cell_h;
        for (c, range) in ranges.iter().enumerate() {
            let x = margin + c as f64 * cell_w;
            if mask.get(r, c) {
                svg.rect(x, y, cell_w, cell_h, &spec.highlight_color);
            } else if let Some(v) = ds.get(r, c) {
                let t = match range {
                    Some((lo, hi)) if hi > lo => (v - lo) / (hi - lo),
                    _ => 0.0,
                };
                let level = (235.0 - t * 180.0) as u8;
                svg.rect(x, y, cell_w, cell_h, &format!("#{level:02x}{level:02x}{level:02x}"));
            }
        }
    }
    for c in 0..ds.n_cols() {
        svg.text(
            margin + c as f64 * cell_w + 2.0,
            h - margin + 12.0,
            10.0,
            ds.schema().name(c),
        );
    }
    Ok(svg.finish())
}
