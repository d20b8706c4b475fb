//! Aggregation plot: per-column missing-rate bars on the left, the distinct
//! missingness combinations with their relative frequencies on the right.

use serde::{Deserialize, Serialize};

use super::{PlotSpec, Svg, VizError};
use crate::ampute::MissingMask;
use crate::tabular::Dataset;

/// One distinct per-row missingness combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureGroup {
    /// Missing flag per column.
    pub missing: Vec<bool>,
    pub count: usize,
    pub frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationData {
    pub column_names: Vec<String>,
    /// Cell missingness rate per column.
    pub column_rates: Vec<f64>,
    /// Signatures sorted by frequency descending (ties: fewest missing
    /// columns first, then lexicographic), frequencies summing to 1.
    pub signatures: Vec<SignatureGroup>,
}

pub fn aggregation_data(ds: &Dataset, mask: &MissingMask) -> Result<AggregationData, VizError> {
    if (mask.n_rows(), mask.n_cols()) != (ds.n_rows(), ds.n_cols()) {
        return Err(VizError::ShapeMismatch);
    }
    let n = ds.n_rows().max(1);
    let column_rates = (0..ds.n_cols())
        .map(|c| mask.column_missing_count(c) as f64 / n as f64)
        .collect();
    let mut counts: std::collections::BTreeMap<Vec<bool>, usize> = Default::default();
    for r in 0..ds.n_rows() {
        *counts.entry(mask.row_signature(r).to_vec()).or_insert(0) += 1;
    }
    if ds.n_rows() == 0 {
        counts.insert(vec![false; ds.n_cols()], 0);
    }
    let mut signatures: Vec<SignatureGroup> = counts
        .into_iter()
        .map(|(missing, count)| SignatureGroup {
            missing,
            count,
            frequency: count as f64 / n as f64,
        })
        .collect();
    signatures.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then_with(|| {
                let na = a.missing.iter().filter(|&&m| m).count();
                let nb = b.missing.iter().filter(|&&m| m).count();
                na.cmp(&nb)
            })
            .then_with(|| a.missing.cmp(&b.missing))
    });
    Ok(AggregationData { column_names: ds.schema().names(), column_rates, signatures })
}

pub fn aggregation_plot(
    ds: &Dataset,
    mask: &MissingMask,
    spec: &PlotSpec,
) -> Result<String, VizError> {
    let data = aggregation_data(ds, mask)?;
    let (w, h) = (spec.width as f64, spec.height as f64);
    let mut svg = Svg::new(spec.width, spec.height);

    let margin = 40.0;
    let label_band = 24.0;
    let k = data.column_names.len() as f64;
    let plot_h = h - 2.0 * margin - label_band;

    // left panel: per-column missing-rate bars
    let left_w = w * 0.42 - 2.0 * margin;
    let bar_w = (left_w / k) * 0.7;
    let step = left_w / k;
    svg.line(margin, margin, margin, margin + plot_h, "#444444");
    svg.line(margin, margin + plot_h, margin + left_w, margin + plot_h, "#444444");
    svg.text(margin, margin - 8.0, 12.0, "missing rate per column");
    for (i, (name, &rate)) in data.column_names.iter().zip(&data.column_rates).enumerate() {
        let x = margin + i as f64 * step + (step - bar_w) / 2.0;
        let bh = plot_h * rate;
        svg.rect(x, margin + plot_h - bh, bar_w, bh, &spec.highlight_color);
        svg.text(x, margin + plot_h + 14.0, 10.0, name);
        svg.text(x, margin + plot_h - bh - 3.0, 9.0, &format!("{:.2}", rate));
    }

    // right panel: one row per signature, missing cells tinted
    let right_x = w * 0.48;
    let right_w = w - right_x - margin - 60.0;
    let cell_w = right_w / k;
    let rows = data.signatures.len() as f64;
    let cell_h = (plot_h / rows).min(28.0);
    svg.text(right_x, margin - 8.0, 12.0, "missing combinations");
    for (si, sig) in data.signatures.iter().enumerate() {
        let y = margin + si as f64 * cell_h;
        for (ci, &missing) in sig.missing.iter().enumerate() {
            let fill = if missing { spec.highlight_color.as_str() } else { "#d9d9d9" };
            svg.rect(right_x + ci as f64 * cell_w + 1.0, y + 1.0, cell_w - 2.0, cell_h - 2.0, fill);
        }
        svg.text(
            right_x + k * cell_w + 6.0,
            y + cell_h * 0.65,
            10.0,
            &format!("{:.3}", sig.frequency),
        );
    }
    for (ci, name) in data.column_names.iter().enumerate() {
        svg.text(right_x + ci as f64 * cell_w + 2.0, margin + rows * cell_h + 14.0, 10.0, name);
    }
    Ok(svg.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{ColumnSchema, Schema};

    fn ds(n: usize) -> Dataset {
        let schema = Schema::new(vec![
            ColumnSchema::numeric("age"),
            ColumnSchema::numeric("weight"),
            ColumnSchema::numeric("salary"),
            ColumnSchema::target("class"),
        ])
        .unwrap();
        Dataset::from_complete_rows(
            schema,
            (0..n).map(|i| vec![i as f64, i as f64, i as f64, (i % 2) as f64]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn empty_mask_yields_one_all_observed_signature() {
        let ds = ds(10);
        let mask = MissingMask::new(10, 4);
        let data = aggregation_data(&ds, &mask).unwrap();
        assert_eq!(data.signatures.len(), 1);
        assert_eq!(data.signatures[0].frequency, 1.0);
        assert!(data.signatures[0].missing.iter().all(|&m| !m));
        assert!(data.column_rates.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn column_rate_matches_cell_missingness() {
        let ds = ds(10);
        let mut mask = MissingMask::new(10, 4);
        for r in 0..3 {
            mask.set(r, 2, true);
        }
        let data = aggregation_data(&ds, &mask).unwrap();
        assert!((data.column_rates[2] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn joint_and_separate_missingness_gives_three_signatures() {
        let ds = ds(12);
        let mut mask = MissingMask::new(12, 4);
        // multivariate {age, weight} on rows 0..3, univariate {salary} on 4..8
        for r in 0..3 {
            mask.set(r, 0, true);
            mask.set(r, 1, true);
        }
        for r in 4..8 {
            mask.set(r, 2, true);
        }
        let data = aggregation_data(&ds, &mask).unwrap();
        assert_eq!(data.signatures.len(), 3);
        let total: f64 = data.signatures.iter().map(|s| s.frequency).sum();
        assert!((total - 1.0).abs() < 1e-9);
        // sorted by frequency descending
        assert!(data.signatures.windows(2).all(|w| w[0].count >= w[1].count));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let ds = ds(5);
        let mask = MissingMask::new(4, 4);
        assert!(matches!(aggregation_data(&ds, &mask), Err(VizError::ShapeMismatch)));
    }

    #[test]
    fn svg_renders_with_highlight_cells() {
        let ds = ds(6);
        let mut mask = MissingMask::new(6, 4);
        mask.set(0, 1, true);
        let spec = PlotSpec::new(super::super::PlotKind::Aggregation);
        let svg = aggregation_plot(&ds, &mask, &spec).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(&spec.highlight_color));
    }
}
