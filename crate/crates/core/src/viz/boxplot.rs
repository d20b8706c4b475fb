//! Parallel boxplot: the distribution of one numeric column, drawn overall
//! and split by the missing/observed status of every other incomplete
//! column.

use serde::{Deserialize, Serialize};

use super::{PlotSpec, Svg, VizError};
use crate::ampute::MissingMask;
use crate::tabular::{ColumnKind, Dataset};

/// Five-number box summary with Tukey whiskers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub lower_whisker: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub upper_whisker: f64,
}

/// Quantile by linear interpolation between order statistics (position
/// `p * (n - 1)`).
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Box statistics of a value set: interpolated quartiles and whiskers at the
/// most extreme points within 1.5 IQR of the box. A single value yields a
/// degenerate box with all five statistics equal.
pub fn box_stats(values: &[f64]) -> Option<BoxStats> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN values"));
    let q1 = quantile(&sorted, 0.25);
    let median = quantile(&sorted, 0.5);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let lo_fence = q1 - 1.5 * iqr;
    let hi_fence = q3 + 1.5 * iqr;
    let lower_whisker = *sorted.iter().find(|&&v| v >= lo_fence).expect("q1 within fence");
    let upper_whisker = *sorted.iter().rev().find(|&&v| v <= hi_fence).expect("q3 within fence");
    Some(BoxStats { lower_whisker, q1, median, q3, upper_whisker })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxGroup {
    pub label: String,
    pub n: usize,
    pub stats: Option<BoxStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelBoxData {
    pub column: String,
    pub groups: Vec<BoxGroup>,
}

/// Build the box groups for `column`: one overall box, then a
/// missing/observed pair for every other column that has missing cells.
/// Empty subgroups stay in the list with `stats: None` and are not drawn.
pub fn parallel_boxplot_data(
    ds: &Dataset,
    mask: &MissingMask,
    column: &str,
) -> Result<ParallelBoxData, VizError> {
    if (mask.n_rows(), mask.n_cols()) != (ds.n_rows(), ds.n_cols()) {
        return Err(VizError::ShapeMismatch);
    }
    let col = ds
        .schema()
        .column_index(column)
        .ok_or_else(|| VizError::UnknownColumn(column.to_string()))?;
    if ds.schema().kind(col) != ColumnKind::Numeric {
        return Err(VizError::NonNumericColumn(column.to_string()));
    }
    let value_of = |r: usize| -> Option<f64> {
        if mask.get(r, col) {
            None
        } else {
            ds.get(r, col)
        }
    };
    let all: Vec<f64> = (0..ds.n_rows()).filter_map(value_of).collect();
    let mut groups =
        vec![BoxGroup { label: "all".into(), n: all.len(), stats: box_stats(&all) }];
    for c in 0..ds.n_cols() {
        if c == col || mask.column_missing_count(c) == 0 {
            continue;
        }
        for (suffix, want_missing) in [("missing", true), ("observed", false)] {
            let values: Vec<f64> = (0..ds.n_rows())
                .filter(|&r| mask.get(r, c) == want_missing)
                .filter_map(value_of)
                .collect();
            groups.push(BoxGroup {
                label: format!("{} {}", ds.schema().name(c), suffix),
                n: values.len(),
                stats: box_stats(&values),
            });
        }
    }
    Ok(ParallelBoxData { column: column.to_string(), groups })
}

pub fn parallel_boxplot(
    ds: &Dataset,
    mask: &MissingMask,
    column: &str,
    spec: &PlotSpec,
) -> Result<String, VizError> {
    let data = parallel_boxplot_data(ds, mask, column)?;
    let (w, h) = (spec.width as f64, spec.height as f64);
    let margin = 48.0;
    let label_band = 40.0;
    let mut svg = Svg::new(spec.width, spec.height);
    svg.text(margin, margin - 10.0, 12.0, &format!("distribution of {}", data.column));

    let drawn: Vec<&BoxGroup> = data.groups.iter().filter(|g| g.stats.is_some()).collect();
    if drawn.is_empty() {
        return Ok(svg.finish());
    }
    let lo = drawn
        .iter()
        .map(|g| g.stats.expect("filtered").lower_whisker)
        .fold(f64::INFINITY, f64::min);
    let hi = drawn
        .iter()
        .map(|g| g.stats.expect("filtered").upper_whisker)
        .fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let plot_h = h - 2.0 * margin - label_band;
    let to_y = |v: f64| margin + plot_h * (1.0 - (v - lo) / span);

    let step = (w - 2.0 * margin) / drawn.len() as f64;
    let box_w = step * 0.5;
    for (i, group) in drawn.iter().enumerate() {
        let s = group.stats.expect("filtered");
        let cx = margin + i as f64 * step + step / 2.0;
        let is_missing_group = group.label.ends_with(" missing");
        let fill = if is_missing_group { spec.highlight_color.as_str() } else { "#9ecae1" };
        svg.line(cx, to_y(s.lower_whisker), cx, to_y(s.q1), "#444444");
        svg.line(cx, to_y(s.q3), cx, to_y(s.upper_whisker), "#444444");
        let (top, bottom) = (to_y(s.q3), to_y(s.q1));
        svg.rect(cx - box_w / 2.0, top, box_w, (bottom - top).max(1.0), fill);
        svg.line(cx - box_w / 2.0, to_y(s.median), cx + box_w / 2.0, to_y(s.median), "#111111");
        svg.line(cx - box_w / 4.0, to_y(s.lower_whisker), cx + box_w / 4.0, to_y(s.lower_whisker), "#444444");
        svg.line(cx - box_w / 4.0, to_y(s.upper_whisker), cx + box_w / 4.0, to_y(s.upper_whisker), "#444444");
        svg.text(cx - step * 0.45, h - margin + 14.0, 9.0, &group.label);
        svg.text(cx - step * 0.45, h - margin + 26.0, 8.0, &format!("n={}", group.n));
    }
    Ok(svg.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{ColumnSchema, Schema};

    fn setup(rows: Vec<Vec<f64>>, masked: &[(usize, usize)]) -> (Dataset, MissingMask) {
        let schema = Schema::new(vec![
            ColumnSchema::numeric("id"),
            ColumnSchema::numeric("salary"),
            ColumnSchema::target("class"),
        ])
        .unwrap();
        let ds = Dataset::from_complete_rows(schema, rows).unwrap();
        let mut mask = MissingMask::new(ds.n_rows(), ds.n_cols());
        for &(r, c) in masked {
            mask.set(r, c, true);
        }
        (ds, mask)
    }

    #[test]
    fn quartiles_match_order_statistics_oracle() {
        // values 1..=9: q1 = 3, median = 5, q3 = 7 (interpolated positions)
        let values: Vec<f64> = (1..=9).map(|v| v as f64).collect();
        let s = box_stats(&values).unwrap();
        assert_eq!((s.q1, s.median, s.q3), (3.0, 5.0, 7.0));
        assert_eq!(s.lower_whisker, 1.0);
        assert_eq!(s.upper_whisker, 9.0);

        // even count interpolates: [1, 2, 3, 4] -> median 2.5
        let s = box_stats(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.median, 2.5);
        assert_eq!(s.q1, 1.75);
        assert_eq!(s.q3, 3.25);
    }

    #[test]
    fn whiskers_clip_outliers() {
        let mut values: Vec<f64> = (1..=9).map(|v| v as f64).collect();
        values.push(100.0);
        let s = box_stats(&values).unwrap();
        assert!(s.upper_whisker < 100.0);
    }

    #[test]
    fn degenerate_group_of_one() {
        let s = box_stats(&[7.5]).unwrap();
        assert_eq!(s.lower_whisker, 7.5);
        assert_eq!(s.q1, 7.5);
        assert_eq!(s.median, 7.5);
        assert_eq!(s.q3, 7.5);
        assert_eq!(s.upper_whisker, 7.5);
    }

    #[test]
    fn complete_data_draws_only_the_overall_box() {
        let (ds, mask) = setup(
            (0..10).map(|i| vec![i as f64, 100.0 + i as f64, 0.0]).collect(),
            &[],
        );
        let data = parallel_boxplot_data(&ds, &mask, "id").unwrap();
        assert_eq!(data.groups.len(), 1);
        assert_eq!(data.groups[0].label, "all");
    }

    #[test]
    fn subgroups_split_by_other_columns_missingness() {
        let (ds, mask) = setup(
            (0..10).map(|i| vec![i as f64, 100.0 + i as f64, 0.0]).collect(),
            &[(7, 1), (8, 1), (9, 1)],
        );
        let data = parallel_boxplot_data(&ds, &mask, "id").unwrap();
        let labels: Vec<&str> = data.groups.iter().map(|g| g.label.as_str()).collect();
        assert_eq!(labels, vec!["all", "salary missing", "salary observed"]);
        // id values where salary is missing: 7, 8, 9
        let s = data.groups[1].stats.unwrap();
        assert_eq!(s.median, 8.0);
        assert_eq!(data.groups[1].n, 3);
    }

    #[test]
    fn non_numeric_column_rejected() {
        let (ds, mask) = setup(vec![vec![1.0, 2.0, 0.0]], &[]);
        assert!(matches!(
            parallel_boxplot_data(&ds, &mask, "class"),
            Err(VizError::NonNumericColumn(_))
        ));
        assert!(matches!(
            parallel_boxplot_data(&ds, &mask, "nope"),
            Err(VizError::UnknownColumn(_))
        ));
    }

    #[test]
    fn svg_output_renders() {
        let (ds, mask) = setup(
            (0..10).map(|i| vec![i as f64, 100.0 + i as f64, 0.0]).collect(),
            &[(1, 1)],
        );
        let spec = PlotSpec::new(super::super::PlotKind::ParallelBox);
        let svg = parallel_boxplot(&ds, &mask, "id", &spec).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("distribution of id"));
    }
}
