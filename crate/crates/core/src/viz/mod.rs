//! Missingness diagnostics rendered as standalone SVG documents: the
//! aggregation plot (per-column rates + signature combinations), the matrix
//! plot (one shaded line per record) and the parallel boxplot.
//!
//! Renderers are deterministic; tests assert on the underlying data
//! structures rather than pixel geometry.

mod aggregation;
mod boxplot;
mod matrix_plot;

pub use aggregation::{aggregation_data, aggregation_plot, AggregationData, SignatureGroup};
pub use boxplot::{box_stats, parallel_boxplot, parallel_boxplot_data, BoxGroup, BoxStats, ParallelBoxData};
pub use matrix_plot::{matrix_plot, matrix_row_order};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VizError {
    #[error("mask shape does not match the dataset")]
    ShapeMismatch,
    #[error("column {0:?} is nominal; enable categorical_as_ordinal or drop it")]
    NominalColumn(String),
    #[error("unknown sort column {0:?}")]
    UnknownSortColumn(String),
    #[error("column {0:?} is not numeric")]
    NonNumericColumn(String),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    Aggregation,
    Matrix,
    ParallelBox,
}

/// Darkest-gray highlight for black-and-white output.
pub const BW_HIGHLIGHT: &str = "#262626";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub kind: PlotKind,
    /// Matrix plot row ordering column; defaults to the first column.
    pub sort_by: Option<String>,
    /// Fill for missing cells; red by default, [`BW_HIGHLIGHT`] for print.
    pub highlight_color: String,
    pub width: u32,
    pub height: u32,
    /// Treat categorical codes as ordinal values. When false, categorical
    /// columns are rejected as nominal by the matrix plot.
    pub categorical_as_ordinal: bool,
}

impl PlotSpec {
    pub fn new(kind: PlotKind) -> Self {
        Self {
            kind,
            sort_by: None,
            highlight_color: "#d62728".into(),
            width: 800,
            height: 600,
            categorical_as_ordinal: true,
        }
    }
}

/// Tiny SVG document builder with fixed numeric formatting.
pub(crate) struct Svg {
    body: String,
    width: u32,
    height: u32,
}

impl Svg {
    pub fn new(width: u32, height: u32) -> Self {
        Self { body: String::new(), width, height }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        self.body.push_str(&format!(
            "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{fill}\"/>\n"
        ));
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        self.body.push_str(&format!(
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{stroke}\" stroke-width=\"1\"/>\n"
        ));
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, content: &str) {
        let escaped = content.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
        self.body.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"{size:.1}\" font-family=\"sans-serif\">{escaped}</text>\n"
        ));
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }
}
