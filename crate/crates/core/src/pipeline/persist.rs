//! Result persistence: a flat results.csv, per-column metric detail,
//! per-factor summaries, a run manifest, and wall-clock timings.
//!
//! Everything except timings.csv is a pure function of the results, so a
//! rerun with the same config and seeds reproduces the files byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CaseResult, PipelineError, StudyConfig};
use crate::metrics::{aggregate_by_factor, Factor, MetricKind};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub n_results: usize,
    pub files: Vec<String>,
    /// Resolved conventions that are not visible in the config itself.
    pub conventions: Conventions,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Conventions {
    pub normalization_fit: String,
    pub zerofill_space: String,
    pub imputer_fit_rows: String,
    pub missing_rate_basis: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            normalization_fit: "fitted on the data handed to each consuming model".into(),
            zerofill_space: "zeros written in the model's normalized input space".into(),
            imputer_fit_rows: "imputers fit on all rows before splitting".into(),
            missing_rate_basis: "row-wise (share of records with any missing cell)".into(),
        }
    }
}

fn io_err(path: &Path, source: std::io::Error) -> PipelineError {
    PipelineError::Io { path: path.display().to_string(), source }
}

fn csv_err(path: &Path, source: csv::Error) -> PipelineError {
    PipelineError::Io { path: path.display().to_string(), source: std::io::Error::other(source) }
}

fn fmt_opt<T: std::fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

/// Hash of the canonical JSON form of the config.
pub fn config_hash(config: &StudyConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn write_results_csv(results: &[CaseResult], path: &Path) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let to_io = |e: csv::Error| csv_err(path, e);
    w.write_record([
        "case_index",
        "seed",
        "std_dev",
        "pattern",
        "mechanism",
        "rate",
        "achieved_rate",
        "cell_rate",
        "strategy",
        "method",
        "model",
        "nrmse2_mean",
        "acc_mean",
        "f1_macro",
        "warnings",
        "error",
    ])
    .map_err(to_io)?;
    for r in results {
        w.write_record([
            fmt_opt(&r.case_index),
            r.seed.to_string(),
            fmt_opt(&r.std_dev),
            r.pattern.map(|p| p.label().to_string()).unwrap_or_default(),
            r.mechanism.map(|m| m.label().to_string()).unwrap_or_default(),
            fmt_opt(&r.rate),
            fmt_opt(&r.achieved_rate),
            fmt_opt(&r.cell_rate),
            r.strategy.label().to_string(),
            r.method.clone(),
            r.model.clone().unwrap_or_default(),
            fmt_opt(&r.mean_nrmse2),
            fmt_opt(&r.mean_acc),
            fmt_opt(&r.f1_macro),
            r.warnings.join("; "),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(to_io)?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

fn write_columns_csv(results: &[CaseResult], path: &Path) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let to_io = |e: csv::Error| csv_err(path, e);
    w.write_record([
        "case_index", "seed", "pattern", "mechanism", "rate", "strategy", "method", "column",
        "metric", "value", "cells",
    ])
    .map_err(to_io)?;
    for &i in &first_rows(results) {
        let r = &results[i];
        let Some(report) = &r.imputation else { continue };
        for (col, value) in report
            .nrmse2
            .iter()
            .enumerate()
            .filter_map(|(c, v)| v.map(|v| (c, ("nrmse2", v))))
            .chain(report.acc.iter().enumerate().filter_map(|(c, v)| v.map(|v| (c, ("acc", v)))))
        {
            w.write_record([
                fmt_opt(&r.case_index),
                r.seed.to_string(),
                r.pattern.map(|p| p.label().to_string()).unwrap_or_default(),
                r.mechanism.map(|m| m.label().to_string()).unwrap_or_default(),
                fmt_opt(&r.rate),
                r.strategy.label().to_string(),
                r.method.clone(),
                col.to_string(),
                value.0.to_string(),
                value.1.to_string(),
                report.counts[col].to_string(),
            ])
            .map_err(to_io)?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

type BlockKey = (Option<usize>, u64, &'static str, String);

fn block_key(r: &CaseResult) -> BlockKey {
    (r.case_index, r.seed, r.strategy.label(), r.method.clone())
}

/// Indices of the first row of every (case, seed, strategy, method) block;
/// model rows repeat the imputation report, so only one copy is kept.
fn first_rows(results: &[CaseResult]) -> Vec<usize> {
    let mut seen = std::collections::HashSet::new();
    let mut firsts = Vec::new();
    for (i, r) in results.iter().enumerate() {
        if seen.insert(block_key(r)) {
            firsts.push(i);
        }
    }
    firsts
}

fn write_summary_csv(
    results: &[CaseResult],
    factor: Factor,
    path: &Path,
) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let to_io = |e: csv::Error| csv_err(path, e);
    w.write_record(["factor", "value", "metric", "mean", "n_cases"]).map_err(to_io)?;
    let firsts = first_rows(results);
    for metric in [MetricKind::Nrmse2, MetricKind::Acc, MetricKind::F1Macro] {
        // imputation metrics pool column-level observations; rows repeating a
        // report across models would be double counted, so keep block heads
        let deduped: Vec<CaseResult> = match metric {
            MetricKind::F1Macro => results.to_vec(),
            _ => firsts.iter().map(|&i| results[i].clone()).collect(),
        };
        if deduped.is_empty() {
            continue;
        }
        if let Ok(summaries) = aggregate_by_factor(&deduped, factor, metric) {
            for s in summaries {
                w.write_record([
                    s.key.label().to_string(),
                    s.value,
                    s.metric.label().to_string(),
                    s.mean_metric.to_string(),
                    s.n_cases.to_string(),
                ])
                .map_err(to_io)?;
            }
        }
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

fn write_timings_csv(results: &[CaseResult], path: &Path) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let to_io = |e: csv::Error| csv_err(path, e);
    w.write_record(["case_index", "seed", "strategy", "method", "model", "wall_seconds"])
        .map_err(to_io)?;
    for r in results {
        w.write_record([
            fmt_opt(&r.case_index),
            r.seed.to_string(),
            r.strategy.label().to_string(),
            r.method.clone(),
            r.model.clone().unwrap_or_default(),
            format!("{:.6}", r.wall_seconds),
        ])
        .map_err(to_io)?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Write all result files into `dir` and return the manifest.
///
/// Files: `results.csv`, `columns.csv`, one `summary_<factor>.csv` per
/// grouping factor, `manifest.json`, and `timings.csv` (the only file
/// excluded from the byte-reproducibility contract).
pub fn persist_results(
    results: &[CaseResult],
    config: &StudyConfig,
    dir: impl AsRef<Path>,
) -> Result<RunManifest, PipelineError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut files = Vec::new();

    let results_path = dir.join("results.csv");
    write_results_csv(results, &results_path)?;
    files.push("results.csv".to_string());

    let columns_path = dir.join("columns.csv");
    write_columns_csv(results, &columns_path)?;
    files.push("columns.csv".to_string());

    for factor in [Factor::Pattern, Factor::Rate, Factor::Mechanism, Factor::Method, Factor::Strategy]
    {
        let name = format!("summary_{}.csv", factor.label());
        write_summary_csv(results, factor, &dir.join(&name))?;
        files.push(name);
    }

    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config_hash(config),
        seeds: config.seeds.clone(),
        n_results: results.len(),
        files: files.clone(),
        conventions: Conventions::default(),
    };
    let manifest_path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&manifest_path, json).map_err(|e| io_err(&manifest_path, e))?;

    write_timings_csv(results, &dir.join("timings.csv"))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_changes_iff_config_changes() {
        let a = StudyConfig::default();
        let mut b = StudyConfig::default();
        assert_eq!(config_hash(&a), config_hash(&b));
        b.rates = vec![0.5];
        assert_ne!(config_hash(&a), config_hash(&b));
    }
}
