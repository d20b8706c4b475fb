//! CSV ingestion and serialization.
//!
//! Files are comma-delimited UTF-8 with a header row of column names.
//! Categorical cells carry their original labels; missing cells serialize as
//! empty fields.

use std::path::Path;

use super::{ColumnKind, ColumnSchema, Dataset, EncodingMap, Schema, TabularError};

fn io_err(path: &Path, source: std::io::Error) -> TabularError {
    TabularError::Io { path: path.display().to_string(), source }
}

fn csv_err(path: &Path, source: csv::Error) -> TabularError {
    TabularError::Csv { path: path.display().to_string(), source }
}

fn read_records(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), TabularError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let header: Vec<String> =
        reader.headers().map_err(|e| csv_err(path, e))?.iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        rows.push(rec.iter().map(|s| s.to_string()).collect());
    }
    Ok((header, rows))
}

fn parse_rows(
    header: &[String],
    records: &[Vec<String>],
    schema: &Schema,
    allow_missing: bool,
) -> Result<(Dataset, EncodingMap), TabularError> {
    let expected = schema.names();
    if header != expected.as_slice() {
        return Err(TabularError::MissingHeader { expected, got: header.to_vec() });
    }
    let k = schema.len();
    let mut map = EncodingMap::new();
    let mut rows: Vec<Vec<Option<f64>>> = Vec::with_capacity(records.len());
    for (r, rec) in records.iter().enumerate() {
        if rec.len() != k {
            return Err(TabularError::RowLength { row: r, expected: k, got: rec.len() });
        }
        let mut row = Vec::with_capacity(k);
        for (c, raw) in rec.iter().enumerate() {
            let cell = raw.trim();
            if cell.is_empty() {
                if allow_missing {
                    row.push(None);
                    continue;
                }
                return Err(TabularError::EmptyCell { row: r, col: c });
            }
            match schema.kind(c) {
                ColumnKind::Numeric => {
                    let v: f64 = cell.parse().map_err(|_| TabularError::UnparsableCell {
                        row: r,
                        col: c,
                        value: cell.to_string(),
                    })?;
                    row.push(Some(v));
                }
                ColumnKind::Categorical => {
                    let code = map.encode_or_insert(c, cell);
                    row.push(Some(code as f64));
                }
            }
        }
        rows.push(row);
    }
    let ds = Dataset::from_rows(schema.clone(), rows)?;
    Ok((ds, map))
}

/// Load a complete CSV file. Any empty cell is an error; the original data
/// is expected to have no missing values.
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<(Dataset, EncodingMap), TabularError> {
    let path = path.as_ref();
    let (header, records) = read_records(path)?;
    parse_rows(&header, &records, schema, false)
}

/// Load a CSV file where empty fields denote missing cells.
pub fn load_csv_allow_missing(
    path: impl AsRef<Path>,
    schema: &Schema,
) -> Result<(Dataset, EncodingMap), TabularError> {
    let path = path.as_ref();
    let (header, records) = read_records(path)?;
    parse_rows(&header, &records, schema, true)
}

/// Derive a schema from file contents: a column is categorical iff any
/// non-empty cell fails numeric parsing.
///
/// The target is the column named by `target` when given (coerced to
/// categorical), otherwise the last categorical column.
pub fn infer_schema(path: impl AsRef<Path>, target: Option<&str>) -> Result<Schema, TabularError> {
    let path = path.as_ref();
    let (header, records) = read_records(path)?;
    if header.is_empty() {
        return Err(TabularError::EmptySchema);
    }
    let mut kinds = vec![ColumnKind::Numeric; header.len()];
    for rec in &records {
        for (c, raw) in rec.iter().enumerate().take(header.len()) {
            let cell = raw.trim();
            if !cell.is_empty() && cell.parse::<f64>().is_err() {
                kinds[c] = ColumnKind::Categorical;
            }
        }
    }
    let target_idx = match target {
        Some(name) => header.iter().position(|h| h == name).ok_or_else(|| {
            TabularError::MissingHeader { expected: vec![name.to_string()], got: header.clone() }
        })?,
        None => match kinds.iter().rposition(|&k| k == ColumnKind::Categorical) {
            Some(i) => i,
            None => return Err(TabularError::TargetCount(0)),
        },
    };
    kinds[target_idx] = ColumnKind::Categorical;
    let columns = header
        .iter()
        .zip(kinds)
        .enumerate()
        .map(|(i, (name, kind))| ColumnSchema {
            name: name.clone(),
            kind,
            is_target: i == target_idx,
        })
        .collect();
    Schema::new(columns)
}

fn format_cell(ds: &Dataset, map: &EncodingMap, row: usize, col: usize) -> String {
    match ds.get(row, col) {
        None => String::new(),
        Some(v) => match ds.schema().kind(col) {
            ColumnKind::Numeric => format!("{v}"),
            ColumnKind::Categorical => match map.decode(col, v as usize) {
                Some(label) => label.to_string(),
                None => format!("{}", v as usize),
            },
        },
    }
}

/// Write a dataset to CSV, decoding categorical codes back to their labels
/// and leaving missing cells empty.
pub fn write_csv(
    ds: &Dataset,
    map: &EncodingMap,
    path: impl AsRef<Path>,
) -> Result<(), TabularError> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    writer.write_record(ds.schema().names()).map_err(|e| csv_err(path, e))?;
    for r in 0..ds.n_rows() {
        let rec: Vec<String> = (0..ds.n_cols()).map(|c| format_cell(ds, map, r, c)).collect();
        writer.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    writer.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn schema() -> Schema {
        Schema::new(vec![ColumnSchema::numeric("age"), ColumnSchema::target("class")]).unwrap()
    }

    #[test]
    fn loads_and_encodes_first_appearance() {
        let f = write_tmp("age,class\n30,b\n41,a\n25,b\n");
        let (ds, map) = load_csv(f.path(), &schema()).unwrap();
        assert_eq!(ds.n_rows(), 3);
        assert_eq!(ds.n_cols(), 2);
        let codes: Vec<f64> = ds.observed(1).collect();
        assert_eq!(codes, vec![0.0, 1.0, 0.0]);
        assert_eq!(map.decode(1, 0), Some("b"));
        assert_eq!(map.decode(1, 1), Some("a"));
    }

    #[test]
    fn blank_cell_is_an_error() {
        let f = write_tmp("age,class\n30,b\n,a\n");
        let err = load_csv(f.path(), &schema());
        assert!(matches!(err, Err(TabularError::EmptyCell { row: 1, col: 0 })));
    }

    #[test]
    fn unparsable_numeric_is_an_error() {
        let f = write_tmp("age,class\nthirty,b\n");
        let err = load_csv(f.path(), &schema());
        assert!(matches!(err, Err(TabularError::UnparsableCell { row: 0, col: 0, .. })));
    }

    #[test]
    fn header_mismatch_is_an_error() {
        let f = write_tmp("years,class\n30,b\n");
        let err = load_csv(f.path(), &schema());
        assert!(matches!(err, Err(TabularError::MissingHeader { .. })));
    }

    #[test]
    fn allow_missing_reads_empty_as_none() {
        let f = write_tmp("age,class\n30,b\n,a\n");
        let (ds, _) = load_csv_allow_missing(f.path(), &schema()).unwrap();
        assert_eq!(ds.get(1, 0), None);
        assert!(ds.get(1, 1).is_some());
    }

    #[test]
    fn infer_schema_marks_unparsable_columns_categorical() {
        let f = write_tmp("age,city,class\n30,berlin,b\n41,kiel,a\n");
        let s = infer_schema(f.path(), None).unwrap();
        assert_eq!(s.kind(0), ColumnKind::Numeric);
        assert_eq!(s.kind(1), ColumnKind::Categorical);
        assert_eq!(s.target_index(), 2);

        let s = infer_schema(f.path(), Some("city")).unwrap();
        assert_eq!(s.target_index(), 1);
    }

    #[test]
    fn write_read_round_trip_preserves_labels() {
        let f = write_tmp("age,class\n30,b\n41,a\n");
        let (ds, map) = load_csv(f.path(), &schema()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_csv(&ds, &map, out.path()).unwrap();
        let (ds2, map2) = load_csv(out.path(), &schema()).unwrap();
        assert_eq!(ds, ds2);
        assert_eq!(map, map2);
    }
}
