//! Mask file format: a 0/1 matrix with the same shape and header as the data
//! file it accompanies.

use std::path::Path;

use super::{AmputeError, MissingMask};

fn csv_err(path: &Path, source: csv::Error) -> AmputeError {
    AmputeError::Csv { path: path.display().to_string(), source }
}

pub fn write_mask_csv(
    mask: &MissingMask,
    header: &[String],
    path: impl AsRef<Path>,
) -> Result<(), AmputeError> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    writer.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in 0..mask.n_rows() {
        let rec: Vec<&str> =
            (0..mask.n_cols()).map(|c| if mask.get(r, c) { "1" } else { "0" }).collect();
        writer.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    writer
        .flush()
        .map_err(|e| AmputeError::Io { path: path.display().to_string(), source: e })?;
    Ok(())
}

/// Read a 0/1 mask file; returns the mask and the header names.
pub fn read_mask_csv(path: impl AsRef<Path>) -> Result<(MissingMask, Vec<String>), AmputeError> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header: Vec<String> =
        reader.headers().map_err(|e| csv_err(path, e))?.iter().map(|s| s.to_string()).collect();
    let mut rows: Vec<Vec<bool>> = Vec::new();
    for (r, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let mut row = Vec::with_capacity(header.len());
        for (c, cell) in rec.iter().enumerate() {
            match cell.trim() {
                "0" => row.push(false),
                "1" => row.push(true),
                other => {
                    return Err(AmputeError::BadMaskCell {
                        row: r,
                        col: c,
                        value: other.to_string(),
                    })
                }
            }
        }
        rows.push(row);
    }
    let mut mask = MissingMask::new(rows.len(), header.len());
    for (r, row) in rows.iter().enumerate() {
        for (c, &m) in row.iter().enumerate() {
            mask.set(r, c, m);
        }
    }
    Ok((mask, header))
}
