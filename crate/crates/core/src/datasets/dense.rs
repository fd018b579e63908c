//! Dense matrix files: the `LDMDNSE1` binary layout or headerless CSV.
//!
//! Binary layout, all little-endian: 8-byte magic, `u64` rows, `u64` cols,
//! `rows·cols` `f64` values row-major, then an optional marker byte. A marker
//! of `1` is followed by `rows` `f64` labels; `0` or end of file means none.

use std::path::Path;

use super::{file_stem, read_file, LabeledDataset};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub const DENSE_MAGIC: &[u8; 8] = b"LDMDNSE1";

pub fn write_dense(path: &Path, ds: &LabeledDataset) -> Result<()> {
    let (rows, cols) = ds.data.shape();
    let label_bytes = ds.labels.as_ref().map_or(0, |l| 8 * l.len());
    let mut out = Vec::with_capacity(25 + 8 * rows * cols + label_bytes);
    out.extend_from_slice(DENSE_MAGIC);
    out.extend_from_slice(&(rows as u64).to_le_bytes());
    out.extend_from_slice(&(cols as u64).to_le_bytes());
    for v in ds.data.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    match &ds.labels {
        Some(labels) => {
            out.push(1);
            for v in labels {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        None => out.push(0),
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads the binary format, or CSV when the magic is absent. For CSV,
/// `has_labels` takes the last column as labels.
pub fn load_dense(path: &Path, has_labels: bool) -> Result<LabeledDataset> {
    let bytes = read_file(path)?;
    if bytes.starts_with(DENSE_MAGIC) {
        parse_binary(path, &bytes)
    } else {
        parse_csv(path, &bytes, has_labels)
    }
}

fn parse_binary(path: &Path, bytes: &[u8]) -> Result<LabeledDataset> {
    let u64_at = |at: usize| -> Result<u64> {
        bytes
            .get(at..at + 8)
            .map(|b| u64::from_le_bytes(b.try_into().unwrap()))
            .ok_or_else(|| Error::format(path, format!("truncated header at byte offset {at}")))
    };
    let rows = u64_at(8)? as usize;
    let cols = u64_at(16)? as usize;
    let count = rows
        .checked_mul(cols)
        .filter(|c| c.checked_mul(8).is_some())
        .ok_or_else(|| Error::format(path, format!("implausible shape {rows}x{cols}")))?;
    let start = 24;
    let end = start + 8 * count;
    if bytes.len() < end {
        return Err(Error::format(
            path,
            format!("{rows}x{cols} payload needs {end} bytes, file has {}", bytes.len()),
        ));
    }
    let data = read_f64s(&bytes[start..end]);
    if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::format(
            path,
            format!("non-finite value at row {}, column {}", pos / cols.max(1) + 1, pos % cols.max(1) + 1),
        ));
    }
    let labels = match bytes.get(end) {
        None | Some(0) => None,
        Some(1) => {
            let lend = end + 1 + 8 * rows;
            if bytes.len() < lend {
                return Err(Error::format(
                    path,
                    format!("label block truncated at byte offset {}", bytes.len()),
                ));
            }
            Some(read_f64s(&bytes[end + 1..lend]))
        }
        Some(m) => {
            return Err(Error::format(path, format!("unknown label marker {m} at byte offset {end}")));
        }
    };
    let data = DenseMatrix::from_vec(rows, cols, data)?;
    LabeledDataset::new(data, labels, file_stem(path)).map_err(|e| Error::format(path, e.to_string()))
}

fn read_f64s(bytes: &[u8]) -> Vec<f64> {
    bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect()
}

fn parse_csv(path: &Path, bytes: &[u8], has_labels: bool) -> Result<LabeledDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::format(path, format!("row {}: {e}", r + 1)))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(Error::format(
                path,
                format!("row {} has {} columns, expected {w}", r + 1, record.len()),
            ));
        }
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::format(path, format!("non-numeric cell {field:?} at row {}, column {}", r + 1, c + 1))
            })?;
            if !v.is_finite() {
                return Err(Error::format(path, format!("non-finite value at row {}, column {}", r + 1, c + 1)));
            }
            if has_labels && c + 1 == w {
                labels.push(v);
            } else {
                data.push(v);
            }
        }
        rows += 1;
    }
    let w = width.unwrap_or(0);
    let cols = if has_labels { w.saturating_sub(1) } else { w };
    if has_labels && w < 2 {
        return Err(Error::format(path, "label column requested but rows have fewer than 2 columns"));
    }
    let data = DenseMatrix::from_vec(rows, cols, data)?;
    LabeledDataset::new(data, has_labels.then_some(labels), file_stem(path))
}
