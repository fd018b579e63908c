//! Synthetic generators and file loaders.
//!
//! Three on-disk formats are understood: IDX image/label files (optionally
//! gzip-compressed), the crate's own `LDMDNSE1` dense binary format, and
//! headerless CSV. [`load_any`] sniffs the leading bytes to pick one.

pub mod dense;
pub mod idx;
pub mod synthetic;

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::DataMatrix;

pub use dense::{load_dense, write_dense, DENSE_MAGIC};
pub use idx::{load_idx, write_idx_images, write_idx_labels, IdxImages};
pub use synthetic::{gen_hypersphere, gen_swiss_roll};

/// A dataset plus optional per-row labels (class id or manifold parameter).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub data: DataMatrix,
    pub labels: Option<Vec<f64>>,
    pub name: String,
}

impl LabeledDataset {
    pub fn new(data: DataMatrix, labels: Option<Vec<f64>>, name: impl Into<String>) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != data.rows() {
                return Err(Error::invalid(format!(
                    "{} labels for {} rows",
                    l.len(),
                    data.rows()
                )));
            }
            if l.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("labels contain a non-finite value"));
            }
        }
        Ok(Self {
            data,
            labels,
            name: name.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.data.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.data.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.data.cols()
    }

    /// Keeps the first `n` rows.
    pub fn head(self, n: usize) -> Self {
        let n = n.min(self.len());
        Self {
            data: self.data.head(n),
            labels: self.labels.map(|mut l| {
                l.truncate(n);
                l
            }),
            name: self.name,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Idx,
    Dense,
    Csv,
}

/// Guesses the format from the first bytes of the file.
pub fn sniff(path: &Path) -> Result<FileKind> {
    let mut head = [0u8; 8];
    let mut f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut got = 0;
    while got < head.len() {
        match f.read(&mut head[got..]).map_err(|e| Error::io(path, e))? {
            0 => break,
            n => got += n,
        }
    }
    let head = &head[..got];
    Ok(if head.starts_with(&[0x1f, 0x8b]) || head.starts_with(&[0, 0, 0x08]) {
        FileKind::Idx
    } else if head == DENSE_MAGIC {
        FileKind::Dense
    } else {
        FileKind::Csv
    })
}

/// Loads IDX, dense binary or CSV data, then truncates to `limit` rows.
/// `has_labels` only matters for CSV.
pub fn load_any(path: &Path, has_labels: bool, limit: Option<usize>) -> Result<LabeledDataset> {
    let ds = match sniff(path)? {
        FileKind::Idx => return load_idx(path, limit),
        FileKind::Dense | FileKind::Csv => load_dense(path, has_labels)?,
    };
    Ok(match limit {
        Some(n) => ds.head(n),
        None => ds,
    })
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn file_stem(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}
