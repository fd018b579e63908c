//! IDX image and label files, plain or gzip-compressed.
//!
//! Layout: a big-endian magic `0x0000_08NN` where `08` marks unsigned bytes
//! and `NN` the number of dimensions, one big-endian `u32` per dimension, then
//! the payload.

use std::io::Read;
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;

use super::{file_stem, read_file, LabeledDataset};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

/// Raw unsigned-byte images, row-major per image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn new(count: usize, rows: usize, cols: usize, pixels: Vec<u8>) -> Result<Self> {
        if count * rows * cols != pixels.len() {
            return Err(Error::invalid(format!(
                "{count} images of {rows}x{cols} need {} bytes, got {}",
                count * rows * cols,
                pixels.len()
            )));
        }
        Ok(Self {
            count,
            rows,
            cols,
            pixels,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::read_limited(path, None)
    }

    fn read_limited(path: &Path, limit: Option<usize>) -> Result<Self> {
        let bytes = read_maybe_gz(path)?;
        let dims = parse_header(path, &bytes, IMAGES_MAGIC, 3)?;
        let (count, rows, cols) = (dims[0], dims[1], dims[2]);
        let take = limit.map_or(count, |l| l.min(count));
        let start = 4 + 4 * 3;
        let need = take * rows * cols;
        check_payload(path, &bytes, start, need, count * rows * cols)?;
        Self::new(take, rows, cols, bytes[start..start + need].to_vec())
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + self.pixels.len());
        out.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
        for d in [self.count, self.rows, self.cols] {
            out.extend_from_slice(&(d as u32).to_be_bytes());
        }
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.encode()).map_err(|e| Error::io(path, e))
    }

    /// Pixels as `f64` in `[0, 1]`, one flattened image per row.
    pub fn to_matrix(&self) -> DenseMatrix {
        let d = self.rows * self.cols;
        DenseMatrix::from_raw(
            self.count,
            d,
            self.pixels.iter().map(|&p| f64::from(p) / 255.0).collect(),
        )
    }
}

pub fn write_idx_images(path: &Path, images: &IdxImages) -> Result<()> {
    images.write(path)
}

pub fn write_idx_labels(path: &Path, labels: &[u8]) -> Result<()> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_idx_labels(path: &Path, limit: Option<usize>) -> Result<Vec<u8>> {
    let bytes = read_maybe_gz(path)?;
    let count = parse_header(path, &bytes, LABELS_MAGIC, 1)?[0];
    let take = limit.map_or(count, |l| l.min(count));
    check_payload(path, &bytes, 8, take, count)?;
    Ok(bytes[8..8 + take].to_vec())
}

/// Loads an IDX image file as `[0,1]`-scaled rows. A companion label file
/// (same name with `images`→`labels` and `idx3`→`idx1`) is read when present.
pub fn load_idx(images_path: &Path, limit: Option<usize>) -> Result<LabeledDataset> {
    let images = IdxImages::read_limited(images_path, limit)?;
    let labels = match companion_labels(images_path) {
        Some(lp) => {
            let labels = read_idx_labels(&lp, limit)?;
            if labels.len() != images.count {
                return Err(Error::format(
                    &lp,
                    format!("{} labels for {} images", labels.len(), images.count),
                ));
            }
            Some(labels.into_iter().map(f64::from).collect())
        }
        None => None,
    };
    LabeledDataset::new(images.to_matrix(), labels, file_stem(images_path))
}

fn companion_labels(images_path: &Path) -> Option<PathBuf> {
    let name = images_path.file_name()?.to_str()?;
    let swapped = name.replace("images", "labels").replace("idx3", "idx1");
    if swapped == name {
        return None;
    }
    let candidate = images_path.with_file_name(swapped);
    candidate.is_file().then_some(candidate)
}

fn read_maybe_gz(path: &Path) -> Result<Vec<u8>> {
    let raw = read_file(path)?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        MultiGzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .map_err(|e| Error::format(path, format!("bad gzip stream: {e}")))?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

fn parse_header(path: &Path, bytes: &[u8], magic: u32, ndims: usize) -> Result<Vec<usize>> {
    let word = |at: usize| -> Result<u32> {
        bytes
            .get(at..at + 4)
            .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
            .ok_or_else(|| {
                Error::format(path, format!("truncated header at byte offset {at} (file has {} bytes)", bytes.len()))
            })
    };
    let got = word(0)?;
    if got != magic {
        return Err(Error::format(
            path,
            format!("bad magic 0x{got:08x} at byte offset 0, expected 0x{magic:08x}"),
        ));
    }
    (0..ndims).map(|i| word(4 + 4 * i).map(|v| v as usize)).collect()
}

fn check_payload(path: &Path, bytes: &[u8], start: usize, need: usize, declared: usize) -> Result<()> {
    if bytes.len() < start + need {
        return Err(Error::format(
            path,
            format!(
                "truncated payload: header declares {declared} bytes from offset {start}, data ends at byte offset {}",
                bytes.len()
            ),
        ));
    }
    Ok(())
}
