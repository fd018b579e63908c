use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One latent dimension of a recall experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallRow {
    pub dataset: String,
    pub seed: u64,
    pub n: usize,
    pub dim: usize,
    pub gamma: f64,
    pub d: usize,
    pub k: usize,
    pub ldm_method: String,
    pub recall_pca: f64,
    pub recall_ldm: f64,
    /// PCA minus LDM.
    pub recall_diff: f64,
    pub recall_pca_vs_ldm: f64,
    pub fit_seconds_pca: f64,
    pub fit_seconds_ldm: f64,
    pub knn_seconds: f64,
}

/// Mean and sample standard deviation over the seeds of one sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub n: usize,
    pub dim: usize,
    pub gamma: f64,
    pub d: usize,
    pub k: usize,
    pub ldm_method: String,
    pub seeds: usize,
    pub recall_pca_mean: f64,
    pub recall_pca_std: f64,
    pub recall_ldm_mean: f64,
    pub recall_ldm_std: f64,
    pub recall_diff_mean: f64,
    pub recall_diff_std: f64,
    pub recall_pca_vs_ldm_mean: f64,
    pub recall_pca_vs_ldm_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub dim: usize,
    pub d: usize,
    pub method: String,
    pub repeats: usize,
    pub median_seconds: f64,
    pub min_seconds: f64,
    /// Median over the previous row's median; empty on the first row.
    pub ratio_to_previous: Option<f64>,
    pub samples: String,
}

/// Groups rows by `(n, dim, d)` in first-seen order.
pub fn summarize(rows: &[RecallRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(usize, usize, usize)> = Vec::new();
    for r in rows {
        let key = (r.n, r.dim, r.d);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|key| {
            let group: Vec<&RecallRow> = rows.iter().filter(|r| (r.n, r.dim, r.d) == key).collect();
            let first = group[0];
            let stat = |f: fn(&RecallRow) -> f64| mean_std(&group.iter().map(|r| f(r)).collect::<Vec<_>>());
            let (pca_m, pca_s) = stat(|r| r.recall_pca);
            let (ldm_m, ldm_s) = stat(|r| r.recall_ldm);
            let (diff_m, diff_s) = stat(|r| r.recall_diff);
            let (ov_m, ov_s) = stat(|r| r.recall_pca_vs_ldm);
            SummaryRow {
                dataset: first.dataset.clone(),
                n: first.n,
                dim: first.dim,
                gamma: first.gamma,
                d: first.d,
                k: first.k,
                ldm_method: first.ldm_method.clone(),
                seeds: group.len(),
                recall_pca_mean: pca_m,
                recall_pca_std: pca_s,
                recall_ldm_mean: ldm_m,
                recall_ldm_std: ldm_s,
                recall_diff_mean: diff_m,
                recall_diff_std: diff_s,
                recall_pca_vs_ldm_mean: ov_m,
                recall_pca_vs_ldm_std: ov_s,
            }
        })
        .collect()
}

/// Mean and sample (n−1) standard deviation; the deviation of one value is 0.
pub(crate) fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub(crate) fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// Writes rows with a header, or appends without one when `append` is set and
/// the file already has content. `None` writes to stdout.
pub fn write_rows<T: Serialize>(path: Option<&Path>, rows: &[T], append: bool) -> Result<()> {
    match path {
        Some(p) => {
            let existing = append && p.metadata().map(|m| m.len() > 0).unwrap_or(false);
            let file = if append {
                OpenOptions::new().create(true).append(true).open(p)
            } else {
                File::create(p)
            }
            .map_err(|e| Error::io(p, e))?;
            serialize_rows(BufWriter::new(file), rows, !existing).map_err(|e| e.at(p))
        }
        None => serialize_rows(std::io::stdout().lock(), rows, true).map_err(|e| e.at("<stdout>")),
    }
}

struct WriteError(String);

impl WriteError {
    fn at(self, path: impl Into<PathBuf>) -> Error {
        Error::format(path, self.0)
    }
}

fn serialize_rows<W: Write, T: Serialize>(out: W, rows: &[T], header: bool) -> std::result::Result<(), WriteError> {
    let mut w = csv::WriterBuilder::new().has_headers(header).from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| WriteError(e.to_string()))?;
    }
    w.flush().map_err(|e| WriteError(e.to_string()))
}

/// Reads rows written by [`write_rows`].
pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::format(path, format!("row {}: {e}", i + 1))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineInfo {
    pub os: String,
    pub arch: String,
    pub logical_cpus: usize,
    pub worker_threads: usize,
}

impl MachineInfo {
    pub fn current() -> Self {
        Self {
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            logical_cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
            worker_threads: rayon::current_num_threads(),
        }
    }
}

/// Sidecar JSON written next to every output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMetadata {
    pub command: String,
    pub library_version: String,
    pub config: serde_json::Value,
    /// How the input was transformed before fitting.
    pub preprocessing: Vec<String>,
    pub machine: MachineInfo,
    /// Command-specific results: shapes, ε, eigenvalues.
    pub results: serde_json::Value,
}

impl RunMetadata {
    pub fn new(command: &str, config: &impl Serialize) -> Result<Self> {
        Ok(Self {
            command: command.to_string(),
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            config: serde_json::to_value(config).map_err(|e| Error::invalid(format!("config to JSON: {e}")))?,
            preprocessing: Vec::new(),
            machine: MachineInfo::current(),
            results: serde_json::Value::Null,
        })
    }

    pub fn write(&self, out: &Path) -> Result<PathBuf> {
        let path = meta_path(out);
        let mut text =
            serde_json::to_string_pretty(self).map_err(|e| Error::invalid(format!("metadata to JSON: {e}")))?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
    }
}

/// `<out>.meta.json`
pub fn meta_path(out: &Path) -> PathBuf {
    with_suffix(out, ".meta.json")
}

pub(crate) fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
