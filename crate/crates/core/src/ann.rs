//! Exact k-nearest neighbors and the recall@k score.
//!
//! Search is brute force. The approximation under study lives entirely in the
//! embedding, so neighbors in latent space are computed exactly as well.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::linalg::DataMatrix;

/// Rows handled per parallel task.
const ROW_BLOCK: usize = 64;

/// `n × k` neighbor indices, nearest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborList {
    indices: Vec<usize>,
    n: usize,
    k: usize,
}

impl NeighborList {
    /// Validates the invariants: indices in range, no self, no duplicates.
    pub fn from_vec(n: usize, k: usize, indices: Vec<usize>) -> Result<Self> {
        if indices.len() != n * k {
            return Err(Error::invalid(format!("{n}x{k} neighbor list needs {} indices", n * k)));
        }
        for (i, row) in indices.chunks(k.max(1)).enumerate().take(n) {
            for (a, &j) in row.iter().enumerate() {
                if j >= n || j == i || row[..a].contains(&j) {
                    return Err(Error::invalid(format!("row {i}: invalid neighbor {j}")));
                }
            }
        }
        Ok(Self { indices, n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.indices[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> + '_ {
        (0..self.n).map(move |i| self.row(i))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        let header: Vec<String> = std::iter::once("point".to_string())
            .chain((1..=self.k).map(|j| format!("nn{j}")))
            .collect();
        w.write_record(&header).map_err(csv_err)?;
        for (i, row) in self.rows().enumerate() {
            w.write_record(std::iter::once(i).chain(row.iter().copied()).map(|v| v.to_string()))
                .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::invalid(format!("csv write failed: {e}"))
}

/// Exact kNN by Euclidean distance, excluding each point itself. Ties go to
/// the lower index. Distances are summed coordinate differences rather than
/// the expanded `‖x‖² + ‖y‖² − 2⟨x, y⟩`, so exact ties stay exact.
pub fn exact_knn(r: &DataMatrix, k: usize) -> Result<NeighborList> {
    let n = r.rows();
    if k == 0 || k + 1 > n {
        return Err(Error::invalid(format!("k = {k} out of range 1..={} for N = {n}", n.saturating_sub(1))));
    }
    let mut indices = vec![0usize; n * k];
    indices
        .par_chunks_mut(ROW_BLOCK * k)
        .enumerate()
        .for_each(|(block, out)| {
            let mut cand: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
            for (local, dst) in out.chunks_mut(k).enumerate() {
                let i = block * ROW_BLOCK + local;
                let ri = r.row(i);
                cand.clear();
                cand.extend((0..n).filter(|&j| j != i).map(|j| {
                    let d: f64 = ri.iter().zip(r.row(j)).map(|(a, b)| (a - b) * (a - b)).sum();
                    (d, j)
                }));
                let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
                if k < cand.len() {
                    cand.select_nth_unstable_by(k - 1, cmp);
                }
                cand[..k].sort_unstable_by(cmp);
                for (d, c) in dst.iter_mut().zip(&cand[..k]) {
                    *d = c.1;
                }
            }
        });
    Ok(NeighborList { indices, n, k })
}

pub fn knn_in_embedding(e: &Embedding, k: usize) -> Result<NeighborList> {
    exact_knn(&e.coords, k)
}

/// Mean per-row fraction of shared neighbors, `(1/N) Σ_i |A_i ∩ B_i| / k`.
pub fn recall_at_k(a: &NeighborList, b: &NeighborList) -> Result<f64> {
    if a.n != b.n || a.k != b.k {
        return Err(Error::invalid(format!(
            "neighbor lists differ in shape: {}x{} vs {}x{}",
            a.n, a.k, b.n, b.k
        )));
    }
    overlap(a.rows(), b.rows(), a.n, a.k)
}

/// recall@k over arbitrary equal-width index rows, without the
/// [`NeighborList`] invariants.
pub fn recall_from_rows<R: AsRef<[usize]>>(a: &[R], b: &[R]) -> Result<f64> {
    let k = a.first().map_or(0, |r| r.as_ref().len());
    if a.len() != b.len() || a.iter().chain(b).any(|r| r.as_ref().len() != k) {
        return Err(Error::invalid("neighbor rows differ in shape"));
    }
    overlap(a.iter().map(AsRef::as_ref), b.iter().map(AsRef::as_ref), a.len(), k)
}

fn overlap<'a>(
    a: impl Iterator<Item = &'a [usize]>,
    b: impl Iterator<Item = &'a [usize]>,
    n: usize,
    k: usize,
) -> Result<f64> {
    if n == 0 || k == 0 {
        return Err(Error::invalid("recall of empty neighbor lists"));
    }
    let hits: usize = a.zip(b).map(|(ra, rb)| ra.iter().filter(|j| rb.contains(j)).count()).sum();
    Ok(hits as f64 / (n * k) as f64)
}
