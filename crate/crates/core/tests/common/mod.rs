//! Dense reference pipeline shared by the integration tests: brute-force
//! neighbors, hand-counted recall and full-eigendecomposition embeddings.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_rows(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
}

pub fn brute_knn(coords: &[Vec<f64>], k: usize) -> Vec<Vec<usize>> {
    (0..coords.len())
        .map(|i| {
            let mut d: Vec<(f64, usize)> = (0..coords.len())
                .filter(|&j| j != i)
                .map(|j| (coords[i].iter().zip(&coords[j]).map(|(a, b)| (a - b).powi(2)).sum(), j))
                .collect();
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            d[..k].iter().map(|p| p.1).collect()
        })
        .collect()
}

pub fn hand_recall(a: &[Vec<usize>], b: &[Vec<usize>]) -> f64 {
    let hits: usize = a.iter().zip(b).map(|(x, y)| x.iter().filter(|j| y.contains(j)).count()).sum();
    hits as f64 / (a.len() * a[0].len()) as f64
}

/// Eigenpairs of a symmetric matrix, descending.
pub fn sorted_eig(m: DMatrix<f64>) -> Vec<(f64, Vec<f64>)> {
    let e = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..e.eigenvalues.len())
        .map(|c| (e.eigenvalues[c], e.eigenvectors.column(c).iter().copied().collect()))
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    pairs
}

pub fn dense_pca(x: &[Vec<f64>], d: usize) -> Vec<Vec<f64>> {
    let (n, dim) = (x.len(), x[0].len());
    let mean: Vec<f64> = (0..dim).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let c: Vec<Vec<f64>> = x.iter().map(|r| r.iter().zip(&mean).map(|(a, m)| a - m).collect()).collect();
    // feature-space covariance, D×D
    let cov = DMatrix::from_fn(dim, dim, |a, b| c.iter().map(|r| r[a] * r[b]).sum::<f64>() / (n - 1) as f64);
    let axes = sorted_eig(cov);
    c.iter()
        .map(|r| (0..d).map(|k| r.iter().zip(&axes[k].1).map(|(a, b)| a * b).sum()).collect())
        .collect()
}

pub fn dense_ldm(x: &[Vec<f64>], d: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let eps = 4.0 * x.iter().map(|r| r.iter().map(|v| v * v).sum::<f64>()).fold(0.0, f64::max);
    let dist2 = |i: usize, j: usize| x[i].iter().zip(&x[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    let k = DMatrix::from_fn(n, n, |i, j| 1.0 - dist2(i, j) / eps);
    let deg: Vec<f64> = (0..n).map(|i| k.row(i).sum()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| k[(i, j)] / (deg[i] * deg[j]).sqrt());
    let pairs = sorted_eig(s);
    // pairs[0] is the stationary direction with λ = 1
    (0..n)
        .map(|i| (1..=d).map(|c| pairs[c].0 * pairs[c].1[i] / deg[i].sqrt()).collect())
        .collect()
}
