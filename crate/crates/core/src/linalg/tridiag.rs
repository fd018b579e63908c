//! Implicit-shift QL on a symmetric tridiagonal matrix.
//!
//! Rotations are accumulated only into the requested rows of the eigenvector
//! matrix. Lanczos convergence checks need just the last row, which keeps each
//! check O(m²) instead of O(m³).

use crate::error::{Error, Result};

pub(crate) struct TridiagEigen {
    /// Eigenvalues, unsorted.
    pub values: Vec<f64>,
    /// `rows[r][i]` is component `wanted[r]` of eigenvector `i`.
    pub rows: Vec<Vec<f64>>,
}

/// `diag` has length m, `offdiag[i]` couples i and i+1 (length m−1).
pub(crate) fn tridiag_eigen(diag: &[f64], offdiag: &[f64], wanted: &[usize]) -> Result<TridiagEigen> {
    let n = diag.len();
    debug_assert_eq!(offdiag.len() + 1, n.max(1));
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&offdiag[..n.saturating_sub(1)]);
    let mut z: Vec<Vec<f64>> = wanted
        .iter()
        .map(|&r| {
            let mut row = vec![0.0; n];
            row[r] = 1.0;
            row
        })
        .collect();

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::Convergence {
                    iterations: iter,
                    worst: e[l].abs(),
                    residuals: vec![e[l].abs()],
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    Ok(TridiagEigen { values: d, rows: z })
}
