//! Full symmetric eigendecomposition, used as the reference for the Lanczos
//! path. Backed by nalgebra's symmetric QR iteration.

use nalgebra::DMatrix;

use super::{descending_order, DenseMatrix, EigenResult};
use crate::error::{Error, Result};

/// All eigenpairs of a symmetric matrix, eigenvalues descending.
pub fn dense_eig_symmetric(k: &DenseMatrix) -> Result<EigenResult> {
    if !k.is_square() {
        return Err(Error::invalid(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            k.rows(),
            k.cols()
        )));
    }
    if !k.is_symmetric(1e-10) {
        return Err(Error::invalid(format!(
            "matrix is not symmetric (max asymmetry {:.3e})",
            k.asymmetry()
        )));
    }
    let n = k.rows();
    if n == 0 {
        return Ok(EigenResult {
            eigenvalues: Vec::new(),
            eigenvectors: DenseMatrix::zeros(0, 0),
        });
    }
    // symmetrize exactly so the solver sees a clean input
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (k.get(i, j) + k.get(j, i)));
    let eig = m.symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = descending_order(&values);
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let eigenvectors = DenseMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])])?;
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
    })
}
