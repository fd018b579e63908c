//! The matrix-free operator contract.
//!
//! An operator is known only through its matvec. Kernel operators built from a
//! dataset implement this in O(N·D) per application; [`DenseOperator`] wraps an
//! explicit matrix so the same solvers can be checked against dense algebra.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dot, norm, DenseMatrix};
use crate::error::{Error, Result};

/// A linear map on `dim`-vectors exposed only through its action.
pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;

    /// Writes `A @ x` into `y`. Both slices have length `dim()`.
    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    /// Whether `⟨u, A v⟩ = ⟨A u, v⟩` holds by construction.
    fn is_symmetric(&self) -> bool;

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply_into(x, y)
    }

    fn is_symmetric(&self) -> bool {
        (**self).is_symmetric()
    }
}

/// An explicit square matrix viewed as an operator.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    matrix: DenseMatrix,
    symmetric: bool,
}

impl DenseOperator {
    /// Wraps `matrix`; the symmetric flag is set when it is symmetric to 1e-12
    /// relative to its largest entry.
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid(format!(
                "operator matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let symmetric = matrix.is_symmetric(1e-12);
        Ok(Self { matrix, symmetric })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }
}

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (yi, row) in y.iter_mut().zip(self.matrix.rows_iter()) {
            *yi = dot(row, x);
        }
    }

    fn is_symmetric(&self) -> bool {
        self.symmetric
    }
}

/// Materializes an operator column by column. O(N) matvecs; tests and small
/// oracles only.
pub fn materialize(op: &dyn LinearOperator) -> DenseMatrix {
    let n = op.dim();
    let mut out = DenseMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply_into(&e, &mut col);
        for (i, &v) in col.iter().enumerate() {
            out.set(i, j, v);
        }
        e[j] = 0.0;
    }
    out
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Worst relative linearity defect `‖A(αu+βv) − αAu − βAv‖ / scale` over
/// `trials` random probes.
pub fn linearity_defect(op: &dyn LinearOperator, trials: usize, seed: u64) -> f64 {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let u = random_vec(&mut rng, n);
        let v = random_vec(&mut rng, n);
        let a: f64 = rng.random_range(-3.0..3.0);
        let b: f64 = rng.random_range(-3.0..3.0);
        let mix: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = op.apply(&mix);
        let au = op.apply(&u);
        let av = op.apply(&v);
        let rhs: Vec<f64> = au.iter().zip(&av).map(|(x, y)| a * x + b * y).collect();
        let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(x, y)| x - y).collect();
        let scale = (a.abs() * norm(&au) + b.abs() * norm(&av)).max(f64::MIN_POSITIVE);
        worst = worst.max(norm(&diff) / scale);
    }
    worst
}

/// Worst relative symmetry defect `|⟨u, Av⟩ − ⟨Au, v⟩| / (‖u‖‖Av‖ + ‖Au‖‖v‖)`.
pub fn symmetry_defect(op: &dyn LinearOperator, trials: usize, seed: u64) -> f64 {
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let u = random_vec(&mut rng, n);
        let v = random_vec(&mut rng, n);
        let au = op.apply(&u);
        let av = op.apply(&v);
        let scale = (norm(&u) * norm(&av) + norm(&au) * norm(&v)).max(f64::MIN_POSITIVE);
        worst = worst.max((dot(&u, &av) - dot(&au, &v)).abs() / scale);
    }
    worst
}
