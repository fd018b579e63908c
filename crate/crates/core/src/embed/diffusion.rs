//! Dense diffusion-process references: transition matrix, stationary
//! distribution and diffusion distance. All are O(N²) or worse and meant for
//! validating the matrix-free embeddings on small inputs.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITER: usize = 100_000;

/// Row-normalizes a nonnegative kernel into `P_ij = k_ij / Σ_j k_ij`.
pub fn transition_matrix_dense(k: &DenseMatrix) -> Result<DenseMatrix> {
    if !k.is_square() {
        return Err(Error::invalid("transition matrix needs a square kernel"));
    }
    if k.min_entry() < 0.0 {
        return Err(Error::invalid(format!(
            "kernel has a negative entry ({:.3e})",
            k.min_entry()
        )));
    }
    let sums = k.row_sums();
    if let Some(index) = sums.iter().position(|&s| !(s > 0.0)) {
        return Err(Error::DegenerateNormalization {
            index,
            value: sums[index],
        });
    }
    let n = k.rows();
    DenseMatrix::from_fn(n, n, |i, j| k.get(i, j) / sums[i])
}

/// Closed form `π_i = k_i / Σ_j k_j` for the walk on a symmetric kernel.
pub fn stationary_from_kernel(k: &DenseMatrix) -> Result<Vec<f64>> {
    let degrees = k.row_sums();
    let total: f64 = degrees.iter().sum();
    if !(total > 0.0) {
        return Err(Error::invalid("kernel has no positive mass"));
    }
    Ok(degrees.into_iter().map(|d| d / total).collect())
}

/// Left fixed point `πᵀP = πᵀ` of a row-stochastic matrix.
///
/// Power iteration on the lazy chain `(I + P)/2`, which shares the fixed point
/// and cannot oscillate on periodic chains. Reducible chains have no unique
/// fixed point and are reported as a convergence failure.
pub fn stationary_distribution(p: &DenseMatrix) -> Result<Vec<f64>> {
    if !p.is_square() || p.rows() == 0 {
        return Err(Error::invalid("stationary distribution needs a nonempty square matrix"));
    }
    if p.min_entry() < 0.0 {
        return Err(Error::invalid("transition matrix has negative entries"));
    }
    for (i, s) in p.row_sums().into_iter().enumerate() {
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("row {i} sums to {s}, not 1")));
        }
    }
    if !is_irreducible(p) {
        return Err(Error::Convergence {
            iterations: 0,
            worst: f64::INFINITY,
            residuals: Vec::new(),
        });
    }

    let n = p.rows();
    let mut pi = vec![1.0 / n as f64; n];
    let mut step = 0.0;
    for iter in 1..=POWER_MAX_ITER {
        let pt = p.t_matvec(&pi);
        let mut next: Vec<f64> = pi.iter().zip(&pt).map(|(a, b)| 0.5 * (a + b)).collect();
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        step = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if step <= POWER_TOL && iter > 1 {
            return Ok(pi);
        }
    }
    Err(Error::Convergence {
        iterations: POWER_MAX_ITER,
        worst: step,
        residuals: vec![step],
    })
}

fn is_irreducible(p: &DenseMatrix) -> bool {
    let n = p.rows();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                let w = if forward { p.get(i, j) } else { p.get(j, i) };
                if w > 0.0 && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Diffusion distance `D_t(i,j) = sqrt(Σ_k (P^t_ik − P^t_jk)² / π_k)` by
/// explicit matrix powers. O(N³·t).
pub fn diffusion_distance_oracle(p: &DenseMatrix, pi: &[f64], t: u32) -> Result<DenseMatrix> {
    if !p.is_square() || pi.len() != p.rows() {
        return Err(Error::invalid("transition matrix and stationary vector disagree in size"));
    }
    if t == 0 {
        return Err(Error::invalid("diffusion time must be at least 1"));
    }
    if let Some(k) = pi.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::invalid(format!("stationary weight {k} is not positive")));
    }
    let mut pt = p.clone();
    for _ in 1..t {
        pt = pt.matmul(p)?;
    }
    let n = p.rows();
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let s: f64 = (0..n)
                .map(|k| (pt.get(i, k) - pt.get(j, k)).powi(2) / pi[k])
                .sum();
            let d = s.sqrt();
            out.set(i, j, d);
            out.set(j, i, d);
        }
    }
    Ok(out)
}
