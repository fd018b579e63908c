//! Lanczos iteration for the leading eigenpairs of a symmetric operator.
//!
//! Every new Krylov vector is orthogonalized twice against the whole stored
//! basis, so the tridiagonal projection stays faithful even after many steps.
//! When the recurrence collapses (an invariant subspace was found) the run
//! restarts from a fresh random vector orthogonal to everything so far; that is
//! how repeated eigenvalues and null spaces get resolved.
//!
//! A pair is accepted once its true residual `‖A y − θ y‖` is at most
//! `tol · max(1, |θ|)`. The cheap estimate `|β_m · s_m|` from the recurrence is
//! used only to decide when to compute the true residuals.

use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tridiag::tridiag_eigen;
use super::{axpy, descending_order, dot, norm, DenseMatrix, EigenResult, LinearOperator};
use crate::error::{Error, Result};

/// Relative size of `β` below which the recurrence is treated as broken down.
const BREAKDOWN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosConfig {
    /// Cap on the Krylov basis size; `None` means `10·d + 100`. Never more
    /// than the operator dimension.
    pub max_iter: Option<usize>,
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            max_iter: None,
            tol: 1e-10,
            seed: 0,
        }
    }
}

impl LanczosConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn max_iter_for(&self, d: usize) -> usize {
        self.max_iter.unwrap_or(10 * d + 100)
    }
}

struct Krylov {
    basis: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    /// `beta[j]` couples basis vectors j and j+1; zero across restarts.
    beta: Vec<f64>,
    anorm: f64,
}

impl Krylov {
    fn orthogonalize(&self, w: &mut [f64]) {
        for _ in 0..2 {
            for q in &self.basis {
                let c = dot(q, w);
                axpy(-c, q, w);
            }
        }
    }

    /// Ritz pairs for the current basis, unsorted, with full eigenvectors of T.
    fn ritz(&self, wanted_rows: &[usize]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let m = self.alpha.len();
        let eig = tridiag_eigen(&self.alpha, &self.beta[..m - 1], wanted_rows)?;
        Ok((eig.values, eig.rows))
    }

    fn threshold(&self, tol: f64, theta: f64) -> f64 {
        // floor at round-off level of the operator norm
        (tol * theta.abs().max(1.0)).max(1e3 * f64::EPSILON * self.anorm)
    }
}

/// Leading `d` eigenpairs (by algebraic value) of a symmetric operator.
///
/// `d` may equal the operator dimension; the basis then spans the whole space
/// and the decomposition is complete.
pub fn lanczos_symmetric(op: &dyn LinearOperator, d: usize, cfg: &LanczosConfig) -> Result<EigenResult> {
    let n = op.dim();
    if !op.is_symmetric() {
        return Err(Error::ContractViolation(
            "Lanczos requires a symmetric operator".into(),
        ));
    }
    if d == 0 || d > n {
        return Err(Error::invalid(format!(
            "requested {d} eigenpairs from a {n}-dimensional operator"
        )));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {}", cfg.tol)));
    }
    let cap = cfg.max_iter_for(d).min(n);
    if cap < d {
        return Err(Error::invalid(format!(
            "max_iter {cap} is smaller than the {d} requested pairs"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut kr = Krylov {
        basis: Vec::with_capacity(cap),
        alpha: Vec::with_capacity(cap),
        beta: Vec::with_capacity(cap),
        anorm: 0.0,
    };
    let start = fresh_direction(&kr, &mut rng, n).expect("empty basis always admits a direction");
    kr.basis.push(start);

    let mut block_start = 0usize;
    let mut best_residuals: Vec<f64> = vec![f64::INFINITY; d];
    let mut w = vec![0.0; n];

    loop {
        let j = kr.basis.len() - 1;
        op.apply_into(&kr.basis[j], &mut w);
        let a = dot(&kr.basis[j], &w);
        axpy(-a, &kr.basis[j], &mut w);
        if j > block_start {
            axpy(-kr.beta[j - 1], &kr.basis[j - 1], &mut w);
        }
        kr.orthogonalize(&mut w);
        let b = norm(&w);
        kr.alpha.push(a);
        let prev = if j > 0 { kr.beta[j - 1] } else { 0.0 };
        kr.anorm = kr.anorm.max(a.abs() + b + prev);

        let m = kr.alpha.len();
        let breakdown = b <= BREAKDOWN * kr.anorm.max(f64::MIN_POSITIVE);
        let complete = m == n;
        let exhausted = m >= cap;
        // provisional coupling so ritz() sees m−1 off-diagonals
        kr.beta.push(if breakdown { 0.0 } else { b });

        let due = m >= d && (m < 50 || m % 5 == 0 || breakdown || complete || exhausted);
        if due {
            let (values, last) = kr.ritz(&[m - 1])?;
            let order = descending_order(&values);
            let top = &order[..d];
            let trailing = if breakdown { 0.0 } else { b };
            let est_ok = top
                .iter()
                .all(|&i| (trailing * last[0][i]).abs() <= kr.threshold(cfg.tol, values[i]));
            // After a breakdown the current block has found every distinct
            // eigenvalue left in its complement; anything still unseen is a copy
            // of one of them, so the top d are settled once this block's largest
            // value does not exceed the d-th.
            let block_ok = if breakdown {
                let block_max = tridiag_eigen(&kr.alpha[block_start..], &kr.beta[block_start..m - 1], &[])?
                    .values
                    .into_iter()
                    .fold(f64::NEG_INFINITY, f64::max);
                let dth = values[top[d - 1]];
                block_max <= dth + kr.threshold(cfg.tol, dth)
            } else {
                true
            };

            if (est_ok && block_ok) || complete {
                let result = assemble(&kr, d)?;
                let residuals = true_residuals(op, &result);
                let pass = residuals
                    .iter()
                    .zip(&result.eigenvalues)
                    .all(|(r, &theta)| *r <= kr.threshold(cfg.tol, theta));
                if pass {
                    debug!("lanczos converged: n={n} d={d} basis={m}");
                    return Ok(result);
                }
                best_residuals = residuals;
                if complete {
                    return Err(convergence_error(m, best_residuals));
                }
            } else if !est_ok {
                let est: Vec<f64> = top.iter().map(|&i| (trailing * last[0][i]).abs()).collect();
                if est.iter().fold(0.0_f64, |a, &r| a.max(r))
                    < best_residuals.iter().fold(0.0_f64, |a, &r| a.max(r))
                {
                    best_residuals = est;
                }
            }
        }

        if exhausted {
            return Err(convergence_error(m, best_residuals));
        }

        if breakdown {
            match fresh_direction(&kr, &mut rng, n) {
                Some(q) => {
                    block_start = m;
                    kr.basis.push(q);
                }
                None => {
                    // numerically complete basis
                    let result = assemble(&kr, d)?;
                    return Ok(result);
                }
            }
        } else {
            let inv = 1.0 / b;
            kr.basis.push(w.iter().map(|v| v * inv).collect());
        }
    }
}

fn convergence_error(iterations: usize, residuals: Vec<f64>) -> Error {
    let worst = residuals.iter().fold(0.0_f64, |a, &r| a.max(r));
    Error::Convergence {
        iterations,
        worst,
        residuals,
    }
}

/// Random unit vector orthogonal to the current basis, or `None` if the basis
/// already spans the space numerically.
fn fresh_direction(kr: &Krylov, rng: &mut ChaCha8Rng, n: usize) -> Option<Vec<f64>> {
    for _ in 0..3 {
        let mut q: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let before = norm(&q);
        kr.orthogonalize(&mut q);
        let after = norm(&q);
        if after > 1e-8 * before {
            let inv = 1.0 / after;
            q.iter_mut().for_each(|v| *v *= inv);
            return Some(q);
        }
    }
    None
}

fn assemble(kr: &Krylov, d: usize) -> Result<EigenResult> {
    let m = kr.alpha.len();
    let n = kr.basis[0].len();
    let rows: Vec<usize> = (0..m).collect();
    let (values, z) = kr.ritz(&rows)?;
    let order = descending_order(&values);
    let mut vecs = DenseMatrix::zeros(n, d);
    let mut eigenvalues = Vec::with_capacity(d);
    let mut y = vec![0.0; n];
    for (c, &i) in order.iter().take(d).enumerate() {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (k, q) in kr.basis.iter().enumerate() {
            axpy(z[k][i], q, &mut y);
        }
        let nrm = norm(&y);
        // sign convention: largest-magnitude component positive
        let pivot = y.iter().fold(0.0_f64, |p, &v| if v.abs() > p.abs() { v } else { p });
        let s = if pivot < 0.0 { -1.0 / nrm } else { 1.0 / nrm };
        for (r, &v) in y.iter().enumerate() {
            vecs.set(r, c, v * s);
        }
        eigenvalues.push(values[i]);
    }
    Ok(EigenResult {
        eigenvalues,
        eigenvectors: vecs,
    })
}

fn true_residuals(op: &dyn LinearOperator, result: &EigenResult) -> Vec<f64> {
    (0..result.len())
        .map(|c| {
            let v = result.vector(c);
            let mut av = op.apply(&v);
            axpy(-result.eigenvalues[c], &v, &mut av);
            norm(&av)
        })
        .collect()
}
