//! Kernel matrices and the matrix-free kernel operators.
//!
//! The dense builders (`*_dense`, [`double_center`]) materialize N×N matrices
//! and exist as references for small problems. The operators ([`PcaOperator`],
//! [`LinearizedRbfOperator`], [`LdmOperator`]) never form the kernel: each
//! matvec costs O(N·D) using only the data, the squared row norms and ε.
//!
//! The linearized RBF kernel is the first-order expansion of `exp(−‖x−y‖²/ε)`:
//!
//! ```text
//! k_ij = 1 − (‖r_i‖² + ‖r_j‖² − 2⟨r_i, r_j⟩) / ε
//! ```
//!
//! which splits into a rank-one term in `1 − ‖r_i‖²/ε`, a rank-one term in
//! `‖r_j‖²/ε`, and the Gram term `(2/ε) R Rᵀ`.

use std::fmt;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, pairwise_sq_dist, row_norms_sq, DataMatrix, DenseMatrix, LinearOperator};

/// Degrees at or below this are treated as a degenerate normalization.
pub const DEGREE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    /// Squared-distance scale ε.
    pub epsilon: f64,
    /// Subtract the feature mean before building the kernel.
    pub center: bool,
}

impl KernelParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self {
            epsilon,
            center: false,
        })
    }

    pub fn centered(mut self, center: bool) -> Self {
        self.center = center;
        self
    }
}

/// Normalization applied to the linearized kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LdmVariant {
    /// `diag(k)^(-1/2) · k · diag(k)^(-1/2)`
    #[default]
    Symmetric,
    /// `diag(k)^(-1) · k`, the random-walk transition operator
    Asymmetric,
}

impl fmt::Display for LdmVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LdmVariant::Symmetric => "symmetric",
            LdmVariant::Asymmetric => "asymmetric",
        })
    }
}

impl FromStr for LdmVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" | "sym" => Ok(LdmVariant::Symmetric),
            "asymmetric" | "asym" => Ok(LdmVariant::Asymmetric),
            other => Err(Error::invalid(format!("unknown LDM variant {other:?}"))),
        }
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("epsilon must be positive and finite, got {eps}")))
    }
}

fn check_data(r: &DataMatrix) -> Result<()> {
    if r.is_empty() {
        Err(Error::invalid("dataset is empty"))
    } else {
        Ok(())
    }
}

/// Gaussian RBF kernel `exp(−D²_ij / ε)`.
pub fn rbf_kernel_dense(r: &DataMatrix, eps: f64) -> Result<DenseMatrix> {
    check_epsilon(eps)?;
    let d2 = pairwise_sq_dist(r)?;
    Ok(DenseMatrix::from_raw(
        d2.rows(),
        d2.cols(),
        d2.as_slice().iter().map(|v| (-v / eps).exp()).collect(),
    ))
}

/// First-order RBF kernel `1 − D²_ij / ε`.
///
/// Entries are nonnegative whenever `eps ≥ max D²_ij`, which
/// [`default_epsilon`] guarantees.
pub fn linearized_rbf_dense(r: &DataMatrix, eps: f64) -> Result<DenseMatrix> {
    check_epsilon(eps)?;
    let d2 = pairwise_sq_dist(r)?;
    Ok(DenseMatrix::from_raw(
        d2.rows(),
        d2.cols(),
        d2.as_slice().iter().map(|v| 1.0 - v / eps).collect(),
    ))
}

/// `4 · max_i ‖r_i‖²`, an upper bound on every squared pairwise distance
/// (`‖x − y‖ ≤ ‖x‖ + ‖y‖ ≤ 2 max‖r‖`). Falls back to 1.0 for all-zero data.
pub fn default_epsilon(r: &DataMatrix) -> f64 {
    let max_sq = row_norms_sq(r).into_iter().fold(0.0_f64, f64::max);
    if max_sq > 0.0 {
        4.0 * max_sq
    } else {
        1.0
    }
}

/// `k_ij − mean_i(k_·j) − mean_j(k_i·) + mean(k)`, i.e. `H k H` with
/// `H = I − 11ᵀ/N`.
pub fn double_center(k: &DenseMatrix) -> Result<DenseMatrix> {
    if !k.is_square() {
        return Err(Error::invalid(format!(
            "double centering needs a square matrix, got {}x{}",
            k.rows(),
            k.cols()
        )));
    }
    let n = k.rows();
    let nf = n.max(1) as f64;
    let row_means: Vec<f64> = k.row_sums().into_iter().map(|s| s / nf).collect();
    let col_means: Vec<f64> = k.col_sums().into_iter().map(|s| s / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    let mut out = k.clone();
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, k.get(i, j) - col_means[j] - row_means[i] + grand);
        }
    }
    Ok(out)
}

/// Classical MDS kernel `−½ H D² H`, built from the distance matrix.
pub fn mds_kernel_dense(r: &DataMatrix) -> Result<DenseMatrix> {
    let d2 = pairwise_sq_dist(r)?;
    Ok(double_center(&d2)?.scaled(-0.5))
}

/// Centered Gram matrix `C Cᵀ` with `C = R − 1μᵀ`.
pub fn centered_gram(r: &DataMatrix) -> Result<DenseMatrix> {
    check_data(r)?;
    Ok(r.centered().gram())
}

/// Sample covariance kernel `C Cᵀ / (N − 1)` as a matvec.
#[derive(Debug, Clone)]
pub struct PcaOperator {
    centered: DenseMatrix,
    scale: f64,
}

pub fn pca_operator(r: &DataMatrix) -> Result<PcaOperator> {
    check_data(r)?;
    if r.rows() < 2 {
        return Err(Error::invalid("PCA needs at least two samples (Bessel divisor N-1)"));
    }
    Ok(PcaOperator {
        centered: r.centered(),
        scale: 1.0 / (r.rows() - 1) as f64,
    })
}

impl PcaOperator {
    /// The mean-subtracted data `C`.
    pub fn centered_data(&self) -> &DenseMatrix {
        &self.centered
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl LinearOperator for PcaOperator {
    fn dim(&self) -> usize {
        self.centered.rows()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let g = self.centered.t_matvec(x);
        for (yi, row) in y.iter_mut().zip(self.centered.rows_iter()) {
            *yi = self.scale * dot(row, &g);
        }
    }

    fn is_symmetric(&self) -> bool {
        true
    }
}

/// Shared state of the linearized kernel: data, squared norms and ε.
#[derive(Debug, Clone)]
struct LinearizedParts {
    data: DenseMatrix,
    r_sq: Vec<f64>,
    epsilon: f64,
}

impl LinearizedParts {
    fn new(r: &DataMatrix, params: &KernelParams) -> Result<Self> {
        check_data(r)?;
        check_epsilon(params.epsilon)?;
        let data = if params.center { r.centered() } else { r.clone() };
        let r_sq = row_norms_sq(&data);
        Ok(Self {
            data,
            r_sq,
            epsilon: params.epsilon,
        })
    }

    /// `y_i = (1 − r²_i/ε) Σu − (Σ r²_j u_j)/ε + (2/ε) ⟨r_i, Rᵀu⟩`
    fn kernel_apply(&self, u: &[f64], y: &mut [f64]) {
        let eps = self.epsilon;
        let s1: f64 = u.iter().sum();
        let s2 = dot(&self.r_sq, u);
        let g = self.data.t_matvec(u);
        for ((yi, row), &rsq) in y.iter_mut().zip(self.data.rows_iter()).zip(&self.r_sq) {
            *yi = (1.0 - rsq / eps) * s1 - s2 / eps + (2.0 / eps) * dot(row, &g);
        }
    }

    fn degrees(&self) -> Vec<f64> {
        let ones = vec![1.0; self.data.rows()];
        let mut k = vec![0.0; ones.len()];
        self.kernel_apply(&ones, &mut k);
        k
    }
}

/// The unnormalized linearized RBF kernel as a matvec.
#[derive(Debug, Clone)]
pub struct LinearizedRbfOperator {
    parts: LinearizedParts,
}

pub fn linearized_rbf_operator(r: &DataMatrix, eps: f64) -> Result<LinearizedRbfOperator> {
    Ok(LinearizedRbfOperator {
        parts: LinearizedParts::new(r, &KernelParams::new(eps)?)?,
    })
}

impl LinearOperator for LinearizedRbfOperator {
    fn dim(&self) -> usize {
        self.parts.data.rows()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.parts.kernel_apply(x, y)
    }

    fn is_symmetric(&self) -> bool {
        true
    }
}

/// Row sums `k_i` of the linearized kernel, in O(N·D).
///
/// Fails with [`Error::DegenerateNormalization`] if any degree is at or below
/// [`DEGREE_FLOOR`].
pub fn ldm_degrees(r: &DataMatrix, eps: f64) -> Result<Vec<f64>> {
    let parts = LinearizedParts::new(r, &KernelParams::new(eps)?)?;
    let k = parts.degrees();
    check_degrees(&k)?;
    Ok(k)
}

fn check_degrees(k: &[f64]) -> Result<()> {
    match k.iter().position(|&v| !(v > DEGREE_FLOOR)) {
        Some(index) => Err(Error::DegenerateNormalization {
            index,
            value: k[index],
        }),
        None => Ok(()),
    }
}

/// Diffusion-normalized linearized kernel.
///
/// Holds `{N_i, R²_i, R_iX, ε}` and the degrees; the ones vector is implicit.
/// The symmetric variant applies `N_i k_ij N_j` with `N_i = k_i^(-1/2)`; the
/// asymmetric variant applies `N_i k_ij` with `N_i = k_i^(-1)`.
#[derive(Debug, Clone)]
pub struct LdmOperator {
    parts: LinearizedParts,
    degrees: Vec<f64>,
    norm: Vec<f64>,
    variant: LdmVariant,
}

pub fn ldm_operator(r: &DataMatrix, eps: f64, variant: LdmVariant) -> Result<LdmOperator> {
    ldm_operator_with(r, &KernelParams::new(eps)?, variant)
}

pub fn ldm_operator_with(r: &DataMatrix, params: &KernelParams, variant: LdmVariant) -> Result<LdmOperator> {
    let parts = LinearizedParts::new(r, params)?;
    let bound = default_epsilon(&parts.data);
    if params.epsilon < bound * (1.0 - 1e-12) {
        warn!(
            "epsilon {} is below the positivity bound {}; kernel entries may be negative",
            params.epsilon, bound
        );
    }
    let degrees = parts.degrees();
    check_degrees(&degrees)?;
    let norm = normalization(&degrees, variant);
    Ok(LdmOperator {
        parts,
        degrees,
        norm,
        variant,
    })
}

fn normalization(degrees: &[f64], variant: LdmVariant) -> Vec<f64> {
    match variant {
        LdmVariant::Symmetric => degrees.iter().map(|k| k.sqrt().recip()).collect(),
        LdmVariant::Asymmetric => degrees.iter().map(|k| k.recip()).collect(),
    }
}

impl LdmOperator {
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// The per-point normalization `N_i`.
    pub fn normalization(&self) -> &[f64] {
        &self.norm
    }

    pub fn squared_norms(&self) -> &[f64] {
        &self.parts.r_sq
    }

    pub fn data(&self) -> &DenseMatrix {
        &self.parts.data
    }

    pub fn epsilon(&self) -> f64 {
        self.parts.epsilon
    }

    pub fn variant(&self) -> LdmVariant {
        self.variant
    }

    /// Whether ε is below `4 max‖r‖²`, where kernel entries may go negative.
    pub fn below_positivity_bound(&self) -> bool {
        self.parts.epsilon < default_epsilon(&self.parts.data) * (1.0 - 1e-12)
    }

    /// The same kernel under the other normalization; degrees are reused.
    pub fn with_variant(&self, variant: LdmVariant) -> LdmOperator {
        LdmOperator {
            parts: self.parts.clone(),
            degrees: self.degrees.clone(),
            norm: normalization(&self.degrees, variant),
            variant,
        }
    }
}

impl LinearOperator for LdmOperator {
    fn dim(&self) -> usize {
        self.parts.data.rows()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        match self.variant {
            LdmVariant::Symmetric => {
                let u: Vec<f64> = x.iter().zip(&self.norm).map(|(v, n)| v * n).collect();
                self.parts.kernel_apply(&u, y);
            }
            LdmVariant::Asymmetric => self.parts.kernel_apply(x, y),
        }
        for (yi, n) in y.iter_mut().zip(&self.norm) {
            *yi *= n;
        }
    }

    fn is_symmetric(&self) -> bool {
        self.variant == LdmVariant::Symmetric
    }
}
