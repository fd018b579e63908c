//! Fit pipelines: dataset → operator → Lanczos → latent coordinates.
//!
//! PCA coordinates are the covariance-kernel eigenvectors scaled by `√λ`, so
//! Euclidean distances in the embedding approximate centered ambient distances.
//!
//! LDM solves the symmetric diffusion operator `S = diag(k)^(-1/2) k diag(k)^(-1/2)`
//! and maps each eigenvector `φ` to the right eigenvector of the random-walk
//! operator, `ψ_i = φ_i / √π_i` with `π = k / Σk`. Under that normalization
//! the constant vector is the trivial pair and, over the full spectrum,
//! `‖λ^t ψ_i − λ^t ψ_j‖` equals the diffusion distance at time `t`.

pub mod diffusion;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{default_epsilon, ldm_operator_with, pca_operator, KernelParams, LdmVariant};
use crate::linalg::{dot, lanczos_symmetric, DataMatrix, DenseMatrix, EigenResult, LanczosConfig};

pub use diffusion::{
    diffusion_distance_oracle, stationary_distribution, stationary_from_kernel, transition_matrix_dense,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Pca,
    Ldm,
    LdmA,
}

impl Method {
    pub fn variant(self) -> Option<LdmVariant> {
        match self {
            Method::Pca => None,
            Method::Ldm => Some(LdmVariant::Symmetric),
            Method::LdmA => Some(LdmVariant::Asymmetric),
        }
    }
}

impl From<LdmVariant> for Method {
    fn from(v: LdmVariant) -> Self {
        match v {
            LdmVariant::Symmetric => Method::Ldm,
            LdmVariant::Asymmetric => Method::LdmA,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Pca => "pca",
            Method::Ldm => "ldm",
            Method::LdmA => "ldm-a",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pca" => Ok(Method::Pca),
            "ldm" => Ok(Method::Ldm),
            "ldm-a" | "ldma" => Ok(Method::LdmA),
            other => Err(Error::invalid(format!("unknown method {other:?}"))),
        }
    }
}

/// How ε is chosen: `4 max‖r‖²` or a fixed value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum EpsilonMode {
    #[default]
    Auto,
    Fixed(f64),
}

impl EpsilonMode {
    pub fn resolve(self, r: &DataMatrix) -> f64 {
        match self {
            EpsilonMode::Auto => default_epsilon(r),
            EpsilonMode::Fixed(v) => v,
        }
    }
}

impl fmt::Display for EpsilonMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonMode::Auto => f.write_str("auto"),
            EpsilonMode::Fixed(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for EpsilonMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(EpsilonMode::Auto);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::invalid(format!("epsilon must be 'auto' or a number, got {s:?}")))?;
        if v > 0.0 && v.is_finite() {
            Ok(EpsilonMode::Fixed(v))
        } else {
            Err(Error::invalid(format!("epsilon must be positive, got {v}")))
        }
    }
}

impl From<EpsilonMode> for String {
    fn from(e: EpsilonMode) -> String {
        e.to_string()
    }
}

impl TryFrom<String> for EpsilonMode {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Latent coordinates with their spectrum and fit metadata.
#[derive(Debug, Clone)]
pub struct Embedding {
    /// N×d coordinates, one row per sample.
    pub coords: DenseMatrix,
    /// Descending eigenvalues, one per coordinate column.
    pub eigenvalues: Vec<f64>,
    pub method: Method,
    /// ε used for LDM fits; `None` for PCA.
    pub epsilon: Option<f64>,
    pub diffusion_time: f64,
    pub dropped_trivial: bool,
}

impl Embedding {
    pub fn dim(&self) -> usize {
        self.coords.cols()
    }

    pub fn len(&self) -> usize {
        self.coords.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.rows() == 0
    }
}

/// PCA with the default Lanczos settings and the given start-vector seed.
pub fn fit_pca(r: &DataMatrix, d: usize, seed: u64) -> Result<Embedding> {
    fit_pca_with(r, d, &LanczosConfig::with_seed(seed))
}

pub fn fit_pca_with(r: &DataMatrix, d: usize, lanczos: &LanczosConfig) -> Result<Embedding> {
    let (n, dim) = r.shape();
    let max_d = n.saturating_sub(1).min(dim);
    if d == 0 || d > max_d {
        return Err(Error::invalid(format!(
            "PCA dimension {d} out of range 1..={max_d} for {n}x{dim} data"
        )));
    }
    let op = pca_operator(r)?;
    let eig = lanczos_symmetric(&op, d, lanczos).map_err(|e| e.context("PCA eigensolve"))?;
    let scales: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    let coords = scale_columns(&eig.eigenvectors, &scales);
    Ok(Embedding {
        coords,
        eigenvalues: eig.eigenvalues,
        method: Method::Pca,
        epsilon: None,
        diffusion_time: 0.0,
        dropped_trivial: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdmConfig {
    pub dim: usize,
    pub variant: LdmVariant,
    /// Diffusion time `t`; coordinates are scaled by `λ^t`.
    pub time: f64,
    pub epsilon: EpsilonMode,
    /// Discard the constant `λ = 1` pair.
    pub drop_trivial: bool,
    /// Report `ψ` without the `λ^t` factor, as if `t = 0`.
    pub raw_eigvecs: bool,
    /// Subtract the feature mean before building the kernel.
    pub center: bool,
    #[serde(skip)]
    pub lanczos: LanczosConfig,
}

impl LdmConfig {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            variant: LdmVariant::Symmetric,
            time: 1.0,
            epsilon: EpsilonMode::Auto,
            drop_trivial: true,
            raw_eigvecs: false,
            center: false,
            lanczos: LanczosConfig::default(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.lanczos.seed = seed;
        self
    }

    pub fn time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    pub fn variant(mut self, v: LdmVariant) -> Self {
        self.variant = v;
        self
    }

    pub fn epsilon(mut self, e: EpsilonMode) -> Self {
        self.epsilon = e;
        self
    }

    pub fn drop_trivial(mut self, drop: bool) -> Self {
        self.drop_trivial = drop;
        self
    }
}

/// Linearized diffusion map embedding.
///
/// Both variants solve the symmetric operator; the asymmetric operator is
/// similar to it through `diag(k)^(1/2)`, so the spectrum and the `ψ`
/// coordinates coincide and `variant` only labels the result.
pub fn fit_ldm(r: &DataMatrix, cfg: &LdmConfig) -> Result<Embedding> {
    let n = r.rows();
    let d = cfg.dim;
    let max_d = n.saturating_sub(1);
    if d == 0 || d > max_d {
        return Err(Error::invalid(format!("LDM dimension {d} out of range 1..={max_d} for N={n}")));
    }
    if !(cfg.time >= 0.0 && cfg.time.is_finite()) {
        return Err(Error::invalid(format!("diffusion time must be >= 0, got {}", cfg.time)));
    }
    let eps = cfg.epsilon.resolve(r);
    let params = KernelParams::new(eps)?.centered(cfg.center);
    let op = ldm_operator_with(r, &params, LdmVariant::Symmetric)?;

    let wanted = if cfg.drop_trivial { d + 1 } else { d };
    let eig = lanczos_symmetric(&op, wanted, &cfg.lanczos).map_err(|e| e.context("LDM eigensolve"))?;

    let degrees = op.degrees();
    let total: f64 = degrees.iter().sum();
    // φ → ψ = φ / √π
    let inv_sqrt_pi: Vec<f64> = degrees.iter().map(|k| (total / k).sqrt()).collect();

    let keep: Vec<usize> = if cfg.drop_trivial {
        let trivial = trivial_index(&eig, degrees);
        (0..wanted).filter(|&c| c != trivial).collect()
    } else {
        (0..wanted).collect()
    };

    let t = if cfg.raw_eigvecs { 0.0 } else { cfg.time };
    let eigenvalues: Vec<f64> = keep.iter().map(|&c| eig.eigenvalues[c]).collect();
    let mut coords = DenseMatrix::zeros(n, keep.len());
    for (out_c, &c) in keep.iter().enumerate() {
        let s = diffusion_scale(eig.eigenvalues[c], t);
        for i in 0..n {
            coords.set(i, out_c, s * eig.eigenvectors.get(i, c) * inv_sqrt_pi[i]);
        }
    }

    Ok(Embedding {
        coords,
        eigenvalues,
        method: cfg.variant.into(),
        epsilon: Some(eps),
        diffusion_time: t,
        dropped_trivial: cfg.drop_trivial,
    })
}

/// Column whose eigenvector is closest to `√k / ‖√k‖`, the `λ = 1` direction.
fn trivial_index(eig: &EigenResult, degrees: &[f64]) -> usize {
    let sqrt_k: Vec<f64> = degrees.iter().map(|k| k.sqrt()).collect();
    let nrm = dot(&sqrt_k, &sqrt_k).sqrt();
    (0..eig.len())
        .map(|c| (c, dot(&eig.vector(c), &sqrt_k).abs() / nrm))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}

/// `λ^t`, exact for integer `t`; for fractional `t` the sign of a negative
/// eigenvalue is kept, `sign(λ)|λ|^t`.
pub fn diffusion_scale(lambda: f64, t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else if t.fract() == 0.0 && t <= i32::MAX as f64 {
        lambda.powi(t as i32)
    } else {
        lambda.signum() * lambda.abs().powf(t)
    }
}

fn scale_columns(m: &DenseMatrix, scales: &[f64]) -> DenseMatrix {
    let mut out = m.clone();
    for i in 0..m.rows() {
        for (j, s) in scales.iter().enumerate() {
            out.set(i, j, m.get(i, j) * s);
        }
    }
    out
}
