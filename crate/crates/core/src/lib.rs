//! Matrix-free PCA and linearized diffusion maps.
//!
//! The linearized RBF kernel `k = 1 - D²/ε` never needs to be formed: every
//! matrix-vector product with it, with its normalized diffusion operator or
//! with the PCA covariance costs `O(N·D)`. A Lanczos solver on top of these
//! operators gives embeddings whose cost grows linearly in the sample count.
//!
//! - [`linalg`]: dense helpers, the [`linalg::LinearOperator`] trait, Lanczos.
//! - [`kernels`]: kernel builders, dense oracles and the matrix-free operators.
//! - [`embed`]: [`embed::fit_pca`] and [`embed::fit_ldm`].
//! - [`datasets`]: synthetic generators plus IDX, binary and CSV loaders.
//! - [`ann`]: exact k-nearest neighbors and recall.
//! - [`cli`]: the `ldm` command line.
//!
//! Runnable examples live in `examples/`: `identity_chain`, `lanczos_operator`,
//! `swiss_roll_embed`, `diffusion_distance`, `hypersphere_recall` and
//! `mnist_recall`.
//!
//! ```
//! use ldm::datasets::gen_swiss_roll;
//! use ldm::embed::{fit_ldm, LdmConfig};
//!
//! let ds = gen_swiss_roll(300, 0.05, 0).unwrap();
//! let e = fit_ldm(&ds.data, &LdmConfig::new(2)).unwrap();
//! assert_eq!(e.coords.shape(), (300, 2));
//! ```

pub mod ann;
pub mod cli;
pub mod datasets;
pub mod embed;
pub mod error;
pub mod kernels;
pub mod linalg;

pub use error::{Error, Result};
