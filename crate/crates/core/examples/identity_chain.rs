//! Double-centering the linearized RBF kernel recovers the scaled MDS Gram
//! matrix, so the kernel built from squared distances carries the same
//! information as PCA.

use ldm::kernels::{default_epsilon, double_center, linearized_rbf_dense, mds_kernel_dense};
use ldm::linalg::DenseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> ldm::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let r = DenseMatrix::from_fn(50, 6, |_, j| rng.random_range(-1.0..1.0) + j as f64)?;
    let eps = default_epsilon(&r);

    let k = linearized_rbf_dense(&r, eps)?;
    let hkh = double_center(&k)?;
    let mds = mds_kernel_dense(&r)?.scaled(2.0 / eps);

    println!("epsilon            = {eps:.4}");
    println!("min kernel entry   = {:.4}", k.min_entry());
    println!("rel |HkH - 2/eps M| = {:.3e}", hkh.rel_diff(&mds));
    Ok(())
}
