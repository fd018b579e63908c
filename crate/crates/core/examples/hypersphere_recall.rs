//! Neighbor recall of PCA against the diffusion map on noisy hyperspheres as
//! the sample-to-dimension ratio grows.

use ldm::ann::{exact_knn, knn_in_embedding, recall_at_k};
use ldm::datasets::gen_hypersphere;
use ldm::embed::{fit_ldm, fit_pca, LdmConfig};

fn main() -> ldm::Result<()> {
    let (dim, d, k) = (50, 10, 10);
    println!("{:>6} {:>6} {:>8} {:>8} {:>8}", "n", "gamma", "pca", "ldm", "diff");
    for n in [100, 400, 1600] {
        let ds = gen_hypersphere(n, dim, 0.05, n as u64)?;
        let exact = exact_knn(&ds.data, k)?;
        let pca = recall_at_k(&exact, &knn_in_embedding(&fit_pca(&ds.data, d, 0)?, k)?)?;
        let ldm = recall_at_k(&exact, &knn_in_embedding(&fit_ldm(&ds.data, &LdmConfig::new(d))?, k)?)?;
        println!("{n:>6} {:>6.1} {pca:>8.4} {ldm:>8.4} {:>+8.4}", n as f64 / dim as f64, pca - ldm);
    }
    Ok(())
}
