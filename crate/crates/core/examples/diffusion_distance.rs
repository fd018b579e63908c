//! With every non-trivial eigenpair kept, Euclidean distance between
//! diffusion coordinates equals the diffusion distance of the Markov chain.

use ldm::embed::{diffusion_distance_oracle, fit_ldm, stationary_from_kernel, transition_matrix_dense, LdmConfig};
use ldm::kernels::{default_epsilon, linearized_rbf_dense};
use ldm::linalg::{pairwise_sq_dist, DenseMatrix};

fn main() -> ldm::Result<()> {
    let ds = ldm::datasets::gen_hypersphere(25, 4, 0.1, 11)?;
    let r = &ds.data;
    let n = r.rows();
    let k = linearized_rbf_dense(r, default_epsilon(r))?;
    let p = transition_matrix_dense(&k)?;
    let pi = stationary_from_kernel(&k)?;

    for t in 1..=3u32 {
        let oracle = diffusion_distance_oracle(&p, &pi, t)?;
        let e = fit_ldm(r, &LdmConfig::new(n - 1).time(f64::from(t)))?;
        let d2 = pairwise_sq_dist(&e.coords)?;
        let dist = DenseMatrix::from_fn(n, n, |i, j| d2.get(i, j).sqrt())?;
        println!("t={t}: rel err {:.2e}", dist.rel_diff(&oracle));
    }
    Ok(())
}
