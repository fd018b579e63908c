//! Top eigenpairs of the matrix-free diffusion operator, checked against a
//! dense eigensolver on the materialized matrix.

use ldm::kernels::{default_epsilon, ldm_operator, LdmVariant};
use ldm::linalg::operator::materialize;
use ldm::linalg::{dense_eig_symmetric, lanczos_symmetric, LanczosConfig};

fn main() -> ldm::Result<()> {
    let ds = ldm::datasets::gen_swiss_roll(400, 0.1, 3)?;
    let op = ldm_operator(&ds.data, default_epsilon(&ds.data), LdmVariant::Symmetric)?;

    let lz = lanczos_symmetric(&op, 6, &LanczosConfig::with_seed(0))?;
    let dense = dense_eig_symmetric(&materialize(&op))?.truncate(6);

    println!("{:>3} {:>14} {:>14} {:>10}", "i", "lanczos", "dense", "abs err");
    for (i, (a, b)) in lz.eigenvalues.iter().zip(&dense.eigenvalues).enumerate() {
        println!("{i:>3} {a:>14.10} {b:>14.10} {:>10.2e}", (a - b).abs());
    }
    Ok(())
}
