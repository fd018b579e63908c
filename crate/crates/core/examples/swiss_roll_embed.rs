//! PCA and diffusion coordinates of a swiss roll, written as CSV next to the
//! roll parameter so they can be plotted.

use std::io::Write;

use ldm::datasets::gen_swiss_roll;
use ldm::embed::{fit_ldm, fit_pca, LdmConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = gen_swiss_roll(2000, 0.05, 1)?;
    let pca = fit_pca(&ds.data, 2, 0)?;
    let ldm = fit_ldm(&ds.data, &LdmConfig::new(2).seed(0))?;
    let labels = ds.labels.as_deref().unwrap_or_default();

    let out = std::env::temp_dir().join("swiss_roll_embed.csv");
    let mut f = std::io::BufWriter::new(std::fs::File::create(&out)?);
    writeln!(f, "t,pca1,pca2,ldm1,ldm2")?;
    for i in 0..ds.len() {
        let (p, l) = (pca.coords.row(i), ldm.coords.row(i));
        writeln!(f, "{},{},{},{},{}", labels[i], p[0], p[1], l[0], l[1])?;
    }
    println!("pca eigenvalues {:?}", pca.eigenvalues);
    println!("ldm eigenvalues {:?} (epsilon {:?})", ldm.eigenvalues, ldm.epsilon);
    println!("wrote {}", out.display());
    Ok(())
}
