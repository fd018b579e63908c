//! Recall curve on an IDX image file (the bundled 5000-digit MNIST subset by
//! default). Pass another `*-images-idx3-ubyte[.gz]` path to use it instead.

use std::path::PathBuf;

use ldm::cli::{cmd_recall, InputArgs, LdmArgs, RecallArgs};
use ldm::embed::Method;

fn main() -> ldm::Result<()> {
    let data = std::env::args_os().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/mnist5k-images-idx3-ubyte.gz")
    });
    let rows = cmd_recall(&RecallArgs {
        input: InputArgs { data, limit: Some(2000), has_labels: false },
        out: None,
        append: false,
        dims: vec![2, 5, 10, 20],
        k: 10,
        method: Method::Ldm,
        seed: 0,
        ldm: LdmArgs::default(),
    })?;
    for r in rows {
        eprintln!("d={:>3} pca {:.4} ldm {:.4}", r.d, r.recall_pca, r.recall_ldm);
    }
    Ok(())
}
