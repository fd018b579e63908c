//! Command-line harness: generate data, fit embeddings, score neighbor
//! recall, sweep the sample-to-dimension ratio and time fits.
//!
//! Every command writes plain CSV plus a `<out>.meta.json` record holding the
//! full configuration, library version and machine details. Commands are also
//! callable as library functions (`cmd_*`), which is how the tests drive them.

mod commands;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::embed::{EpsilonMode, LdmConfig, Method};
use crate::error::{Error, Result};
use crate::kernels::LdmVariant;

pub use commands::{
    cmd_bench, cmd_embed, cmd_generate, cmd_knn, cmd_recall, cmd_sweep_gamma, recall_grid, SweepOutput,
};
pub use report::{
    meta_path, read_rows, summarize, write_rows, BenchRow, MachineInfo, RecallRow, RunMetadata, SummaryRow,
};

const RECALL_COLUMNS: &str = "CSV columns (recall, sweep-gamma):
  dataset,seed,n,dim,gamma,d,k,ldm_method,recall_pca,recall_ldm,recall_diff,
  recall_pca_vs_ldm,fit_seconds_pca,fit_seconds_ldm,knn_seconds
recall_diff is PCA minus LDM; recall_pca/recall_ldm are measured against exact
ambient neighbors; knn_seconds covers both latent-space searches.

sweep-gamma also writes <out>.summary.csv, one row per (n, dim) cell:
  dataset,n,dim,gamma,d,k,ldm_method,seeds,recall_pca_mean,recall_pca_std,
  recall_ldm_mean,recall_ldm_std,recall_diff_mean,recall_diff_std,
  recall_pca_vs_ldm_mean,recall_pca_vs_ldm_std

CSV columns (bench):
  n,dim,d,method,repeats,median_seconds,min_seconds,ratio_to_previous,samples
samples holds every repeat, ';'-separated.";

#[derive(Debug, Parser)]
#[command(name = "ldm", version, about = "Linearized diffusion maps and PCA: embeddings and neighbor-recall experiments")]
#[command(after_help = RECALL_COLUMNS)]
pub struct Cli {
    /// Worker threads for parallel sections; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a synthetic dataset and write it as a dense file.
    Generate(GenerateArgs),
    /// Fit one embedding and write its coordinates.
    Embed(EmbedArgs),
    /// Write k-nearest-neighbor lists, ambient or in an embedding.
    Knn(KnnArgs),
    /// recall@k of PCA and LDM neighbors over a grid of latent dimensions.
    #[command(after_help = RECALL_COLUMNS)]
    Recall(RecallArgs),
    /// Hypersphere recall difference as a function of N/D.
    #[command(after_help = RECALL_COLUMNS)]
    SweepGamma(SweepArgs),
    /// Wall-clock fit time against dataset size.
    #[command(after_help = RECALL_COLUMNS)]
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    SwissRoll,
    Hypersphere,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// IDX image file (plain or .gz), LDMDNSE1 dense file, or headerless CSV.
    #[arg(long)]
    pub data: PathBuf,

    /// Keep only the first N rows.
    #[arg(long)]
    pub limit: Option<usize>,

    /// Treat the last CSV column as labels.
    #[arg(long)]
    pub has_labels: bool,
}

impl InputArgs {
    pub fn new(data: impl Into<PathBuf>) -> Self {
        Self {
            data: data.into(),
            limit: None,
            has_labels: false,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LdmArgs {
    /// Kernel scale: "auto" (4·max‖r‖²) or a positive number.
    #[arg(long, default_value = "auto")]
    pub epsilon: EpsilonMode,

    /// Diffusion time t.
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,

    /// Operator normalization; defaults to the one implied by --method.
    #[arg(long)]
    pub variant: Option<LdmVariant>,

    /// Drop the trivial constant eigenvector.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub drop_trivial: bool,

    /// Report eigenvectors without the λ^t scaling.
    #[arg(long)]
    pub raw_eigvecs: bool,
}

impl Default for LdmArgs {
    fn default() -> Self {
        Self {
            epsilon: EpsilonMode::Auto,
            time: 1.0,
            variant: None,
            drop_trivial: true,
            raw_eigvecs: false,
        }
    }
}

impl LdmArgs {
    /// Fit configuration for `method` at latent dimension `dim`.
    pub fn config(&self, method: Method, dim: usize, seed: u64) -> Result<LdmConfig> {
        let variant = match (self.variant, method.variant()) {
            (Some(v), _) => v,
            (None, Some(v)) => v,
            (None, None) => return Err(Error::invalid("LDM settings requested for PCA")),
        };
        Ok(LdmConfig {
            variant,
            time: self.time,
            epsilon: self.epsilon,
            drop_trivial: self.drop_trivial,
            raw_eigvecs: self.raw_eigvecs,
            ..LdmConfig::new(dim).seed(seed)
        })
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: Generator,

    /// Number of samples.
    #[arg(long)]
    pub n: usize,

    /// Ambient dimension D (hypersphere only; the Swiss roll is 3-D).
    #[arg(long, default_value_t = 3)]
    pub ambient_dim: usize,

    /// Gaussian noise on each coordinate (Swiss roll) or relative radial
    /// noise (hypersphere).
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output file; a `.csv` extension writes CSV with labels last,
    /// anything else the LDMDNSE1 binary format.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Embedding CSV; columns x1..xd, then label when the data has labels.
    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, default_value = "ldm")]
    pub method: Method,

    /// Latent dimension d.
    #[arg(long)]
    pub dim: usize,

    /// Lanczos start-vector seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub ldm: LdmArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KnnArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Neighbor CSV; columns point,nn1..nnk.
    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, default_value_t = 10)]
    pub k: usize,

    /// Search in this embedding instead of the ambient space.
    #[arg(long, requires = "dim")]
    pub method: Option<Method>,

    #[arg(long)]
    pub dim: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub ldm: LdmArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RecallArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Append rows to an existing CSV instead of replacing it.
    #[arg(long)]
    pub append: bool,

    /// Latent dimensions to evaluate.
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,

    #[arg(long, default_value_t = 10)]
    pub k: usize,

    /// Diffusion method compared against PCA: ldm or ldm-a.
    #[arg(long, default_value = "ldm")]
    pub method: Method,

    /// Lanczos start-vector seed for both fits.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub ldm: LdmArgs,
}

/// One `(N, D)` sweep cell, written `NxD` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridCell {
    pub n: usize,
    pub dim: usize,
}

impl std::str::FromStr for GridCell {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, d) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::invalid(format!("grid cell {s:?} is not NxD")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("grid cell {s:?} is not NxD")))
        };
        Ok(GridCell {
            n: parse(n)?,
            dim: parse(d)?,
        })
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// Explicit cells as NxD, e.g. 100x20,1000x20.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<GridCell>,

    /// Ambient dimensions combined with --ns or --gammas.
    #[arg(long, value_delimiter = ',')]
    pub ambient_dims: Vec<usize>,

    /// Sample counts applied to every ambient dimension.
    #[arg(long, value_delimiter = ',', conflicts_with = "gammas")]
    pub ns: Vec<usize>,

    /// Ratios N/D; N = round(γ·D).
    #[arg(long, value_delimiter = ',')]
    pub gammas: Vec<f64>,

    /// Latent dimension d; defaults to D−1 per cell.
    #[arg(long)]
    pub dim: Option<usize>,

    #[arg(long, default_value_t = 10)]
    pub k: usize,

    /// Independent datasets per cell.
    #[arg(long, default_value_t = 5)]
    pub seeds: usize,

    /// Base seed; cell i (in output order) uses seed + i for both sampling
    /// and the eigensolver.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Relative radial noise of the hypersphere samples.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,

    #[arg(long, default_value = "ldm")]
    pub method: Method,

    /// Output CSV; stdout when absent. The summary goes to <out>.summary.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[command(flatten)]
    pub ldm: LdmArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    /// Sample counts to time.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ns: Vec<usize>,

    #[arg(long, default_value_t = 100)]
    pub ambient_dim: usize,

    /// Latent dimension d.
    #[arg(long, default_value_t = 10)]
    pub dim: usize,

    #[arg(long, default_value = "ldm")]
    pub method: Method,

    /// Timed fits per N.
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,

    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[command(flatten)]
    pub ldm: LdmArgs,
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Generate(a) => cmd_generate(a).map(drop),
        Command::Embed(a) => cmd_embed(a).map(drop),
        Command::Knn(a) => cmd_knn(a).map(drop),
        Command::Recall(a) => cmd_recall(a).map(drop),
        Command::SweepGamma(a) => cmd_sweep_gamma(a).map(drop),
        Command::Bench(a) => cmd_bench(a).map(drop),
    })
}

/// Parses `args` (program name first) and runs; errors go to stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_canonical_flags() {
        let cli = Cli::try_parse_from([
            "ldm", "embed", "--data", "x.csv", "--out", "e.csv", "--method", "ldm-a", "--dim", "3",
            "--epsilon", "2.5", "--time", "2", "--drop-trivial", "false", "--seed", "9", "--limit", "50",
            "--has-labels", "--workers", "2",
        ])
        .unwrap();
        assert_eq!(cli.workers, 2);
        let Command::Embed(a) = cli.command else { panic!() };
        assert_eq!(a.method, Method::LdmA);
        assert_eq!(a.ldm.epsilon, EpsilonMode::Fixed(2.5));
        assert!(!a.ldm.drop_trivial);
        assert_eq!(a.input.limit, Some(50));
        assert!(a.input.has_labels);
        let cfg = a.ldm.config(a.method, a.dim, a.seed).unwrap();
        assert_eq!(cfg.variant, LdmVariant::Asymmetric);
        assert_eq!(cfg.lanczos.seed, 9);
    }

    #[test]
    fn defaults() {
        let cli = Cli::try_parse_from(["ldm", "recall", "--data", "x", "--dims", "2,5,10"]).unwrap();
        let Command::Recall(a) = cli.command else { panic!() };
        assert_eq!(a.k, 10);
        assert_eq!(a.dims, vec![2, 5, 10]);
        assert_eq!(a.method, Method::Ldm);
        assert!(a.ldm.drop_trivial);
        assert_eq!(a.ldm.time, 1.0);
    }

    #[test]
    fn grid_cells() {
        let cli = Cli::try_parse_from(["ldm", "sweep-gamma", "--grid", "100x20,2000X400"]).unwrap();
        let Command::SweepGamma(a) = cli.command else { panic!() };
        assert_eq!(a.grid, vec![GridCell { n: 100, dim: 20 }, GridCell { n: 2000, dim: 400 }]);
        assert!("100-20".parse::<GridCell>().is_err());
    }

    #[test]
    fn bad_values_are_rejected() {
        assert!(Cli::try_parse_from(["ldm", "embed", "--data", "x", "--out", "y", "--dim", "2", "--method", "tsne"]).is_err());
        assert!(Cli::try_parse_from(["ldm", "embed", "--data", "x", "--out", "y", "--dim", "2", "--epsilon", "-3"]).is_err());
    }
}
