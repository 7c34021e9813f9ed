use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "ncvpath", version, about = "Penalized regression paths (lasso, MCP, SCAD)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit a regularization path and write a path artifact.
    Fit(FitArgs),
    /// Cross-validate the path and write a selection report.
    Cv(CvArgs),
    /// Render the convexity report stored in a path artifact.
    Diagnose(DiagnoseArgs),
    /// Generate seeded synthetic data sets.
    Simulate(SimulateArgs),
    /// Time coordinate descent against LLA.
    Bench(BenchArgs),
}

// Enumerated flags are taken as strings and parsed later so that a bad
// value is reported as an invalid flag (exit 4) rather than a usage error.
#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the response column.
    #[arg(long)]
    pub response: String,
    /// gaussian or binomial.
    #[arg(long, default_value = "gaussian")]
    pub family: String,
    /// lasso, mcp or scad.
    #[arg(long, default_value = "mcp")]
    pub penalty: String,
    /// Shape parameter (default 3 for MCP, 3.7 for SCAD).
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub nlambda: usize,
    /// Smallest λ as a fraction of λ_max (default 0.001 if n > p, else 0.05).
    #[arg(long)]
    pub lambda_min_ratio: Option<f64>,
    /// cd or lla.
    #[arg(long, default_value = "cd")]
    pub solver: String,
    /// fixed or adaptive (logistic only).
    #[arg(long, default_value = "adaptive")]
    pub scale_mode: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Path artifact (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Optional wide coefficient table, one row per λ.
    #[arg(long)]
    pub coef_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CvArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Held-out loss for binomial data: misclassification or deviance.
    #[arg(long, default_value = "misclassification")]
    pub cv_loss: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct DiagnoseArgs {
    /// Path artifact written by `fit`.
    pub artifact: PathBuf,
    /// Recompute the report from this data file and compare.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Per-λ table for plotting.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    /// Pairwise covariate correlation; 0 gives independent columns.
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    /// four-spike, sparse-exp or dense-normal.
    #[arg(long, default_value = "four-spike")]
    pub signal: String,
    /// Spike size for four-spike.
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    /// Number of nonzero coefficients for sparse-exp and dense-normal.
    #[arg(long, default_value_t = 4)]
    pub count: usize,
    #[arg(long, default_value_t = 3.0)]
    pub rate: f64,
    #[arg(long, default_value_t = 3.0)]
    pub sd: f64,
    #[arg(long, default_value = "gaussian")]
    pub family: String,
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Directory for `data_<r>.csv` and `truth_<r>.csv`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [50usize, 100, 200, 400])]
    pub p: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0f64])]
    pub rho: Vec<f64>,
    #[arg(long, default_value = "gaussian")]
    pub family: String,
    #[arg(long, value_delimiter = ',', default_value = "cd,lla")]
    pub solvers: Vec<String>,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value_t = 100)]
    pub nlambda: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Results table (CSV).
    #[arg(long)]
    pub out: PathBuf,
}
