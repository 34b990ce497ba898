use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "drb", version, about = "Dedekind-Rademacher cocycles for Bianchi groups")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Field discriminant.
    #[arg(long, global = true, allow_hyphen_values = true, default_value_t = -8)]
    pub disc: i64,
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 128)]
    pub prec: u32,
    /// JSON config file; its entries override flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "DRB_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Skip reading and writing the constants cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eisenstein series and H.
    Series {
        #[command(subcommand)]
        op: SeriesOp,
    },
    /// Dedekind sums D(a, c; p, q) and their smoothed version.
    Dedekind {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long = "N", allow_hyphen_values = true)]
        n: Option<String>,
        #[command(flatten)]
        pq: PqArgs,
    },
    /// Φ(A) or Φ_N(A), optionally at (p, q).
    Cocycle {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long = "N", allow_hyphen_values = true)]
        n: Option<String>,
        #[command(flatten)]
        pq: PqArgs,
    },
    /// Run a seeded verification suite.
    Verify(VerifyArgs),
    /// L-series of an admissible matrix.
    Lvalue {
        #[command(subcommand)]
        op: LvalueOp,
    },
    /// Inspect or manage the constants cache.
    Cache {
        #[command(subcommand)]
        op: CacheOp,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct PqArgs {
    /// `re,im`
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeriesKind {
    E1,
    E2,
    E,
    E2zero,
    H,
    Hn,
}

#[derive(Subcommand, Debug)]
pub enum SeriesOp {
    Eval {
        #[arg(long, value_enum)]
        kind: SeriesKind,
        /// `re,im` for E-series, `x,y,v` for H.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long = "N", allow_hyphen_values = true)]
        n: Option<String>,
        /// Absolute error target for H.
        #[arg(long, default_value_t = 1e-20)]
        target: f64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    pub suite: String,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "N", allow_hyphen_values = true)]
    pub n: Option<String>,
    /// Hecke prime.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Entry-norm bound for sampled matrices.
    #[arg(long)]
    pub height: Option<i64>,
    /// Lattice radius for the L-series integral check.
    #[arg(long)]
    pub radius: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum LvalueOp {
    Direct {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long = "N", allow_hyphen_values = true)]
        n: Option<String>,
        /// `re` or `re,im`
        #[arg(long, allow_hyphen_values = true, default_value = "2")]
        s: String,
        #[arg(long, default_value_t = 24.0)]
        radius: f64,
        #[command(flatten)]
        pq: PqArgs,
    },
    Closed {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long = "N", allow_hyphen_values = true)]
        n: Option<String>,
        #[command(flatten)]
        pq: PqArgs,
    },
    CheckIntegral {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long = "N", allow_hyphen_values = true)]
        n: Option<String>,
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        #[arg(long, default_value_t = 24.0)]
        radius: f64,
        #[command(flatten)]
        pq: PqArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum CacheOp {
    Status,
    /// Compute and store constants for the current disc and precision.
    Warm,
    Clear,
}
