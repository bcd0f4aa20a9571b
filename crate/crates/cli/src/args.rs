use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "rainbow",
    version,
    about = "Bounds, certificates and experiments for the (k,l)-rainbow index of K_n"
)]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the run manifest here instead of stderr.
    #[arg(long, global = true, value_name = "PATH")]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Thresholds N1, N2, combined N and the Chernoff route.
    Bounds(BoundsArgs),
    /// Check every k-set of a coloring file. Exit 0 on PASS, 1 on FAIL.
    Verify(VerifyArgs),
    /// Look for a passing coloring. Exit 3 when none is found.
    Search(SearchArgs),
    /// Maximum family of disjoint rainbow S-trees for one set S.
    Oracle(OracleArgs),
    /// Monte Carlo estimates.
    #[command(subcommand)]
    Mc(McCommand),
    /// Reproduce headline numbers. Exit 0 when every check passes.
    Repro(ReproArgs),
    /// Re-run a manifest and compare output digests.
    Replay(ReplayArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(short)]
    pub k: u64,
    #[arg(short = 'l', long = "ell")]
    pub ell: u64,
    /// Exact rational, e.g. 1/2.
    #[arg(long)]
    pub eps: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    pub file: PathBuf,
    #[arg(short)]
    pub k: usize,
    #[arg(short = 'l', long = "ell")]
    pub ell: usize,
    /// paper, full (budget k-2) or full:<budget>.
    #[arg(long, default_value = "full")]
    pub mode: String,
    /// Report the exact count of every k-set.
    #[arg(long)]
    pub counts: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyArg {
    Random,
    Exhaustive,
    Local,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[arg(short)]
    pub n: usize,
    #[arg(short)]
    pub k: usize,
    #[arg(short = 'l', long = "ell")]
    pub ell: usize,
    #[arg(short)]
    pub t: usize,
    #[arg(long, value_enum, default_value = "random")]
    pub strategy: StrategyArg,
    /// Colorings (random, exhaustive) or moves (local) to try.
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = "full")]
    pub mode: String,
    /// Write the coloring file here.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Write the per-set witness trees here.
    #[arg(long, value_name = "PATH")]
    pub witness: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    pub file: PathBuf,
    /// 1-based terminal set, e.g. 1,2,3.
    #[arg(short = 'S', value_delimiter = ',', required = true)]
    pub set: Vec<usize>,
    #[arg(long, default_value = "full")]
    pub mode: String,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum McCommand {
    /// Frequency of fewer than l rainbow stars over S = {1..k}.
    Bs(McArgs),
    /// Fraction of random colorings that pass for every k-set.
    As(McAsArgs),
    /// Success fraction across a range of n, as CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct McArgs {
    #[arg(short)]
    pub n: usize,
    #[arg(short)]
    pub k: usize,
    #[arg(short = 'l', long = "ell")]
    pub ell: usize,
    /// Palette size (default k).
    #[arg(short)]
    pub t: Option<usize>,
    #[arg(long)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct McAsArgs {
    #[command(flatten)]
    pub base: McArgs,
    /// star, paper, full or full:<budget>.
    #[arg(long, default_value = "star")]
    pub mode: String,
    /// Save the first passing coloring here.
    #[arg(long, value_name = "PATH")]
    pub witness: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(short)]
    pub k: usize,
    #[arg(short = 'l', long = "ell")]
    pub ell: usize,
    #[arg(short)]
    pub t: Option<usize>,
    /// start:end:step (inclusive) or a comma list.
    #[arg(long = "n", value_name = "RANGE")]
    pub n_range: String,
    #[arg(long, default_value_t = 100)]
    pub samples: u64,
    /// Success fraction the Wilson lower bound must reach.
    #[arg(long, default_value_t = 0.99)]
    pub target: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Stop at the first n that reaches the target.
    #[arg(long)]
    pub stop_at_first: bool,
    /// Emit the sweep as JSON instead of CSV.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReproTarget {
    Theta,
    Thresholds,
    Lemma34,
    K6,
}

#[derive(Debug, Args, Serialize)]
pub struct ReproArgs {
    #[arg(value_enum)]
    pub target: ReproTarget,
    /// Vertex count for lemma34.
    #[arg(short, default_value_t = 9)]
    pub n: usize,
    /// Sampled colorings for lemma34.
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    pub manifest_file: PathBuf,
}
