use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dyadic_core::bellman::BellmanFunction;
use dyadic_core::lab::WeightFamily;
use dyadic_core::{DyadicIndex, SymbolKind};

#[derive(Debug, Parser)]
#[command(name = "dyadic", version, about = "Dyadic paraproducts on weighted L2: generators, checks and norm scans")]
pub struct Cli {
    /// TOML run configuration (depth, seed, constants file, tolerance overrides).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Suite constants file replacing the compiled-in frozen constants.
    #[arg(long, global = true, value_name = "FILE")]
    pub constants: Option<PathBuf>,

    /// Seed for every stochastic step.
    #[arg(long, global = true, env = "DYADIC_SEED")]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a weight file.
    GenWeight(GenWeightArgs),
    /// Generate a BMO symbol file.
    GenSymbol(GenSymbolArgs),
    /// Sweep the certificate conditions of one Bellman function.
    VerifyBellman(VerifyBellmanArgs),
    /// Evaluate inequality checks at every root interval.
    Check(CheckArgs),
    /// Estimate the weighted paraproduct norm across a weight family.
    Scan(ScanArgs),
    /// Estimate one weighted paraproduct norm.
    Norm(NormArgs),
}

#[derive(Debug, Args)]
pub struct GenWeightArgs {
    /// power or cascade.
    #[arg(long)]
    pub family: WeightFamily,
    /// Exponent for power weights, cascade strength for cascades.
    #[arg(long, visible_aliases = ["alpha", "delta"], allow_hyphen_values = true)]
    pub param: f64,
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenSymbolArgs {
    /// single-haar, dyadic-log or random-normalized.
    #[arg(long)]
    pub kind: SymbolKind,
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyBellmanArgs {
    /// b1, b2 or b3.
    #[arg(long)]
    pub function: BellmanFunction,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Comma-separated check names; `bilinear` expands to the three
    /// bilinear hypotheses and `all` to every check.
    #[arg(long, value_delimiter = ',', required = true)]
    pub which: Vec<String>,
    #[arg(long, value_name = "FILE")]
    pub weight: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub symbol: Option<PathBuf>,
    /// Evaluate at one root `LEVEL:POSITION` instead of taking the worst root.
    #[arg(long, value_parser = parse_root)]
    pub root: Option<DyadicIndex>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value = "power")]
    pub family: WeightFamily,
    /// Family parameters, comma-separated.
    #[arg(
        long,
        visible_aliases = ["alphas", "deltas"],
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub params: Vec<f64>,
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long, default_value = "dyadic-log")]
    pub symbol: SymbolKind,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// CSV output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[arg(long, value_name = "FILE")]
    pub weight: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub symbol: PathBuf,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

fn parse_root(s: &str) -> Result<DyadicIndex, String> {
    let (level, position) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LEVEL:POSITION, got {s:?}"))?;
    let level: u32 = level.trim().parse().map_err(|e| format!("bad level: {e}"))?;
    let position: usize = position.trim().parse().map_err(|e| format!("bad position: {e}"))?;
    if level >= usize::BITS || position >> level != 0 {
        return Err(format!("position {position} is outside level {level}"));
    }
    Ok(DyadicIndex::new(level, position))
}
