mod commands;
mod output;
mod render;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Lattice eigenspaces, representation numbers and local L² mass of
/// eigenfunctions of the flat torus.
#[derive(Parser, Debug)]
#[command(name = "toruseq", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory holding cached eigenspaces.
    #[arg(long, global = true, env = "TORUSEQ_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Cross-check the result against an independent oracle; exit 2 on mismatch.
    #[arg(long, global = true)]
    pub check: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the lattice points with |μ|² = λ as CSV.
    Enumerate(EnumerateArgs),
    /// Count representations R_d(n), or A_d(n, t) when --t is given.
    Repcount(RepcountArgs),
    /// Ball average of |ψ|² over B(y, r).
    Mass(MassArgs),
    /// Greedy pairing of nearby lattice points on a sphere.
    Pairs(PairsArgs),
    /// Discrepancy and boundedness scans.
    Scan(ScanArgs),
    /// Blowup table for the equal-amplitude eigenfunction in dimension 4.
    Blowup(BlowupArgs),
    /// Render |ψ|² on [0, 2π)² as a PPM image with an SVG colorbar.
    Render(RenderArgs),
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub lambda: u64,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RepcountArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: u64,
    /// Inner product t = ⟨μ, ν⟩; switches to the pair count A_d(n, t).
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<i64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// cos(m x₁ + (m+1) x₂) + cos((m+1) x₁ + m x₂); needs --m.
    Thm31,
    /// Equal amplitudes on every point of E_λ; needs --lambda.
    Blowup,
    /// Gaussian coefficients on E_λ drawn from --seed; needs --lambda.
    Random,
}

#[derive(Args, Debug, Clone)]
pub struct SourceArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Dimension for --family (default 2).
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub lambda: Option<u64>,
    /// Eigenfunction JSON, or a pair list JSON together with --pair-index.
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub pair_index: Option<usize>,
}

#[derive(Args, Debug)]
pub struct MassArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub radius: f64,
    /// Ball center, comma separated (default: the origin).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub center: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PairsArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub lambda: u64,
    /// Pairing distance (default: λ^{1/(2(d-1))} log λ).
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    /// Every eigenspace with 0 < λ <= --lambda-max.
    Density,
    /// One eigenspace, --lambda.
    Eigenspace,
    /// Planar arc counts and grid sup masses at r = λ^{-b}.
    Planar,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisArg {
    Random,
    Exponential,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub mode: ScanMode,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long)]
    pub lambda_max: Option<u64>,
    #[arg(long)]
    pub lambda: Option<u64>,
    /// Explicit λ list for planar scans.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<u64>>,
    #[arg(long, default_value_t = 0.3)]
    pub theta2: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = BasisArg::Random)]
    pub basis: BasisArg,
    /// Also record the grid sup of the ball average at r = λ^{-b}.
    #[arg(long)]
    pub grid_sup_exponent: Option<f64>,
    /// Radius exponent b for planar scans.
    #[arg(long, default_value_t = 0.15)]
    pub b: f64,
    /// Skip the grid sup in planar scans (arc counts only).
    #[arg(long)]
    pub no_grid: bool,
    /// CSV with one row per eigenfunction (default: standard output).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON summary.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BlowupArgs {
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<u64>>,
    /// Log-spaced odd sample: lower end.
    #[arg(long)]
    pub lambda_min: Option<u64>,
    #[arg(long)]
    pub lambda_max: Option<u64>,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// Radius exponents a, with r = λ^{-a}/log λ.
    #[arg(long, value_delimiter = ',', default_value = "0.125,0.16666666666666666,0.2")]
    pub exponents: Vec<f64>,
    /// Print S_4(λ, λ^e)/R_4(λ) for this exponent instead of the mass table.
    #[arg(long)]
    pub ratio_exponent: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Pixels per side.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    #[arg(long, default_value = "render.ppm")]
    pub out: PathBuf,
    /// Colorbar path (default: the image path with extension .svg).
    #[arg(long)]
    pub colorbar: Option<PathBuf>,
    /// Intensity mapped to the top of the color scale (default: the maximum).
    #[arg(long)]
    pub vmax: Option<f64>,
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check(String),
}

impl From<toruseq::Error> for Failure {
    fn from(e: toruseq::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

pub type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.global.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(2)
        }
    }
}
