//! `bse`: solve, check, compare and generate Bethe-Salpeter eigenproblems.

mod jobs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bse", version, about = "Structure-preserving Bethe-Salpeter eigensolver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Use every rayon worker thread; without it jobs run on one thread.
    /// Results are identical either way.
    #[arg(long, global = true)]
    pub parallel: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check Hermitian/symmetric structure and positive definiteness.
    Check(InputArgs),
    /// Structure-preserving complex solver.
    Solve(SolveArgs),
    /// Real solver via the SVD of L₂ᵀL₁ (A and B must be real).
    SolveReal(SolveArgs),
    /// Tamm-Dancoff approximation: diagonalize A alone.
    Tda(SolveArgs),
    /// Reference path through a complex Cholesky factor of Ω; eigenvalues only.
    Oracle(SolveArgs),
    /// Run solve, oracle and tda on one input and report the differences.
    Compare(CompareArgs),
    /// Broadened density of states, and absorption if dipoles are given.
    Spectrum(SpectrumArgs),
    /// Write a random definite instance as A.mtx and B.mtx.
    Gen(GenArgs),
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Directory holding A.mtx and B.mtx.
    #[arg(long, conflicts_with_all = ["a", "b"])]
    pub input: Option<PathBuf>,
    /// Matrix Market file for A.
    #[arg(long, requires = "b")]
    pub a: Option<PathBuf>,
    /// Matrix Market file for B.
    #[arg(long, requires = "a")]
    pub b: Option<PathBuf>,
    /// Field of the operator; `auto` is real iff both files hold real values.
    #[arg(long, value_enum, default_value_t = KindArg::Auto)]
    pub kind: KindArg,
    /// Replace A by (A + Aᴴ)/2 and B by (B + Bᵀ)/2 before validation.
    #[arg(long)]
    pub symmetrize: bool,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Output directory (created if missing).
    #[arg(long, env = "BSE_OUT_DIR", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// Also write eigenvectors as Matrix Market files.
    #[arg(long)]
    pub emit_vectors: bool,
    /// Which eigenvectors --emit-vectors writes.
    #[arg(long, value_enum, default_value_t = WhichVectors::Right)]
    pub which_eigenvectors: WhichVectors,
}

#[derive(Args, Debug, Clone)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    /// Eigenvalue CSV to broaden instead of solving. A list of positive
    /// values is mirrored to the full ± spectrum.
    #[arg(long, conflicts_with_all = ["input", "a", "b"])]
    pub eigenvalues: Option<PathBuf>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// Gaussian standard deviation.
    #[arg(long, default_value_t = bse_core::spectra::DEFAULT_SIGMA)]
    pub sigma: f64,
    /// Frequency grid as `lo:hi:points`; by default the spectrum padded by 10σ.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Number of points of the default grid.
    #[arg(long, default_value_t = bse_core::spectra::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Matrix Market column vector d_r of length 2n.
    #[arg(long, requires = "dipole_l")]
    pub dipole_r: Option<PathBuf>,
    /// Matrix Market column vector d_l of length 2n.
    #[arg(long, requires = "dipole_r")]
    pub dipole_l: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Lower bound on the smallest eigenvalue of Ω.
    #[arg(long, default_value_t = 1.0)]
    pub margin: f64,
    #[arg(long, value_enum, default_value_t = GenKind::Complex)]
    pub kind: GenKind,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindArg {
    Auto,
    Real,
    Complex,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Real,
    Complex,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhichVectors {
    Right,
    Left,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match jobs::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
