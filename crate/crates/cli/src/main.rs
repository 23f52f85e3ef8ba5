//! `expsig`: experiments on the expected signature of planar Brownian motion
//! stopped on the unit circle.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

/// Expected signature of planar Brownian motion stopped on the unit circle:
/// exact PDE hierarchy, rigorous Bessel closed form, certified pole and
/// Monte Carlo cross-checks.
#[derive(Parser)]
#[command(name = "expsig", version, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Solve the PDE hierarchy exactly and report coefficients, norms and checks.
    Hierarchy(HierarchyArgs),
    /// Evaluate developed levels Vₙ(z) and partial sums of F_λ(z) exactly.
    Develop(DevelopArgs),
    /// Ball enclosures of ζ, α, d(λ), the closed form and the ODE residual.
    Bessel(BesselArgs),
    /// Certify a bracket around the real zero of d(λ) (or re-check one).
    Pole(PoleArgs),
    /// Compare partial sums Σ λⁿaₙ with the closed-form C_λ(0).
    Compare(CompareArgs),
    /// Ratio estimates √(a₂ₖ/a₂ₖ₊₂) of the radius of convergence.
    Radius(RadiusArgs),
    /// Monte Carlo estimate of the expected signature.
    Mc(McArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    /// Full tensor levels πₙ(Φ(z)) (2ⁿ entries, at most 16).
    Tensor,
    /// Developed 3-vectors Vₙ(z) (at most 200).
    Developed,
}

#[derive(Args)]
pub struct HierarchyArgs {
    /// Highest level N.
    #[arg(long, default_value_t = 12)]
    pub levels: usize,
    #[arg(long, value_enum, default_value_t = Mode::Developed)]
    pub mode: Mode,
    /// Include every polynomial in the output.
    #[arg(long)]
    pub dump_polys: bool,
    /// Highest developed level solved exactly; deeper levels need --ball-fallback.
    #[arg(long, default_value_t = expsig::hierarchy::DEVELOPED_LEVEL_DEFAULT_CAP)]
    pub exact_cap: usize,
    /// Continue past --exact-cap in ball arithmetic (not exact; enclosures only).
    #[arg(long)]
    pub ball_fallback: bool,
    /// Working precision in bits for the ball fallback.
    #[arg(long, env = "EXPSIG_PREC", default_value_t = expsig::ball::DEFAULT_PREC)]
    pub precision: u32,
    /// Output file (JSON); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct DevelopArgs {
    /// Highest level N.
    #[arg(long, default_value_t = 10)]
    pub levels: usize,
    /// λ as "num/den" or a decimal.
    #[arg(long, default_value = "1")]
    pub lambda: String,
    /// Point z as "x,y" (rationals or decimals).
    #[arg(long, default_value = "0,0")]
    pub point: String,
    /// Output file (JSON); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BesselArgs {
    /// λ as "num/den" or a decimal.
    #[arg(long, default_value = "1")]
    pub lambda: String,
    /// Radius r in [0, 1] for A, B, C.
    #[arg(long, default_value = "0")]
    pub r: String,
    /// Finite-difference step for the ODE residual (needs r ± 2h inside (0, 1)).
    #[arg(long, default_value = "1/10000")]
    pub h: String,
    #[arg(long, env = "EXPSIG_PREC", default_value_t = expsig::ball::DEFAULT_PREC)]
    pub precision: u32,
    /// Output file (JSON); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PoleArgs {
    /// Target bracket width.
    #[arg(long, default_value = "1/100")]
    pub width: String,
    #[arg(long, env = "EXPSIG_PREC", default_value_t = expsig::ball::DEFAULT_PREC)]
    pub precision: u32,
    /// Re-check an existing certificate instead of computing one.
    #[arg(long, value_name = "FILE", conflicts_with = "width")]
    pub verify: Option<PathBuf>,
    /// Output file (JSON); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct CompareArgs {
    /// λ ≥ 0 below the certified pole bracket.
    #[arg(long, default_value = "1")]
    pub lambda: String,
    /// Highest level N of the partial sums.
    #[arg(long, default_value_t = 40)]
    pub levels: usize,
    #[arg(long, env = "EXPSIG_PREC", default_value_t = expsig::ball::DEFAULT_PREC)]
    pub precision: u32,
    /// Output file (CSV); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct RadiusArgs {
    /// Highest coefficient index N.
    #[arg(long, default_value_t = 60)]
    pub levels: usize,
    /// Output file (CSV); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct McArgs {
    /// Start point z as "x,y" inside the open unit disk.
    #[arg(long, default_value = "0,0")]
    pub start: String,
    /// Time step h.
    #[arg(long, default_value_t = 1e-4)]
    pub h: f64,
    /// Truncation level N (1..=8).
    #[arg(long, default_value_t = 2)]
    pub level: usize,
    #[arg(long, default_value_t = 100_000)]
    pub paths: u64,
    #[arg(long, default_value_t = expsig::montecarlo::SimConfig::default().seed)]
    pub seed: u64,
    /// Disable the Brownian-bridge exit test (plain discrete monitoring).
    #[arg(long)]
    pub no_bridge: bool,
    /// Output file (CSV); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("{} check(s) failed:", failures.len());
            for f in &failures {
                eprintln!("  FAILED {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
