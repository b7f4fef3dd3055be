use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "predprey", version, about = "Fast-reaction predator-prey systems and their cross-diffusion limits")]
pub struct Cli {
    /// Seed for every random initial perturbation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for scans and sweeps; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a system on a 1D interval or 2D rectangle.
    Simulate(SimulateArgs),
    /// Homogeneous equilibria and their linear stability.
    Equilibrium(AnalysisArgs),
    /// Dispersion relation of every diffusion model at E*.
    Turing(TuringArgs),
    /// Two-parameter map of the Turing classification.
    Scan(ScanArgs),
    /// Epsilon sweep of the microscopic system against its limit.
    Converge(ConvergeArgs),
    /// Constant-rate against cross-diffusion instability regions at E*.
    CompareRegions(AnalysisArgs),
    /// Redraw the SVG map of an existing scan CSV.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimSystem {
    MicroHolling,
    MicroBda,
    LimitHolling,
    LimitBda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Holling,
    Bda,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub system: SimSystem,
    #[arg(long)]
    pub config: PathBuf,
    /// Cells, `n` or `nx,ny`.
    #[arg(long, value_delimiter = ',', num_args = 1..=2)]
    pub grid: Option<Vec<usize>>,
    /// Domain size, `L` or `Lx,Ly`.
    #[arg(long, value_delimiter = ',', num_args = 1..=2)]
    pub length: Option<Vec<f64>>,
    #[arg(long)]
    pub tend: Option<f64>,
    /// Overrides `model.epsilon`.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Write full fields every this many samples.
    #[arg(long)]
    pub snapshots: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalysisArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TuringArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// List unstable Neumann modes on `[0, L]`, in the units of the analysis.
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// First axis, `name=lo:hi:count` with an optional `:log` suffix.
    #[arg(long)]
    pub p1: String,
    #[arg(long)]
    pub p2: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write `scan.svg`.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long, value_enum)]
    pub system: Variant,
    #[arg(long, value_delimiter = ',', required = true)]
    pub ladder: Vec<f64>,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub scan: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "p1")]
    pub x_name: String,
    #[arg(long, default_value = "p2")]
    pub y_name: String,
}
