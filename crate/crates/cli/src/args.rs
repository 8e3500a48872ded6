use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Compile integer factoring into a penalty Hamiltonian and simulate the
/// adiabatic sweep that solves it.
#[derive(Debug, Parser)]
#[command(name = "aqfactor", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and presolve the multiplication-table equations, assemble H_p.
    Compile(CompileArgs),
    /// Run the stepwise sweep and report ground-manifold population.
    Simulate(SimulateArgs),
    /// Lowest levels of H(s) on a uniform grid of s.
    Spectrum(SpectrumArgs),
    /// Full pipeline: splits, presolve, simulation, decoding.
    Factor(FactorArgs),
    /// Repeat `factor` while varying one schedule parameter.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    #[value(name = "T")]
    T,
    #[value(name = "M")]
    M,
    #[value(name = "g")]
    G,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Factor widths in bits; both factors have their top and bottom bit set.
    #[arg(long, num_args = 2, value_names = ["WP", "WQ"])]
    pub widths: Option<Vec<u32>>,
    /// Reduce order around the first product term instead of the last.
    #[arg(long)]
    pub paper_pairing: bool,
    /// Write the output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    /// Mixer strength.
    #[arg(long, default_value_t = 0.6)]
    pub g: f64,
    /// Total evolution time.
    #[arg(long = "T", default_value_t = 20.0)]
    pub total_time: f64,
    /// Number of discrete steps.
    #[arg(long = "M", default_value_t = 20)]
    pub steps: usize,
    /// Step indices at which populations are recorded (default 0,M/4,M/2,3M/4,M).
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    pub n: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number to factor; omit when `--system` is given.
    #[arg(required_unless_present = "system", conflicts_with = "system")]
    pub n: Option<u64>,
    /// Compiled system from `compile`.
    #[arg(long)]
    pub system: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// `json` writes the summary, `csv` the per-checkpoint populations.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    pub n: u64,
    #[command(flatten)]
    pub common: Common,
    /// Mixer strength.
    #[arg(long, default_value_t = 0.6)]
    pub g: f64,
    /// Number of s samples on [0, 1].
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Number of levels per sample.
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FactorArgs {
    pub n: u64,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub n: u64,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    /// Schedule parameter to vary.
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Comma-separated values for the chosen parameter.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}
