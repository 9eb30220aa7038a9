use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "actuator", version, about = "Optimal scalar-control actuators via the Brunovsky normal form")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for parallel evaluation (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximize the Gram objective over the unit sphere.
    Optimize(OptimizeArgs),
    /// Tabulate the objective over the sphere.
    Sample(SampleArgs),
    /// Run the numerical property suites.
    Verify(VerifyArgs),
    /// Compare the exact control cost with the factored bound.
    Cost(CostArgs),
    /// Eigenvalues of a system matrix or of a Gram matrix.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemArg {
    Heat,
    Wave,
    AdvectionPlus,
    AdvectionMinus,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleArg {
    None,
    H2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SystemArgs {
    #[arg(long, value_enum, default_value = "heat")]
    pub system: SystemArg,

    /// Square CSV matrix (no header) for `--system custom`.
    #[arg(long)]
    pub matrix: Option<PathBuf>,

    /// Grid points; the wave system has 2n states.
    #[arg(long, default_value_t = 2)]
    pub n: usize,

    #[arg(long, value_enum, default_value = "none")]
    pub scale: ScaleArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub system: SystemArgs,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Population size (default 15n).
    #[arg(long)]
    pub pop: Option<usize>,

    /// Generation cap (default 300n).
    #[arg(long)]
    pub gens: Option<usize>,

    /// Independent restarts (default 1 for n = 2, 4 above).
    #[arg(long)]
    pub starts: Option<usize>,

    #[arg(long = "F", default_value_t = 0.8)]
    pub f: f64,

    #[arg(long = "CR", default_value_t = 0.9)]
    pub cr: f64,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    Grid,
    Random,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub system: SystemArgs,

    /// Points per angle: r rows on the circle, r² on the 2-sphere.
    #[arg(long, default_value_t = 360)]
    pub resolution: usize,

    #[arg(long, value_enum, default_value = "grid")]
    pub mode: SampleMode,

    /// Number of points in random mode (default: resolution).
    #[arg(long)]
    pub samples: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Random draws per suite.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,

    /// Perturb the companion matrix to exercise the failure path.
    #[arg(long, hide = true)]
    pub corrupt_companion: bool,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CostArgs {
    #[command(flatten)]
    pub system: SystemArgs,

    /// Actuator as a comma list; normalized before use.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub b: Option<Vec<f64>>,

    /// Random unit actuators to add (default 10 when --b is absent).
    #[arg(long)]
    pub samples: Option<usize>,

    /// Horizons.
    #[arg(long = "T", value_delimiter = ',', required = true)]
    pub horizons: Vec<f64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumTarget {
    System,
    Gram,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub system: SystemArgs,

    #[arg(long, value_enum, default_value = "system")]
    pub of: SpectrumTarget,

    /// Actuator for `--of gram`; normalized before use.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub b: Option<Vec<f64>>,

    #[command(flatten)]
    pub output: OutputArgs,
}
