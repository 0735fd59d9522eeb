use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tsichain::analysis::Pair;
use tsichain::model::DispersionConvention;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "tsichain",
    version,
    about = "Entanglement dynamics of a Bell pair in the XX chain with three-spin interaction"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Concurrence of one nearest-neighbour pair against time.
    Series(SeriesArgs),
    /// Non-Markovianity witness against the three-spin coupling.
    WitnessScan(WitnessScanArgs),
    /// Concurrence against the three-spin coupling at fixed times.
    StaticScan(StaticScanArgs),
    /// System, edge and environment pairs side by side.
    EnvironmentCompare(EnvironmentArgs),
    /// Compare the quadrature against the Bessel and finite-ring references.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PairArg {
    System,
    Edge,
    Environment,
}

impl From<PairArg> for Pair {
    fn from(p: PairArg) -> Self {
        match p {
            PairArg::System => Pair::System,
            PairArg::Edge => Pair::Edge,
            PairArg::Environment => Pair::Environment,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Fermionized,
    Printed,
}

impl From<ConventionArg> for DispersionConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Fermionized => DispersionConvention::Fermionized,
            ConventionArg::Printed => DispersionConvention::Printed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    All,
    #[value(alias = "alpha_zero")]
    AlphaZero,
    #[value(alias = "pure_tsi")]
    PureTsi,
}

/// Couplings, initial phase and momentum resolution.
#[derive(Clone, Debug, Args)]
pub struct ModelArgs {
    /// Three-spin to nearest-neighbour coupling ratio J'/J.
    #[arg(
        long,
        default_value_t = 0.0,
        allow_negative_numbers = true,
        conflicts_with = "pure_tsi"
    )]
    pub alpha: f64,
    /// J = 0, J' = 1.
    #[arg(long)]
    pub pure_tsi: bool,
    #[command(flatten)]
    pub common: CommonModelArgs,
}

#[derive(Clone, Debug, Args)]
pub struct CommonModelArgs {
    /// Relative phase of the initial Bell pair.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    /// Momentum quadrature points.
    #[arg(long = "nk", default_value_t = tsichain::model::DEFAULT_N_K)]
    pub n_k: usize,
    /// Sign of the cos 2k term in the dispersion.
    #[arg(long, value_enum, default_value_t = ConventionArg::Fermionized)]
    pub convention: ConventionArg,
}

#[derive(Clone, Debug, Args)]
pub struct TimeArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t0: f64,
    #[arg(long = "tmax", default_value_t = 40.0, allow_negative_numbers = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    pub dt: f64,
}

#[derive(Clone, Debug, Args)]
pub struct AlphaRangeArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 2.5, allow_negative_numbers = true)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = 0.02, allow_negative_numbers = true)]
    pub alpha_step: f64,
}

#[derive(Clone, Debug, Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Clone, Debug, Args)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub time: TimeArgs,
    #[arg(long, value_enum, default_value_t = PairArg::System)]
    pub pair: PairArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args)]
pub struct WitnessScanArgs {
    #[command(flatten)]
    pub model: CommonModelArgs,
    #[command(flatten)]
    pub alphas: AlphaRangeArgs,
    #[command(flatten)]
    pub time: TimeArgs,
    /// Witness value above which a coupling counts as non-Markovian.
    #[arg(long, default_value_t = 1e-3)]
    pub threshold: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args)]
pub struct StaticScanArgs {
    #[command(flatten)]
    pub model: CommonModelArgs,
    #[command(flatten)]
    pub alphas: AlphaRangeArgs,
    /// Comma-separated evaluation times.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1,2,3",
        allow_negative_numbers = true
    )]
    pub times: Vec<f64>,
    /// Time step used to locate the first sudden death.
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args)]
pub struct EnvironmentArgs {
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[command(flatten)]
    pub model: CommonModelArgs,
    #[command(flatten)]
    pub time: TimeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    /// Which closed-form reference to check.
    #[arg(long, value_enum, default_value_t = CaseArg::All)]
    pub case: CaseArg,
    /// Couplings for the ring and convergence checks.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,1,2",
        allow_negative_numbers = true
    )]
    pub alphas: Vec<f64>,
    /// Sites of the reference ring.
    #[arg(long, default_value_t = tsichain::oracle::DEFAULT_RING_SITES)]
    pub ring_sites: usize,
    /// Time span of the ring comparison.
    #[arg(long, default_value_t = 30.0)]
    pub ring_tmax: f64,
    /// Momentum quadrature points.
    #[arg(long = "nk", default_value_t = tsichain::model::DEFAULT_N_K)]
    pub n_k: usize,
    #[arg(long, value_enum, default_value_t = ConventionArg::Fermionized)]
    pub convention: ConventionArg,
    #[command(flatten)]
    pub time: TimeArgs,
    /// Write the report here as well as to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}
