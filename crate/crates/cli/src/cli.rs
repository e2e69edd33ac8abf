use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rskp_core::DEFAULT_EPSILON_COLLISION;

#[derive(Debug, Parser)]
#[command(
    name = "rskp",
    version,
    about = "Ruijsenaars-Schneider particles and discrete-KP tau-functions"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Input state (`rskp.state/1`) or tau file (`rskp.tau/1`).
    #[arg(long, global = true)]
    pub state: Option<PathBuf>,
    /// Output path; stdout when omitted (required by `evolve`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Integrator tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Finite-difference step.
    #[arg(long, global = true, default_value_t = 1e-4)]
    pub h: f64,
    /// Truncation order of the operator series.
    #[arg(long = "K", global = true, default_value_t = 8)]
    pub k: usize,
    /// Half-width of the forbidden bands around gaps 0 and 1.
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON_COLLISION)]
    pub epsilon_collision: f64,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Wave,
    Adjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Structure,
    Hamiltonian,
    Tau,
    Lax,
    Zs,
    Wave,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a validated state file.
    Init(InitArgs),
    /// Integrate a sequence of flows, writing a trajectory and the final state.
    Evolve(EvolveArgs),
    /// Tabulate tau(n; t) on an integer range and its roots at given times.
    Tau(TauArgs),
    /// Tabulate wave functions and their 1/z expansion coefficients.
    Wave(WaveArgs),
    /// Run verification checks and emit a report.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct InitArgs {
    #[arg(long, num_args = 1.., allow_negative_numbers = true, conflicts_with = "random")]
    pub x: Option<Vec<f64>>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true, requires = "x")]
    pub y: Option<Vec<f64>>,
    /// Draw a random generic configuration from `--seed`.
    #[arg(long, requires = "n_particles")]
    pub random: bool,
    #[arg(long)]
    pub n_particles: Option<usize>,
    /// Write the tau data (`rskp.tau/1`) instead of the state.
    #[arg(long)]
    pub tau: bool,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Flows applied in order, e.g. `t1=0.3,t2=-0.1`.
    pub flows: String,
    /// Trajectory destination; stdout when omitted.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// Rows per flow.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    #[arg(long, default_value = "-5..5", allow_hyphen_values = true)]
    pub n_range: String,
    /// Absolute multi-times separated by `;`, e.g. `0;t1=0.1,t2=0.05`.
    #[arg(long, default_value = "0")]
    pub times: String,
}

#[derive(Debug, Args)]
pub struct WaveArgs {
    #[arg(long, default_value = "-3..3", allow_hyphen_values = true)]
    pub n_range: String,
    /// Spectral parameters, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "3")]
    pub z: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Kind::Wave)]
    pub kind: Kind,
    /// Number of 1/z coefficients.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Absolute multi-time; the input's own time when omitted.
    #[arg(long)]
    pub time: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
}
