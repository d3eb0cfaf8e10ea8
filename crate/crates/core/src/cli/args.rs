use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug, Clone)]
#[command(name = "asep", version, about = "Tagged-particle distributions for the step-initial ASEP")]
pub struct Cli {
    /// JSON file of settings; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write `<command>.csv|json` and a manifest sidecar here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Working precision of the exact evaluator: 53, 106, 159 or 212.
    #[arg(long, global = true)]
    pub bits: Option<u32>,
    /// Worker threads for simulation; defaults to `ASEP_THREADS`.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawArg {
    Thm1,
    Crossover,
    F2,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// P(x_m <= x) from the Fredholm determinant formula.
    Exact(ExactArgs),
    /// Monte Carlo estimate of P(x_m <= x).
    Simulate(SimulateArgs),
    /// Uniformization oracle for short times.
    Oracle(OracleArgs),
    /// Exact formula, simulation and oracle side by side.
    Compare(CompareArgs),
    /// Kernel identity suite at several values of p.
    Verify(VerifyArgs),
    /// Evaluate a limit law at a point or along a sweep.
    Limit(LimitArgs),
    /// Tabulate a limit law to CSV plus manifest.
    Tabulate(TabulateArgs),
    /// Empirical cube-root-scaled CDF against F2.
    ScaledCdf(ScaledArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct PointArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<i64>,
    /// Formula time, or physical time with `--wall-time`.
    #[arg(long)]
    pub t: Option<f64>,
    /// Read `--t` as physical time T; the formulas then use gamma T.
    #[arg(long)]
    pub wall_time: bool,
}

#[derive(Args, Debug, Clone, Default)]
pub struct McArgs {
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Freeze particles beyond this count (default: infinite system).
    #[arg(long)]
    pub n_particles: Option<usize>,
    /// Run trials on one thread.
    #[arg(long)]
    pub serial: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ExactArgs {
    #[command(flatten)]
    pub point: PointArgs,
    /// Nodes on the eta circle.
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long)]
    pub jump_cap: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct CompareArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long)]
    pub jump_cap: Option<usize>,
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Values of p to check (default 0.1, 0.3, 0.45).
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct LawPointArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<i64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Grid `start:stop:step`, over `s` (or over `t` for thm1).
    #[arg(long, allow_hyphen_values = true)]
    pub sweep: Option<String>,
    /// For thm1 sweeps: add the exact tail and the ratio.
    #[arg(long)]
    pub with_exact: bool,
}

#[derive(Args, Debug, Clone)]
pub struct LimitArgs {
    #[arg(value_enum)]
    pub law: LawArg,
    #[command(flatten)]
    pub point: LawPointArgs,
}

#[derive(Args, Debug, Clone)]
pub struct TabulateArgs {
    #[arg(long, value_enum)]
    pub law: LawArg,
    /// Grid `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub point: LawPointArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ScaledArgs {
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub wall_time: bool,
    /// Comma-separated `s` values or `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    pub s_grid: Option<String>,
    #[command(flatten)]
    pub mc: McArgs,
}
