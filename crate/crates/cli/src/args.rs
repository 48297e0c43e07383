use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "discop", version, about = "Discrete analogue of d^2m/dx^2m - d^(2m-2)/dx^(2m-2)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the operator and print its constants and D(hβ) for β = 0..beta-max.
    Construct(TableArgs),
    /// Print D(hβ) for β = −beta-max..beta-max.
    Table(TableArgs),
    /// Check every convolution identity and print the report.
    Verify(VerifyArgs),
    /// Print the roots of the characteristic polynomial.
    Roots(OperatorArgs),
    /// Print the Euler polynomial coefficients, low to high.
    Euler(EulerArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    Double,
    #[default]
    DoubleDouble,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OperatorArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub h: f64,
    /// Widen the guard to m ≤ 8 and h ∈ [1e-6, 300].
    #[arg(long)]
    pub unsafe_range: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub beta_max: u32,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub op: OperatorArgs,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub beta_max: u32,
    /// Defaults to 1e-8 for m ≤ 3 and 1e-6 above.
    #[arg(long, env = "DISC_OP_TOL")]
    pub tol: Option<f64>,
    /// Arithmetic used for construction and every identity.
    #[arg(long, value_enum, default_value_t = Precision::DoubleDouble)]
    pub precision: Precision,
}

#[derive(Debug, Args)]
pub struct EulerArgs {
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}
