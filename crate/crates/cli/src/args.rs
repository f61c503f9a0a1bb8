use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zpreal_core::Complex;

#[derive(Debug, Parser)]
#[command(
    name = "zpreal",
    version,
    about = "Zero-pole realizations of rational matrix functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded random instance.
    Generate(GenerateArgs),
    /// Run the full verification suite on an instance file.
    Verify(VerifyArgs),
    /// Evaluate one of the representation formulas.
    Eval(EvalArgs),
    /// Wiener-Hopf factorization with respect to a circle.
    Factorize(FactorizeArgs),
    /// Scalar Cauchy-matrix utilities.
    Cauchy(CauchyArgs),
}

#[derive(Debug, Args)]
pub struct ReportOpts {
    /// Also write the report as JSON.
    #[arg(long)]
    pub report_out: Option<PathBuf>,
    /// Record wall-clock time in the JSON report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Radius of the disk poles and zeros are drawn from.
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    /// Minimum pairwise separation of poles and zeros.
    #[arg(long, default_value_t = 0.05)]
    pub min_sep: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub report: ReportOpts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "R")]
    R,
    #[value(name = "Rinv")]
    Rinv,
    #[value(name = "jointR")]
    JointR,
    #[value(name = "jointL")]
    JointL,
    #[value(name = "hybridR")]
    HybridR,
    #[value(name = "hybridL")]
    HybridL,
}

impl Which {
    pub fn needs_y(self) -> bool {
        !matches!(self, Which::R | Which::Rinv)
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub path: PathBuf,
    #[arg(value_enum)]
    pub which: Which,
    #[arg(allow_negative_numbers = true)]
    pub x_re: f64,
    #[arg(allow_negative_numbers = true)]
    pub x_im: f64,
    #[arg(allow_negative_numbers = true)]
    pub y_re: Option<f64>,
    #[arg(allow_negative_numbers = true)]
    pub y_im: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FactorizeArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center_im: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub radius: f64,
    #[arg(long)]
    pub out_plus: PathBuf,
    #[arg(long)]
    pub out_minus: PathBuf,
    /// Conditioning limit for the leading coupling block.
    #[arg(long, default_value_t = zpreal_core::wiener_hopf::COND_MAX)]
    pub cond_max: f64,
    /// Product residual above which the factorization is rejected.
    #[arg(long, default_value_t = zpreal_core::wiener_hopf::FAIL_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub report: ReportOpts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CauchyOp {
    Matrix,
    Invert,
    Detsq,
}

#[derive(Debug, Args)]
pub struct CauchyArgs {
    #[arg(value_enum)]
    pub op: CauchyOp,
    /// Comma-separated poles, e.g. `0,1+2i,-0.5i`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
    pub poles: Vec<Complex>,
    /// Comma-separated zeros.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
    pub zeros: Vec<Complex>,
}

fn parse_complex(s: &str) -> Result<Complex, String> {
    s.trim()
        .parse::<Complex>()
        .map_err(|e| format!("`{s}` is not a complex number: {e}"))
}
