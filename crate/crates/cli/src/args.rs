use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "gammatime",
    version,
    about = "Gamma process laboratory: special functions, simulation, transforms and Monte Carlo checks",
    arg_required_else_help = true,
    allow_negative_numbers = true
)]
pub struct Cli {
    /// Flat `key=value` file supplying flags; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exponential integral E1(v).
    #[command(allow_negative_numbers = true)]
    E1 {
        #[arg(long)]
        v: f64,
    },
    /// Inverse H = E1^{-1}(x).
    #[command(allow_negative_numbers = true)]
    Invert {
        #[arg(long)]
        x: f64,
    },
    /// Paths and replicates from the H-series samplers.
    Simulate(SimulateArgs),
    /// F-norm or modular of an integrand.
    Norm(NormArgs),
    /// Moment E(Γf)^p from the Lévy moments.
    #[command(allow_negative_numbers = true)]
    Moments {
        #[arg(long)]
        f: String,
        #[arg(long)]
        p: usize,
    },
    /// Laplace transform (no --beta) or characteristic function of Γf.
    Transform(TransformArgs),
    /// Table of k(y) = E e^{-y/f(U)} for the Thorin form of Γf.
    Thorin(ThorinArgs),
    /// Monte Carlo check of a martingale identity, as a JSON line.
    Martingale(MartingaleArgs),
    /// Runs a check suite and writes a JSONL report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimKind {
    Gamma,
    Symmetric,
    Compound,
    Inverse,
    Partition,
    Subwiener,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Left,
    Average,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub kind: SimKind,
    #[arg(long, default_value_t = 200)]
    pub terms: usize,
    /// uniform | exp | pareto:P
    #[arg(long, default_value = "uniform")]
    pub density: String,
    /// none | bernoulli:B
    #[arg(long, default_value = "none")]
    pub reward: String,
    /// Width of the uniform base space.
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    /// Time of the symmetric and subordinated-Wiener values.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Integrand for replicate values of gamma/compound and for partition.
    #[arg(long)]
    pub f: Option<String>,
    /// Partition cells.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Rule::Average)]
    pub rule: Rule,
    /// Upper end of the inverse-path grid; replicate value of `inverse`.
    #[arg(long, default_value_t = 1.0)]
    pub v_max: f64,
    /// Grid points of the inverse path.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Replicate count. Without it, gamma/compound/inverse emit one path.
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormWhat {
    Norm,
    Modular,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct NormArgs {
    #[arg(long)]
    pub f: String,
    /// phi0_min | phi0_ratio | phi0_exp | phi0_arctan | phi1 | phi2 | phi1_sq
    #[arg(long, default_value = "phi1")]
    pub phi: String,
    #[arg(long, value_enum, default_value_t = NormWhat::Norm)]
    pub what: NormWhat,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct TransformArgs {
    #[arg(long)]
    pub f: String,
    /// Comma-separated θ values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub theta: Vec<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ThorinArgs {
    #[arg(long)]
    pub from_f: String,
    #[arg(long, default_value_t = 10.0)]
    pub y_max: f64,
    #[arg(long, default_value_t = 21)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MartKind {
    Gamma,
    Symmetric,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct MartingaleArgs {
    #[arg(long, value_enum)]
    pub kind: MartKind,
    #[arg(long)]
    pub theta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// mean | bracket | poly:N | laplace:K
    #[arg(long, default_value = "mean")]
    pub check: String,
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
    #[arg(long, default_value_t = 200)]
    pub terms: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    /// `default` or a manifest file with one check name per line.
    #[arg(long, default_value = "default")]
    pub suite: String,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides every check's replicate count.
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
