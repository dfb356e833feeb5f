use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "walshsum", version, about = "Walsh-Paley summability experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the kernel V_n (or one of its two parts) on the grid.
    Kernel(KernelArgs),
    /// Apply the n-th mean to a grid function.
    Mean(MeanArgs),
    /// Tabulate υ(n) along a subsequence.
    Upsilon(UpsilonArgs),
    /// Compute a maximal function, or run the 1D weak-type experiment.
    Maximal(MaximalArgs),
    /// Apply a tensor-product mean to a 2D grid function.
    Tensor(TensorArgs),
    /// Run the 2D weak-type experiment against 1 + ∫|F| ln⁺|F|.
    LloglExperiment(LloglArgs),
    /// Evaluate the Walsh-Lebesgue point functionals at one point.
    Wlp(WlpArgs),
    /// Track tensor-mean errors at chosen points.
    Mt2Experiment(Mt2Args),
    /// Exact Fejér means at zero for the divergence example.
    Example1(Example1Args),
    /// Tabulate the decay quantity of a Cesàro exponent along a subsequence.
    C2Check(C2Args),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Shorthand for `--format json`.
    #[arg(long, conflicts_with = "format")]
    pub json: bool,
}

impl Output {
    pub fn format_or(&self, default: Format) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format.unwrap_or(default)
        }
    }
}

/// A grid function given as a file or a built-in test function.
#[derive(Debug, Args)]
pub struct Input1D {
    /// Grid CSV with a `# resolution=K` header.
    #[arg(long, conflicts_with = "function")]
    pub input: Option<PathBuf>,
    /// Test function: `constant:C`, `walsh:J`, `indicator:DEPTH:OFFSET`, `random:SEED`, `spikes:SEED`.
    #[arg(long)]
    pub function: Option<String>,
    /// Grid resolution K for `--function`.
    #[arg(long, short = 'K')]
    pub resolution: Option<u32>,
}

/// A planar grid function given as a file or a built-in test function.
#[derive(Debug, Args)]
pub struct Input2D {
    /// Grid CSV with a `# resolution=K dims=2` header.
    #[arg(long, conflicts_with = "function")]
    pub input: Option<PathBuf>,
    /// Test function: `constant:C`, `quadrant`, `singular`, `random:SEED`, `spikes:SEED`.
    #[arg(long)]
    pub function: Option<String>,
    /// Grid resolution K for `--function`.
    #[arg(long, short = 'K')]
    pub resolution: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KernelPart {
    /// V_n itself.
    Full,
    /// The Dirichlet part.
    V1,
    /// The Fejér part.
    V2,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long)]
    pub matrix: String,
    #[arg(long)]
    pub n: u64,
    #[arg(long, short = 'K')]
    pub resolution: u32,
    #[arg(long, value_enum, default_value = "full")]
    pub part: KernelPart,
    /// Verify V₁ + V₂ = V and agreement with the literal Dirichlet sum.
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeanArgs {
    #[arg(long)]
    pub matrix: String,
    #[arg(long)]
    pub n: u64,
    #[command(flatten)]
    pub input: Input1D,
    /// Verify that the coefficient and kernel paths agree.
    #[arg(long)]
    pub check: bool,
    /// Print the per-index summary as JSON instead of the grid.
    #[arg(long)]
    pub report: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct UpsilonArgs {
    #[arg(long)]
    pub matrix: String,
    /// `powers:a..b`, `alternating:a..b`, `list:1,3,7` or `all:a..b`.
    #[arg(long)]
    pub seq: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct MaximalArgs {
    #[arg(long, default_value = "fejer")]
    pub matrix: String,
    #[arg(long)]
    pub seq: String,
    /// `mean`, `tilde` or `dyadic`.
    #[arg(long, default_value = "tilde")]
    pub operator: String,
    /// Without an input, run this many random trials.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub input: Input1D,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TensorArgs {
    #[arg(long)]
    pub matrix0: String,
    #[arg(long)]
    pub matrix1: String,
    #[arg(long)]
    pub n0: u64,
    #[arg(long)]
    pub n1: u64,
    #[command(flatten)]
    pub input: Input2D,
    /// Verify that both iteration orders agree.
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LloglArgs {
    #[arg(long, default_value = "fejer")]
    pub matrix0: String,
    #[arg(long, default_value = "fejer")]
    pub matrix1: String,
    #[arg(long)]
    pub seq0: String,
    #[arg(long)]
    pub seq1: String,
    #[arg(long, short = 'K')]
    pub resolution: u32,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WlpArgs {
    #[command(flatten)]
    pub input: Input2D,
    /// Grid indices `i,j` or dyadic coordinates such as `0.25,0.25`.
    #[arg(long)]
    pub point: String,
    /// Inclusive depth range `a..b`; defaults to `1..K`.
    #[arg(long)]
    pub depths: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Mt2Args {
    #[arg(long, default_value = "fejer")]
    pub matrix0: String,
    #[arg(long, default_value = "fejer")]
    pub matrix1: String,
    #[arg(long)]
    pub seq0: String,
    #[arg(long)]
    pub seq1: String,
    #[command(flatten)]
    pub input: Input2D,
    /// Points separated by `;`, each as in `wlp --point`.
    #[arg(long)]
    pub points: String,
    #[arg(long)]
    pub depths: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Example1Args {
    /// Strictly increasing exponents, for example `5,17,65`.
    #[arg(long)]
    pub nseq: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct C2Args {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub seq: String,
    #[command(flatten)]
    pub output: Output,
}
