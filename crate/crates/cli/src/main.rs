mod commands;
mod table;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "lincode", version, about = "Multiplierless matrix-vector products by shift-add decomposition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a matrix file into a codebook and wiring stages.
    Decompose(DecomposeArgs),
    /// Evaluate a plan on a vector with shifts and additions only.
    Apply(ApplyArgs),
    /// Write the exact product a plan represents.
    Reconstruct(ReconstructArgs),
    /// Additions per matrix entry needed to reach given accuracies.
    Bench(BenchArgs),
    /// Error-model curves and Monte-Carlo checks.
    Analyze(AnalyzeArgs),
    /// Encode one scalar in binary or canonical signed digit form.
    Quantize(QuantizeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CodebookArg {
    Mailman,
    TwoSparse,
    #[value(name = "self", alias = "self-designing")]
    SelfDesigning,
    Gaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum AuxArg {
    /// The target itself when it looks Gaussian, else a seeded Gaussian matrix.
    Auto,
    Target,
    Gaussian,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Md,
    Json,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Target matrix (CSV or binary).
    matrix: std::path::PathBuf,
    #[arg(long, value_enum, default_value = "self")]
    codebook: CodebookArg,
    /// Number of wiring stages.
    #[arg(long, group = "depth")]
    stages: Option<usize>,
    /// Stop once the relative error reaches this many bits.
    #[arg(long, group = "depth")]
    bits: Option<u32>,
    /// Extra terms per column and stage (also used for self-design).
    #[arg(long, default_value_t = 1)]
    stage_sparsity: usize,
    /// With --bits: one wiring matrix whose columns stop individually.
    #[arg(long, requires = "bits")]
    adaptive: bool,
    /// Stage limit for --bits (term limit per column with --adaptive).
    #[arg(long, default_value_t = lincode::wiring::DEFAULT_MAX_STAGES)]
    max_stages: usize,
    /// Auxiliary target for the self-designing codebook.
    #[arg(long, value_enum, default_value = "auto")]
    aux: AuxArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Plan output path.
    #[arg(short, long)]
    output: std::path::PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ApplyArgs {
    plan: std::path::PathBuf,
    /// Input vector (CSV lines of decimals or `mantissa,exponent`, or binary).
    vector: std::path::PathBuf,
    /// Output CSV path; stdout when absent.
    #[arg(short, long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    plan: std::path::PathBuf,
    /// Matrix output (`.bin` for binary); CSV on stdout when absent.
    #[arg(short, long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Gaussian,
    Uniform,
}

#[derive(Args)]
struct BenchArgs {
    /// Matrix shapes as NxK.
    #[arg(long = "shape", value_delimiter = ',', default_value = "16x1024")]
    shapes: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,24")]
    bits: Vec<u32>,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Gaussian targets with stage chains, or uniform [0, 1) targets with one
    /// adaptive wiring matrix.
    #[arg(long, value_enum, default_value = "gaussian")]
    targets: TargetArg,
    #[arg(long, default_value_t = lincode::wiring::DEFAULT_MAX_STAGES)]
    max_stages: usize,
    /// Skip the fixed-point and canonical signed digit reference rows.
    #[arg(long)]
    no_baseline: bool,
    #[arg(long, value_enum, default_value = "md")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Figure {
    /// Angle-error CDFs at a fixed rate.
    Cdf,
    /// Lower bound against simulated decompositions.
    Lb,
    /// Per-step total error versus codebook size.
    Total,
    /// Empirical angle-error CDF against the model.
    Ks,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, value_enum, required_unless_present = "asymptote")]
    fig: Option<Figure>,
    /// Print the large-N squared angle error 4^-R for --rate.
    #[arg(long)]
    asymptote: bool,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    rate: Vec<f64>,
    #[arg(long = "N", alias = "n", default_value_t = 8)]
    n: usize,
    #[arg(long = "K", alias = "k", value_delimiter = ',', default_value = "256")]
    k: Vec<u64>,
    /// Stages for `lb`.
    #[arg(long, default_value_t = 20)]
    stages: u32,
    /// Matrices for `lb`, trials for `ks`.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, value_enum, default_value = "gaussian")]
    codebook: CodebookArg,
    /// Grid intervals for `cdf`.
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantMode {
    Binary,
    Csd,
}

#[derive(Args)]
struct QuantizeArgs {
    #[arg(allow_negative_numbers = true)]
    value: String,
    #[arg(value_enum)]
    mode: QuantMode,
    /// Fractional bits (binary) or digit budget (csd).
    budget: u32,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decompose(a) => commands::decompose(a),
        Command::Apply(a) => commands::apply(a),
        Command::Reconstruct(a) => commands::reconstruct(a),
        Command::Bench(a) => commands::bench(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Quantize(a) => commands::quantize(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
