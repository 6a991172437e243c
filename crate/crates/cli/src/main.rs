mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::TypedValueParser as _;
use clap::{Args, Parser, Subcommand, ValueEnum};
use mdreduce::docking::LgaSettings;
use mdreduce::{AccumMode, Method};

use report::Format;

/// Emulated matrix-unit block reductions, a warp-shuffle baseline, and a
/// small docking workload that exercises both.
#[derive(Debug, Parser)]
#[command(name = "mdreduce", version)]
struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, env = "MDREDUCE_SEED", default_value_t = 1)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Markdown)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Time and count emulated reductions per block size and method.
    ReduceBench(ReduceBenchArgs),
    /// Paired-seed comparison of two scoring paths on one instance.
    Validate(ValidateArgs),
    /// One docking run.
    Dock(DockArgs),
    /// Abstract cost of four scalar baseline reductions vs one matrix reduction.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Baseline,
    Tcu,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Baseline => Method::Baseline,
            MethodArg::Tcu => Method::Tcu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AccumArg {
    Half,
    Single,
}

impl From<AccumArg> for AccumMode {
    fn from(a: AccumArg) -> AccumMode {
        match a {
            AccumArg::Half => AccumMode::Half,
            AccumArg::Single => AccumMode::Single,
        }
    }
}

#[derive(Debug, Args)]
struct ReduceBenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [64, 128, 256, 512, 1024])]
    sizes: Vec<usize>,

    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MethodArg::Baseline, MethodArg::Tcu])]
    methods: Vec<MethodArg>,

    #[arg(long, value_enum, default_value_t = AccumArg::Half)]
    accum: AccumArg,

    /// Components reduced per thread: 7 as in scoring, or 4.
    #[arg(long, default_value_t = 7, value_parser = clap::builder::PossibleValuesParser::new(["4", "7"]).map(|s| s.parse::<usize>().unwrap()))]
    dims: usize,

    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
struct InstanceArgs {
    /// Instance file in the MDRI text format.
    #[arg(long, group = "source")]
    instance: Option<PathBuf>,

    /// Bundled instance: S1, S2 or S3.
    #[arg(long, group = "source")]
    bundled: Option<String>,
}

#[derive(Debug, Args)]
struct LgaArgs {
    #[arg(long, default_value_t = LgaSettings::default().population_size)]
    population: usize,

    #[arg(long, default_value_t = LgaSettings::default().max_generations)]
    generations: usize,

    #[arg(long, default_value_t = LgaSettings::default().max_evaluations)]
    max_evals: u64,

    #[arg(long, default_value_t = LgaSettings::default().ls_fraction)]
    ls_fraction: f64,

    #[arg(long, default_value_t = LgaSettings::default().local_search.max_iters)]
    ls_iters: usize,
}

impl LgaArgs {
    fn settings(&self) -> LgaSettings {
        let mut s = LgaSettings {
            population_size: self.population,
            max_generations: self.generations,
            max_evaluations: self.max_evals,
            ls_fraction: self.ls_fraction,
            ..LgaSettings::default()
        };
        s.local_search.max_iters = self.ls_iters;
        s
    }
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    source: InstanceArgs,

    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,

    /// Pass when the relative error of mean best energies is strictly below this.
    #[arg(long, default_value_t = 0.002)]
    threshold: f64,

    /// Candidate reduction method.
    #[arg(long, value_enum, default_value_t = MethodArg::Tcu)]
    method: MethodArg,

    #[arg(long, value_enum, default_value_t = AccumArg::Half)]
    accum: AccumArg,

    #[arg(long, value_enum, default_value_t = MethodArg::Baseline)]
    ref_method: MethodArg,

    #[arg(long, value_enum, default_value_t = AccumArg::Single)]
    ref_accum: AccumArg,

    #[arg(long, default_value_t = 64)]
    threads: usize,

    /// Also write one CSV row per run and method here.
    #[arg(long)]
    runs_csv: Option<PathBuf>,

    #[command(flatten)]
    lga: LgaArgs,
}

#[derive(Debug, Args)]
struct DockArgs {
    #[command(flatten)]
    source: InstanceArgs,

    #[arg(long, value_enum, default_value_t = MethodArg::Tcu)]
    method: MethodArg,

    #[arg(long, value_enum, default_value_t = AccumArg::Half)]
    accum: AccumArg,

    #[arg(long, default_value_t = 64)]
    threads: usize,

    #[command(flatten)]
    lga: LgaArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [64, 128, 256, 512, 1024])]
    sizes: Vec<usize>,

    #[arg(long, value_enum, default_value_t = AccumArg::Half)]
    accum: AccumArg,

    #[arg(long)]
    w_sync: Option<f64>,

    #[arg(long)]
    w_shuffle: Option<f64>,

    #[arg(long)]
    w_atomic: Option<f64>,

    #[arg(long)]
    w_mma: Option<f64>,

    #[arg(long)]
    w_fence: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("relative error {error:.6} is not below the threshold {threshold}")]
    Threshold { error: f64, threshold: f64 },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Threshold { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
        }
    }
}

impl From<mdreduce::Error> for CliError {
    fn from(e: mdreduce::Error) -> CliError {
        use mdreduce::Error as E;
        match e {
            E::UnsupportedBlockSize { .. } | E::Config(_) | E::SizeMismatch { .. } => CliError::Usage(e.to_string()),
            E::Parse { .. } | E::InvalidInstance(_) | E::Csv(_) | E::Io(_) | E::NumericDomain(_) => {
                CliError::Input(e.to_string())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
