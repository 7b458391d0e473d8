use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ir2_core::{Method, Model, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(
    name = "ir2",
    version,
    about = "Integrated R² dependence coefficient toolkit"
)]
pub struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true, env = "IR2_THREADS")]
    pub threads: Option<usize>,

    /// Base seed for tie-breaking, permutations and simulations.
    #[arg(long, global = true, env = "IR2_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Draw the base seed from system entropy instead; it is echoed in the output.
    #[arg(long, global = true)]
    pub entropy_seed: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a dependence coefficient from a CSV file.
    Coeff(CoeffArgs),
    /// Order covariates by forward selection.
    Ford(FordArgs),
    /// Test for independence between the response and covariates.
    Test(TestArgs),
    /// Distance between two permutations.
    Permdist(PermdistArgs),
    /// Run a simulation study and write its report.
    Simulate(SimulateArgs),
    /// Write one simulated sample as CSV.
    Sample(SampleArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV file with a header row.
    pub file: PathBuf,

    /// Response column name.
    #[arg(short, long = "y")]
    pub y_col: String,

    /// Covariate column names, comma separated.
    #[arg(short, long = "x", value_delimiter = ',', num_args = 1..)]
    pub x_cols: Vec<String>,

    /// Skip rows with missing values in the designated columns.
    #[arg(long)]
    pub drop_missing: bool,

    /// Z-score every covariate before computing.
    #[arg(long, overrides_with = "no_standardize")]
    pub standardize: bool,

    /// Use the covariates as given.
    #[arg(long, overrides_with = "standardize")]
    pub no_standardize: bool,
}

impl DataArgs {
    /// Explicit flags win over the command's default.
    pub fn standardize_or(&self, default: bool) -> bool {
        if self.standardize {
            true
        } else if self.no_standardize {
            false
        } else {
            default
        }
    }
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// nu, nu1d or xi.
    #[arg(short, long, default_value = "nu")]
    pub method: Method,

    /// Average this many runs with independent tie-breaking.
    #[arg(long, default_value_t = 1)]
    pub replicate_ties: usize,
}

#[derive(Debug, Args)]
pub struct FordArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// Stop after this many accepted covariates.
    #[arg(long)]
    pub max_steps: Option<usize>,

    /// Order every covariate, ignoring the stopping rule.
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Perm,
    Asymptotic,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[arg(short, long, default_value = "nu1d")]
    pub method: Method,

    #[arg(long, value_enum, default_value_t = Mode::Perm)]
    pub mode: Mode,

    /// Number of permutations.
    #[arg(short = 'B', long = "permutations", default_value_t = ir2_core::inference::DEFAULT_PERMUTATIONS)]
    pub permutations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    #[value(name = "d_nu")]
    DNu,
    #[value(name = "d_nu_sym")]
    DNuSym,
    #[value(name = "footrule")]
    Footrule,
    #[value(name = "spearman_rho_sq")]
    SpearmanRhoSq,
    #[value(name = "kendall")]
    Kendall,
    #[value(name = "cayley")]
    Cayley,
    #[value(name = "hamming")]
    Hamming,
    #[value(name = "ulam")]
    Ulam,
}

#[derive(Debug, Args)]
pub struct PermdistArgs {
    /// First permutation, one-based, e.g. "2,1,3" or "(2 1 3)".
    pub a: String,
    /// Second permutation.
    pub b: String,
    #[arg(long, value_enum, default_value_t = MetricArg::DNu)]
    pub metric: MetricArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Study {
    Null,
    Power,
    Selection,
    /// Noiseless and noisy scatterplot models.
    #[value(alias = "scatter")]
    Figure1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub study: Study,

    /// Sample size (null, power, figure1).
    #[arg(long)]
    pub n: Option<usize>,

    /// Sample sizes (selection).
    #[arg(long, value_delimiter = ',')]
    pub n_list: Vec<usize>,

    /// Monte Carlo replicates per design cell.
    #[arg(long)]
    pub reps: Option<usize>,

    /// Histogram bins (null).
    #[arg(long, default_value_t = ir2_core::simulation::MIN_HISTOGRAM_BINS)]
    pub bins: usize,

    /// Models (power, selection).
    #[arg(long, value_delimiter = ',')]
    pub models: Vec<Model>,

    /// Noise levels (power).
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Vec<f64>,

    /// Methods (power).
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<Method>,

    /// Permutations per test (power).
    #[arg(short = 'B', long = "permutations")]
    pub permutations: Option<usize>,

    /// Significance level (power).
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Number of covariates (selection).
    #[arg(long)]
    pub p: Option<usize>,

    /// Noise standard deviations (figure1).
    #[arg(long, value_delimiter = ',')]
    pub noise_sds: Vec<f64>,

    /// Output file; standard output when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub model: Model,

    #[arg(long)]
    pub n: usize,

    /// Covariates, selection models only.
    #[arg(long)]
    pub p: Option<usize>,

    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,

    #[arg(long, default_value_t = 0.0)]
    pub noise_sd: f64,

    #[arg(short, long)]
    pub out: Option<PathBuf>,
}
