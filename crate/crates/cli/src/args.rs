use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

/// Multimode quantum optics toolkit.
#[derive(Debug, Parser)]
#[command(name = "mmqo", version)]
pub struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Accepted violation of the Heisenberg inequality for loaded states.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Relative eigenvalue threshold for mode counting.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub rank_tol: f64,
    /// Seed for Monte-Carlo checks.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Output format; tabular results default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Williamson, Bloch-Messiah, intrinsic separation and principal modes of a state.
    Decompose(DecomposeArgs),
    #[command(subcommand)]
    Source(SourceCommand),
    /// Phase-insensitive loss or gain.
    Channel(ChannelArgs),
    #[command(subcommand)]
    Detect(DetectCommand),
    /// Add or subtract one photon and inspect the Wigner function.
    Degauss(DegaussArgs),
    /// Detection mode and quantum Cramer-Rao bound of a built-in model.
    Metrology(MetrologyArgs),
    /// Cluster-state unitary, its condition residual and nullifier variances.
    Cluster(ClusterArgs),
    #[command(subcommand)]
    Sweep(SweepCommand),
    /// Run a command described by a scenario JSON file.
    Scenario(ScenarioArgs),
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Samples for the Monte-Carlo check of the intrinsic separation (0 skips it).
    #[arg(long, default_value_t = 0)]
    pub mc_samples: usize,
}

#[derive(Debug, Subcommand)]
pub enum SourceCommand {
    /// Supermode squeezing of a joint two-photon matrix.
    Pdc {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        gain: f64,
    },
    /// Squeezed-quadrature variances below threshold.
    Spopo {
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        lambdas: Vec<f64>,
        #[arg(long)]
        r: f64,
    },
    /// Cluster state from an adjacency matrix.
    Cluster {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 10.0)]
        squeeze_db: f64,
        /// Build the state with the passive interferometer instead of controlled-Z gates.
        #[arg(long)]
        passive: bool,
    },
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub gain: f64,
    #[arg(long, default_value_t = 1.0)]
    pub env_kappa: f64,
}

#[derive(Debug, Subcommand)]
pub enum DetectCommand {
    /// Variance of one homodyne setting.
    Homodyne {
        #[arg(long = "in")]
        input: PathBuf,
        /// Local-oscillator mode as JSON, e.g. `[[1,0],[0,0]]` or `[1,0]`.
        #[arg(long)]
        lo: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi: f64,
    },
    /// The homodyne settings needed for a reconstruction, with variances if a state is given.
    Schedule {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, required_unless_present = "input")]
        modes: Option<usize>,
    },
    /// Covariance matrix from a table of homodyne variances.
    Reconstruct {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Normalized coincidence rate behind a balanced beamsplitter.
    Hom {
        /// Mode overlap as `re` or `re,im`.
        #[arg(long, allow_negative_numbers = true)]
        overlap: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi: f64,
        /// Coherent-state inputs instead of single photons.
        #[arg(long)]
        coherent: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Add,
    Subtract,
}

#[derive(Debug, Args)]
pub struct DegaussArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub sign: SignArg,
    /// Mode of the photon operation as JSON.
    #[arg(long)]
    pub mode: String,
    /// Also integrate the Wigner log-negativity (one or two modes).
    #[arg(long)]
    pub negativity: bool,
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Mz,
    Phase,
    Displacement,
}

#[derive(Debug, Args)]
pub struct MetrologyArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long)]
    pub photons: f64,
    /// Squeezing applied to the detection mode, in dB.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub squeeze_db: f64,
    /// Fix the measured quadrature phase instead of optimizing it.
    #[arg(long, allow_negative_numbers = true)]
    pub quadrature_phase: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 10.0)]
    pub squeeze_db: f64,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct RangeArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long)]
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReadoutArg {
    Qcr,
    IntensityDifference,
}

#[derive(Debug, Subcommand)]
pub enum SweepCommand {
    /// Duan product of an EPR pair against amplifier gain.
    Gain {
        #[command(flatten)]
        range: RangeArgs,
        /// Variance of the squeezed joint quadratures.
        #[arg(long, default_value_t = 1e-6)]
        squeeze_var: f64,
        #[arg(long, default_value_t = 1.0)]
        env_kappa: f64,
    },
    /// SPOPO squeezed variances against the pump ratio.
    Spopo {
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        lambdas: Vec<f64>,
    },
    /// HOM coincidence rate against the delay phase.
    Hom {
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, allow_negative_numbers = true)]
        overlap: String,
    },
    /// Best energy-constrained bound against the total photon budget.
    Energy {
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, value_enum, default_value_t = ReadoutArg::Qcr)]
        readout: ReadoutArg,
        #[arg(long, default_value_t = 1.0)]
        a0: f64,
        /// Interpret the range as log10 of the photon budget.
        #[arg(long)]
        log10: bool,
    },
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
}
