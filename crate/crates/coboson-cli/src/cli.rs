//! Argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Composite-boson toolkit for harmonically confined Wigner molecules.
///
/// Every pipeline stage is exposed as a subcommand; `figure` reproduces
/// whole figure datasets. Outputs are CSV (17 significant digits) with a
/// `<output>.meta.json` manifest when `--output` is given; otherwise the
/// CSV goes to stdout.
#[derive(Parser, Debug)]
#[command(name = "coboson", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Spectrum source: either direct generating parameters or physical
/// trap/interaction parameters, never both.
#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Generating parameter z_x in [0, 1)
    #[arg(long, conflicts_with_all = ["gamma", "g", "epsilon"])]
    pub zx: Option<f64>,

    /// Transverse generating parameters z_y (comma-separated), one per
    /// extra dimension
    #[arg(long, value_delimiter = ',', requires = "zx")]
    pub zy: Vec<f64>,

    /// Inverse-power interaction exponent γ > 0
    #[arg(long, requires = "g")]
    pub gamma: Option<f64>,

    /// Interaction strength g > 0 (oscillator units)
    #[arg(long, requires = "gamma")]
    pub g: Option<f64>,

    /// Trap anisotropies ε_i ≥ 1 (comma-separated), one per extra
    /// dimension
    #[arg(long, value_delimiter = ',', requires = "gamma")]
    pub epsilon: Vec<f64>,

    /// Spectrum truncation: bound on the discarded probability mass
    #[arg(long, default_value_t = 1e-12)]
    pub tail_tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write CSV here (with `<output>.meta.json` sidecar) instead of
    /// stdout
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Output format for the data file
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiKindArg {
    Fermi,
    Bose,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiMethodArg {
    Dp,
    Newton,
    Partition,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModelArg {
    Fd,
    Be,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegeneracyArg {
    /// g_j = 1 (one-dimensional trap)
    Uniform,
    /// g_j = j + 1 (isotropic two-dimensional shells)
    Linear,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Harmonic approximation: equilibrium separation, curvature ratio,
    /// and both z_x closed forms
    Approx {
        /// Inverse-power exponent γ > 0
        #[arg(long)]
        gamma: f64,
        /// Interaction strength g > 0
        #[arg(long)]
        g: f64,
        /// Strong-interaction validity threshold on x0
        #[arg(long, default_value_t = 2.0)]
        threshold: f64,
        #[command(flatten)]
        out: OutputArgs,
    },

    /// Truncated Schmidt spectrum: one row per retained mode
    Spectrum {
        #[command(flatten)]
        source: Source,
        /// Retain at least this many modes
        #[arg(long)]
        min_modes: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },

    /// Closed-form entanglement entropies per axis and total
    Entropy {
        #[command(flatten)]
        source: Source,
        /// Rényi orders (comma-separated)
        #[arg(long, value_delimiter = ',', default_value = "0.5,2,3")]
        alphas: Vec<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },

    /// Normalization factors χ_0..χ_N
    Chi {
        #[command(flatten)]
        source: Source,
        /// Pair count N
        #[arg(long = "pairs", short = 'N', alias = "N")]
        pairs: usize,
        #[arg(long, value_enum, default_value_t = ChiKindArg::Fermi)]
        kind: ChiKindArg,
        #[arg(long, value_enum, default_value_t = ChiMethodArg::Dp)]
        method: ChiMethodArg,
        #[command(flatten)]
        out: OutputArgs,
    },

    /// Bosonic-quality ratio χ_{N+1}/χ_N with Chudzicki bounds and the
    /// linear entropy, over a z_x sweep
    Ratio {
        /// z_x values: comma list or inclusive sweep `start:stop:count`
        #[arg(long = "zx-sweep")]
        zx_sweep: String,
        /// Transverse z_y values applied to every sweep point
        #[arg(long, value_delimiter = ',')]
        zy: Vec<f64>,
        /// Pair counts (comma-separated)
        #[arg(long = "pairs", short = 'N', value_delimiter = ',')]
        pairs: Vec<usize>,
        #[arg(long, default_value_t = 1e-12)]
        tail_tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },

    /// Mode populations n_j(N)
    Populations {
        #[command(flatten)]
        source: Source,
        #[arg(long = "pairs", short = 'N', alias = "N")]
        pairs: usize,
        /// Sweep z_x instead of a single point (`start:stop:count` or
        /// comma list); emits long-format rows for --modes
        #[arg(long = "zx-sweep", conflicts_with = "zx")]
        zx_sweep: Option<String>,
        /// Mode indices reported in sweep form
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6,10,20")]
        modes: Vec<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },

    /// Density of states g_j·n_j with optional effective-temperature fits
    Dos {
        /// z_x values (comma list or sweep)
        #[arg(long)]
        zx: String,
        #[arg(long = "pairs", short = 'N', alias = "N")]
        pairs: usize,
        #[arg(long, value_enum, default_value_t = DegeneracyArg::Uniform)]
        degeneracy: DegeneracyArg,
        /// Fit models to append to the `<output>_fit.csv` summary
        #[arg(long, value_enum, value_delimiter = ',')]
        fit: Vec<FitModelArg>,
        #[arg(long, default_value_t = 1e-12)]
        tail_tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },

    /// Fit a Fermi-Dirac or Bose-Einstein form to a DOS table
    Fit {
        #[arg(long, value_enum)]
        model: FitModelArg,
        /// CSV with `mode` and `dos` columns (as written by `dos`)
        #[arg(long, conflicts_with = "planted")]
        input: Option<PathBuf>,
        /// Filter rows by equality on a column, e.g. `zx=0.1`
        #[arg(long = "where")]
        filter: Option<String>,
        /// Generate noiseless synthetic data `j_mu,t_eff,points` instead
        /// of reading a file (round-trip check)
        #[arg(long)]
        planted: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },

    /// Probability of n pairs in the t lowest modes
    Counting {
        #[command(flatten)]
        source: Source,
        #[arg(long = "pairs", short = 'N', alias = "N")]
        pairs: usize,
        /// Window size t (defaults to N)
        #[arg(long)]
        t: Option<usize>,
        /// Sweep z_x; emits `zx,mean,variance` rows
        #[arg(long = "zx-sweep", conflicts_with = "zx")]
        zx_sweep: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },

    /// Real-space density profile with peak count and regime label
    Density {
        /// Inverse-power exponent γ > 0
        #[arg(long)]
        gamma: f64,
        /// Interaction strengths (comma-separated); one profile per value
        #[arg(long, value_delimiter = ',')]
        g: Vec<f64>,
        #[arg(long = "pairs", short = 'N', alias = "N")]
        pairs: usize,
        #[arg(long, default_value_t = 2048)]
        points: usize,
        /// Grid half-width override (oscillator lengths)
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        prominence: f64,
        #[arg(long, default_value_t = 1e-12)]
        tail_tol: f64,
        /// Skip the per-profile grid-SVD orbital validation
        #[arg(long)]
        skip_validation: bool,
        /// Output stem; writes `<stem>_g<i>.csv` profiles and
        /// `<stem>_summary.csv`
        #[arg(long)]
        output: PathBuf,
    },

    /// Reproduce a figure dataset (presets 1..5)
    Figure {
        #[arg(long)]
        preset: u8,
        #[arg(long)]
        outdir: PathBuf,
    },

    /// Brute-force references and arbitration reports
    Oracle {
        #[command(subcommand)]
        op: OracleOp,
    },
}

#[derive(Subcommand, Debug)]
pub enum OracleOp {
    /// Grid-SVD arbitration of the two z_x closed forms
    ZxArbitration {
        /// Curvature ratios μ to decompose (comma-separated)
        #[arg(long, value_delimiter = ',', default_value = "1.7320508075688772,3.0")]
        mu: Vec<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Bosonic-convention report: 2D factorization claim vs the multiset
    /// definition and the operator norm
    Convention {
        #[arg(long)]
        zx: f64,
        #[arg(long)]
        zy: f64,
        #[arg(long, default_value_t = 4)]
        max_pairs: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exhaustive χ_N over an explicit truncation
    Chi {
        #[arg(long)]
        z: f64,
        #[arg(long, default_value_t = 12)]
        modes: usize,
        #[arg(long = "pairs", short = 'N', alias = "N")]
        pairs: usize,
        #[arg(long, value_enum, default_value_t = ChiKindArg::Fermi)]
        kind: ChiKindArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exhaustive counting distribution over an explicit truncation
    Counting {
        #[arg(long)]
        z: f64,
        #[arg(long, default_value_t = 14)]
        modes: usize,
        #[arg(long = "pairs", short = 'N', alias = "N")]
        pairs: usize,
        #[arg(long)]
        t: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Grid Schmidt spectrum of the two-body Gaussian
    Schmidt {
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}
