use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

#[derive(Debug, Parser)]
#[command(name = "qtomo", version, about = "Quantum states between kernels, phase space and tomograms")]
pub struct Cli {
    /// Worker threads for parallel stages (outputs do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a test state and write it as QTF.
    State {
        #[command(subcommand)]
        kind: StateKind,
    },
    /// Characteristic function of a state or kernel.
    Char(MapArgs),
    /// Wigner function of a state, kernel or characteristic function.
    Wigner(MapArgs),
    /// Fractional Fourier transform of a pure state.
    Frft(FrftArgs),
    /// Optical tomogram by one or all routes.
    Tomogram(TomogramArgs),
    /// Density kernel from a tomogram.
    Reconstruct(ReconstructArgs),
    /// Transition probability between two states.
    Fidelity(FidelityArgs),
    /// Sobolev-regularity report under grid refinement.
    Regularity(RegularityArgs),
    /// Run the acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Half-width of the position grid.
    #[arg(long, default_value_t = 8.0)]
    pub extent: f64,
    /// Number of position nodes.
    #[arg(long, default_value_t = 256)]
    pub count: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file (QTF or QTG).
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also export CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum StateKind {
    /// Energy eigenstate |m⟩.
    Fock {
        m: usize,
        #[command(flatten)]
        grid: GridArgs,
        /// Write the density kernel instead of the wavefunction.
        #[arg(long)]
        kernel: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Coherent state |α⟩, e.g. `1+0.5i`.
    Coherent {
        #[arg(allow_hyphen_values = true)]
        alpha: Complex64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        kernel: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Normalized indicator of [-halfwidth, halfwidth].
    Box {
        halfwidth: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        kernel: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Weighted sum of states or kernels, given as WEIGHT:FILE. Put negative
    /// weights after `--`.
    Mix {
        #[arg(required = true, num_args = 1..)]
        parts: Vec<String>,
        /// Accept negative weights.
        #[arg(long)]
        allow_negative: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// How a 2-D field should be interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputKind {
    /// 1-D fields are states, 2-D fields on equal axes are kernels.
    Auto,
    State,
    Kernel,
    Char,
    Wigner,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    pub input: PathBuf,
    #[arg(long = "from", value_enum, default_value_t = InputKind::Auto)]
    pub from: InputKind,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FrftArgs {
    pub input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TomogramRoute {
    Char,
    Wigner,
    Rotate,
    All,
}

#[derive(Debug, Args)]
pub struct TomogramArgs {
    pub input: PathBuf,
    #[arg(long = "from", value_enum, default_value_t = InputKind::Auto)]
    pub from: InputKind,
    /// Number of uniform angles.
    #[arg(long, default_value_t = 64)]
    pub angles: usize,
    /// Spread the angles over [0, 2π) instead of [0, π).
    #[arg(long)]
    pub full_circle: bool,
    #[arg(long, value_enum, default_value_t = TomogramRoute::Char)]
    pub route: TomogramRoute,
    /// Output file; with `--route all` the route name is added to the stem.
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    pub input: PathBuf,
    /// Reference kernel or state to compare against.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FidelityRoute {
    Direct,
    Char,
    Tomo,
    All,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long, value_enum, default_value_t = FidelityRoute::Direct)]
    pub route: FidelityRoute,
    #[arg(long = "from", value_enum, default_value_t = InputKind::Auto)]
    pub from: InputKind,
    /// Angles for tomograms computed on the fly.
    #[arg(long, default_value_t = 64)]
    pub angles: usize,
}

#[derive(Debug, Args)]
pub struct RegularityArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub nu: f64,
    #[arg(long, default_value_t = 3)]
    pub refinements: usize,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Directory for the determinism artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
