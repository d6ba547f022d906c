use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dicke_core::{JxWeight, MicroConfig, SpinSpace};

#[derive(Debug, Parser)]
#[command(
    name = "dicke",
    version,
    about = "Dicke model thermodynamics across all spin sectors"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Semiclassical curve of a single j-sector.
    Sector(SectorArgs),
    /// Full-model microcanonical curve.
    Micro(MicroArgs),
    /// Finite-N canonical curve on a β grid.
    Canonical(CanonicalArgs),
    /// Thermodynamic-limit (saddle point) curve on a β grid.
    Laplace(LaplaceArgs),
    /// Microcanonical and thermodynamic canonical observables side by side.
    Compare(CompareArgs),
    /// Exact diagonalization of every sector, histogrammed in E/N.
    Diag(DiagArgs),
    /// Finite-size scaling of the critical-energy precursors.
    Scaling(ScalingArgs),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Sector(a) => &a.common,
            Command::Micro(a) => &a.common,
            Command::Canonical(a) => &a.common,
            Command::Laplace(a) => &a.common,
            Command::Compare(a) => &a.common,
            Command::Diag(a) => &a.common,
            Command::Scaling(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// key=value file; keys are long flag names, flags given here win.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// CSV destination (stdout when absent).
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct Model {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub omega0: f64,
    /// Coupling; defaults to 1.5 except for `sector`, which requires it.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Number of atoms N.
    #[arg(long = "n")]
    pub n_atoms: Option<u64>,
    /// Symmetry-breaking field along J_x.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Args)]
pub struct EnergyGrid {
    #[arg(long, allow_negative_numbers = true)]
    pub e_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub e_max: Option<f64>,
    #[arg(long)]
    pub e_step: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct BetaGrid {
    #[arg(long, default_value_t = 0.01)]
    pub beta_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub beta_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub beta_step: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WeightArg {
    Classical,
    Published,
}

impl From<WeightArg> for JxWeight {
    fn from(w: WeightArg) -> Self {
        match w {
            WeightArg::Classical => JxWeight::Classical,
            WeightArg::Published => JxWeight::AsPublished,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Nodes {
    #[arg(long)]
    pub panel_levels: Option<usize>,
    #[arg(long)]
    pub gauss_points: Option<usize>,
    #[arg(long)]
    pub min_nodes: Option<usize>,
    #[arg(long, value_enum, default_value_t = WeightArg::Classical)]
    pub jx_weight: WeightArg,
}

impl Nodes {
    pub fn micro_config(&self) -> MicroConfig {
        let d = MicroConfig::default();
        MicroConfig {
            panel_levels: self.panel_levels.unwrap_or(d.panel_levels),
            gauss_points: self.gauss_points.unwrap_or(d.gauss_points),
            min_nodes: self.min_nodes.unwrap_or(d.min_nodes),
            log_cutoff: d.log_cutoff,
            jx_weight: self.jx_weight.into(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SectorArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: Model,
    /// Sector j as a fraction of N (nearest admissible j is used).
    #[arg(long, default_value_t = 0.5)]
    pub j_fraction: f64,
    #[command(flatten)]
    pub grid: EnergyGrid,
    #[arg(long, value_enum, default_value_t = WeightArg::Classical)]
    pub jx_weight: WeightArg,
}

#[derive(Debug, Args)]
pub struct MicroArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub grid: EnergyGrid,
    #[command(flatten)]
    pub nodes: Nodes,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SpaceArg {
    Full,
    Maximal,
}

impl From<SpaceArg> for SpinSpace {
    fn from(s: SpaceArg) -> Self {
        match s {
            SpaceArg::Full => SpinSpace::Full,
            SpaceArg::Maximal => SpinSpace::MaximalSector,
        }
    }
}

#[derive(Debug, Args)]
pub struct CanonicalArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub betas: BetaGrid,
    #[arg(long, value_enum, default_value_t = SpaceArg::Full)]
    pub space: SpaceArg,
}

#[derive(Debug, Args)]
pub struct LaplaceArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub betas: BetaGrid,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: Model,
    #[command(flatten)]
    pub grid: EnergyGrid,
    #[command(flatten)]
    pub nodes: Nodes,
}

#[derive(Debug, Args)]
pub struct DiagArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: Model,
    /// Photon-number cutoff.
    #[arg(long, default_value_t = 150)]
    pub n_max: usize,
    /// Histogram bin width in E/N.
    #[arg(long, default_value_t = 0.05)]
    pub bins: f64,
    /// Spectrum cache location.
    #[arg(long, env = "DICKE_CACHE_DIR", value_name = "PATH")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObservableArg {
    Jz,
    Jx,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: Model,
    #[arg(long, value_enum, default_value_t = ObservableArg::Jz)]
    pub observable: ObservableArg,
    /// J_x/N level defining the J_x precursor.
    #[arg(long, default_value_t = 0.01)]
    pub threshold: f64,
    /// Comma-separated N values.
    #[arg(long, value_delimiter = ',')]
    pub ladder: Option<Vec<u64>>,
    /// Scan start below E_c/N.
    #[arg(long)]
    pub below: Option<f64>,
    /// Scan step in E/N.
    #[arg(long)]
    pub step: Option<f64>,
    #[command(flatten)]
    pub nodes: Nodes,
}
