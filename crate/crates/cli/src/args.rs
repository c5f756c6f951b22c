use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::table::Format;

#[derive(Debug, Parser)]
#[command(name = "cyclide", version, about = "Harmonic functions in 5-cyclide coordinates")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Focal parameters a0,a1,a2,a3 (strictly increasing).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// JSON file with keys a, omega_tol, ode_rtol, ode_atol, format, cache_dir.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Target accuracy of the elliptic-integral table.
    #[arg(long, global = true)]
    pub omega_tol: Option<f64>,
    /// Relative tolerance of the eigenvalue search integrations.
    #[arg(long, global = true)]
    pub ode_rtol: Option<f64>,
    /// Absolute tolerance of the eigenvalue search integrations.
    #[arg(long, global = true)]
    pub ode_atol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert between Cartesian and 5-cyclide coordinates.
    Coords {
        #[command(subcommand)]
        dir: CoordsCmd,
    },
    /// Evaluate the elliptic integral or its inverse.
    Omega(OmegaArgs),
    /// Solve a two-parameter eigenvalue problem.
    Eigen(EigenArgs),
    /// Evaluate cyclidic harmonics.
    Harmonic {
        #[command(subcommand)]
        cmd: HarmonicCmd,
    },
    /// Sample a coordinate surface.
    Surface(SurfaceArgs),
    /// Solve a Dirichlet problem by series expansion.
    Solve(SolveArgs),
    /// Numerical checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum CoordsCmd {
    /// Cartesian point to (s1,s2,s3).
    To {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// (s1,s2,s3) and a sheet id to a Cartesian point.
    From {
        #[arg(long)]
        s: String,
        /// Sign profile id 0..15: bits 0..2 negate x,y,z, bit 3 selects the outside of the unit ball.
        #[arg(long, default_value_t = 0)]
        sheet: usize,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct OmegaArgs {
    /// Evaluate Ω(s).
    #[arg(long, allow_hyphen_values = true)]
    pub at: Option<f64>,
    /// Evaluate the inverse φ(t).
    #[arg(long, allow_hyphen_values = true)]
    pub inverse: Option<f64>,
}

#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    II,
    #[value(name = "III")]
    III,
}

#[derive(Debug, Args)]
pub struct HarmonicSpec {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Oscillation numbers n_a,n_b.
    #[arg(long)]
    pub n: String,
    /// Parity bits, one per symmetry of the kind (all zero by default).
    #[arg(long)]
    pub parity: Option<String>,
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Oscillation numbers n_a,n_b of a single solve.
    #[arg(long, conflicts_with = "batch", required_unless_present = "batch")]
    pub n: Option<String>,
    /// Emit a table over 0..=NA x 0..=NB.
    #[arg(long, value_name = "NA,NB")]
    pub batch: Option<String>,
    #[arg(long)]
    pub parity: Option<String>,
    /// Relative tolerance of the final eigenvalue refinement.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum HarmonicCmd {
    /// Values at the points of a CSV file with columns x,y,z.
    Eval {
        #[command(flatten)]
        spec: HarmonicSpec,
        #[arg(long)]
        points: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    /// Coordinate index 1, 2 or 3.
    #[arg(long)]
    pub index: usize,
    #[arg(long)]
    pub d: f64,
    /// Grid size per sheet.
    #[arg(long, default_value = "24,24")]
    pub res: String,
    /// Emit an indexed triangle list instead of sheet samples.
    #[arg(long)]
    pub triangles: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionArg {
    First,
    Second,
    Third,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub region: RegionArg,
    #[arg(long)]
    pub d: f64,
    /// builtin:point-source or grid:FILE.
    #[arg(long)]
    pub boundary: String,
    /// Location of the point source.
    #[arg(long, allow_hyphen_values = true, default_value = "5,5,5")]
    pub at: String,
    /// Truncation: keeps n_a, n_b < N.
    #[arg(long = "N", short = 'N')]
    pub truncation: usize,
    /// Append boundary errors at five levels and the interior error.
    #[arg(long)]
    pub check: bool,
    /// Cross-check coefficients against the surface integral.
    #[arg(long)]
    pub surface_check: bool,
    /// Write the solution sampled on a lattice to this CSV file.
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Lattice points per axis for --field.
    #[arg(long, default_value_t = 21)]
    pub field_res: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Finite-difference Laplacian of a harmonic at sample points.
    #[arg(long, required = true)]
    pub laplacian: bool,
    #[command(flatten)]
    pub spec: HarmonicSpec,
    /// CSV with columns x,y,z; generated inside the domain when absent.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    /// Larger of the two difference steps.
    #[arg(long, default_value_t = 1e-2)]
    pub h: f64,
}
