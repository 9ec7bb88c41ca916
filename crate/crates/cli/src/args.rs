//! Command-line and job-file surface. Every command can be given either as
//! flags or as a JSON job file (`sublorentz run job.json`) with the same
//! field names; job files reject unknown fields.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 20240601;

#[derive(Debug, Parser)]
#[command(name = "sublorentz", version, about = "Geodesics and reachable sets on sub-Lorentzian H-type groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Output format; defaults to csv for paths and plot data, json for reports.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for randomized commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

/// A job file: one command plus the global options.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Heis,
    Quat,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Causal class of a horizontal vector, or reachability of a target point.
    Classify(ClassifyArgs),
    /// Geodesics from the origin as path samples.
    #[command(subcommand)]
    Geodesic(GeodesicCommand),
    /// Run a verification suite and emit a JSON report.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Data behind the standard plots.
    #[command(subcommand)]
    Plotdata(PlotCommand),
    /// Endpoints of random future-directed curves from the origin.
    ReachableSample(SampleArgs),
    /// Execute a JSON job file.
    #[serde(skip)]
    Run {
        job: PathBuf,
    },
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct ClassifyArgs {
    #[arg(long, value_enum)]
    pub group: Group,
    /// Frame coefficients of a horizontal vector.
    #[arg(long, num_args = 1.., conflicts_with = "target", required_unless_present = "target")]
    #[serde(default)]
    pub vector: Option<Vec<f64>>,
    /// Base point of the vector (defaults to the origin).
    #[arg(long, num_args = 1.., requires = "vector")]
    #[serde(default)]
    pub at: Option<Vec<f64>>,
    /// Target point to be reached from the origin.
    #[arg(long, num_args = 1..)]
    #[serde(default)]
    pub target: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Closed,
    Rk4,
    Rk45,
}

fn default_samples() -> usize {
    101
}

fn default_t1() -> f64 {
    1.0
}

fn default_integrator() -> Integrator {
    Integrator::Closed
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeodesicCommand {
    /// Shoot from the origin with initial velocity `v0` and momentum `theta`.
    Shoot(ShootArgs),
    /// Connect the origin to a Heisenberg target on `[0, 1]`.
    Connect(ConnectArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct ShootArgs {
    #[arg(long, value_enum, default_value = "heis")]
    #[serde(default = "default_group")]
    pub group: Group,
    #[arg(long, num_args = 1.., required = true)]
    pub v0: Vec<f64>,
    #[arg(long, num_args = 1.., required = true)]
    pub theta: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_t1")]
    pub t1: f64,
    #[arg(long, default_value_t = 101)]
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Closed form, or numerical integration of the Hamiltonian system.
    #[arg(long, value_enum, default_value = "closed")]
    #[serde(default = "default_integrator")]
    pub integrator: Integrator,
    /// JSON integration settings (steps, tol) for rk4/rk45.
    #[arg(long)]
    #[serde(default)]
    pub config: Option<PathBuf>,
}

fn default_group() -> Group {
    Group::Heis
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct ConnectArgs {
    #[arg(long, num_args = 3, required = true)]
    pub target: Vec<f64>,
    #[arg(long, default_value_t = 101)]
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_n() -> usize {
    1000
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyCommand {
    /// Round trip of the μ solver, monotonicity and limits of μ.
    Mu(MuArgs),
    /// Scalar coefficient identities of the quaternion closed form.
    Appendix(CountArgs),
    /// Norm identities for x and z, and the |z|² discrepancy sweep.
    Identities(CountArgs),
    /// Endpoints of sampled curves against a region.
    Inclusion(InclusionArgs),
    /// Closed forms against the numerical integrator.
    Crosscheck(CountArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountArgs {
    #[arg(long, default_value_t = 1000)]
    #[serde(default = "default_n")]
    pub n: usize,
}

fn default_tau_max() -> f64 {
    15.0
}

fn default_grid() -> usize {
    10_000
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuArgs {
    #[arg(long, default_value_t = 1000)]
    #[serde(default = "default_n")]
    pub n: usize,
    /// Monotonicity is checked on `[-tau_max, tau_max]`.
    #[arg(long, default_value_t = 15.0)]
    #[serde(default = "default_tau_max")]
    pub tau_max: f64,
    #[arg(long, default_value_t = 10_000)]
    #[serde(default = "default_grid")]
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Gamma,
    A,
    Bslice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceArg {
    X3x4,
    X2x3,
    X2x4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Timelike,
    Nonspacelike,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerArg {
    Controls,
    Geodesics,
}

fn default_region() -> RegionKind {
    RegionKind::Gamma
}

fn default_kind() -> KindArg {
    KindArg::Nonspacelike
}

fn default_sampler() -> SamplerArg {
    SamplerArg::Controls
}

fn default_curve_samples() -> usize {
    129
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct InclusionArgs {
    #[arg(long, default_value_t = 1000)]
    #[serde(default = "default_n")]
    pub n: usize,
    #[arg(long, value_enum, default_value = "gamma")]
    #[serde(default = "default_region")]
    pub region: RegionKind,
    /// `α` for the gamma and a regions.
    #[arg(long, default_value_t = 0.0)]
    #[serde(default)]
    pub alpha: f64,
    /// Slice for the bslice region; also restricts the control sampler.
    #[arg(long, value_enum)]
    #[serde(default)]
    pub slice: Option<SliceArg>,
    #[command(flatten)]
    #[serde(flatten)]
    pub curves: CurveArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CurveArgs {
    #[arg(long, value_enum, default_value = "nonspacelike")]
    #[serde(default = "default_kind")]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value = "controls")]
    #[serde(default = "default_sampler")]
    pub sampler: SamplerArg,
    /// Samples per curve.
    #[arg(long, default_value_t = 129)]
    #[serde(default = "default_curve_samples")]
    pub curve_samples: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 1000)]
    #[serde(default = "default_n")]
    pub n: usize,
    #[arg(long, value_enum)]
    #[serde(default)]
    pub slice: Option<SliceArg>,
    #[command(flatten)]
    #[serde(flatten)]
    pub curves: CurveArgs,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotCommand {
    /// A Heisenberg timelike geodesic through the origin, `t ∈ [-t1, t1]`.
    TimelikeGeodesic(TimelikeArgs),
    /// `μ(τ)` on a uniform grid.
    MuCurve(MuCurveArgs),
    /// Boundary of the Heisenberg region reachable by timelike geodesics.
    ReachableRegion(RegionArgs),
}

fn default_plot_v0() -> Vec<f64> {
    vec![1.0, 0.3]
}

fn default_plot_t1() -> f64 {
    2.0
}

fn default_plot_samples() -> usize {
    201
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct TimelikeArgs {
    #[arg(long, num_args = 2, default_values_t = [1.0, 0.3])]
    #[serde(default = "default_plot_v0")]
    pub v0: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_t1")]
    pub theta: f64,
    #[arg(long, default_value_t = 2.0)]
    #[serde(default = "default_plot_t1")]
    pub t1: f64,
    #[arg(long, default_value_t = 201)]
    #[serde(default = "default_plot_samples")]
    pub samples: usize,
}

fn default_tau_lo() -> f64 {
    -5.0
}

fn default_tau_hi() -> f64 {
    5.0
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct MuCurveArgs {
    #[arg(long, default_value_t = -5.0)]
    #[serde(default = "default_tau_lo")]
    pub tau_min: f64,
    #[arg(long, default_value_t = 5.0)]
    #[serde(default = "default_tau_hi")]
    pub tau_max: f64,
    #[arg(long, default_value_t = 1000)]
    #[serde(default = "default_n")]
    pub samples: usize,
}

fn default_x_max() -> f64 {
    2.0
}

fn default_region_samples() -> usize {
    41
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionArgs {
    #[arg(long, default_value_t = 2.0)]
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 41)]
    #[serde(default = "default_region_samples")]
    pub samples: usize,
}
