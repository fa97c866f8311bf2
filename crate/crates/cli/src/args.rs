use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use decoherence_core::LengthUnit;

#[derive(Parser, Debug)]
#[command(
    name = "decoherence",
    version,
    about = "Vacuum-fluctuation decoherence of electron interferometers",
    long_about = "Evaluates the decoherence exponent W = W_V + W_γ for parallel and intersecting \
                  electron paths, the wavepacket shape constant κ, and the spreading bound.\n\n\
                  Units: one length unit per run (--unit, default um). Speeds are fractions of c; \
                  times are entered as lengths (c = 1).",
    args_override_self = true
)]
pub struct Cli {
    /// Flat key=value file; keys are long flag names without dashes.
    /// Flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Write CSV output here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Relative tolerance for every quadrature.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub rel_tol: f64,

    /// Seed for the sampling oracles.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Length unit for all lengths: m, mm, um or nm.
    #[arg(long, global = true, default_value = "um")]
    pub unit: LengthUnit,

    #[command(subcommand)]
    pub command: Command,
}

pub const SUBCOMMANDS: [&str; 5] = ["kappa-sweep", "parallel", "intersect", "verify", "validity"];
pub const GLOBAL_KEYS: [&str; 4] = ["out", "rel-tol", "seed", "unit"];

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sweep the shape constant κ over the cylinder aspect ratio β = L/R.
    #[command(
        args_override_self = true,
        after_help = "CSV columns:\n  beta            aspect ratio L/R (\"-\" for the sphere)\n  \
                      kappa           shape constant κ = ⟨ln(ρ²/ℓ²)⟩\n  \
                      error_estimate  quadrature error estimate of kappa\n\n\
                      β = 2 is added to the grid when bracketed; κ(β) has a cusp there."
    )]
    KappaSweep(KappaSweepArgs),

    /// Parallel paths a distance r0 apart, flown for rest-frame time T.
    #[command(
        args_override_self = true,
        after_help = "T is the proper flight time, entered as a length (c = 1).\n\n\
                      CSV columns (--sweep t):\n  T          flight time\n  \
                      w_vacuum   vacuum term W_V\n  w_photon   photon-emission term W_γ (exact kernel)\n  \
                      w_total    W = W_V + W_γ"
    )]
    Parallel(ParallelArgs),

    /// Paths leaving a common point at half-angle theta, then running parallel.
    #[command(
        args_override_self = true,
        after_help = "CSV columns (--sweep ell):\n  ell        wavepacket characteristic length\n  \
                      w_vacuum   vacuum term W_V\n  w_photon   photon-emission term W_γ\n  \
                      w_total    W = W_V + W_γ"
    )]
    Intersect(IntersectArgs),

    /// Compare closed forms against quadrature and sampling oracles.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),

    /// Wavepacket-spreading bound on the flight distance.
    #[command(args_override_self = true)]
    Validity(ValidityArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeKind {
    Sphere,
    Cylinder,
}

#[derive(Args, Debug, Clone)]
pub struct ShapeArgs {
    #[arg(long, value_enum, default_value_t = ShapeKind::Sphere)]
    pub shape: ShapeKind,

    /// Sphere or cylinder radius.
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,

    /// Cylinder length (required for --shape cylinder).
    #[arg(long)]
    pub length: Option<f64>,
}

#[derive(Args, Debug)]
pub struct KappaSweepArgs {
    #[arg(long, value_enum, default_value_t = ShapeKind::Cylinder)]
    pub shape: ShapeKind,

    #[arg(long, default_value_t = 0.1)]
    pub beta_min: f64,

    #[arg(long, default_value_t = 20.0)]
    pub beta_max: f64,

    #[arg(long, default_value_t = 40)]
    pub steps: usize,

    /// Logarithmic grid spacing.
    #[arg(long)]
    pub log: bool,
}

#[derive(Args, Debug, Clone)]
pub struct BeamArgs {
    /// Mean kinetic energy in eV; enables the spreading-bound check.
    #[arg(long, requires = "dx0")]
    pub energy_ev: Option<f64>,

    /// Initial wavepacket size, for the spreading-bound check.
    #[arg(long, requires = "energy_ev")]
    pub dx0: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParallelSweep {
    T,
}

#[derive(Args, Debug)]
pub struct ParallelArgs {
    /// Path separation.
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    pub r0: f64,

    /// Rest-frame flight time, as a length.
    #[arg(long = "t", default_value_t = 1e7)]
    pub t: f64,

    #[arg(long, default_value_t = 0.01)]
    pub v: f64,

    #[command(flatten)]
    pub shape: ShapeArgs,

    #[command(flatten)]
    pub beam: BeamArgs,

    /// Emit a CSV sweep over this parameter (log-spaced, --from to --to).
    #[arg(long, value_enum, requires_all = ["from", "to"])]
    pub sweep: Option<ParallelSweep>,

    #[arg(long)]
    pub from: Option<f64>,

    #[arg(long)]
    pub to: Option<f64>,

    #[arg(long, default_value_t = 21)]
    pub steps: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntersectBranch {
    /// Small-v closed forms.
    Closed,
    /// Segment integrals by principal-value quadrature.
    Assembled,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntersectSweep {
    Ell,
}

#[derive(Args, Debug)]
pub struct IntersectArgs {
    #[arg(long, default_value_t = 100.0)]
    pub l1: f64,

    #[arg(long, default_value_t = 1e4)]
    pub l2: f64,

    /// Half-opening angle in radians, in (0, π/2].
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub theta: f64,

    #[arg(long, default_value_t = 0.1)]
    pub v: f64,

    #[command(flatten)]
    pub shape: ShapeArgs,

    #[command(flatten)]
    pub beam: BeamArgs,

    #[arg(long, value_enum, default_value_t = IntersectBranch::Closed)]
    pub branch: IntersectBranch,

    /// Emit a CSV sweep over the characteristic length ℓ (log-spaced); the
    /// packet shape is rescaled, not changed.
    #[arg(long, value_enum, requires_all = ["from", "to"])]
    pub sweep: Option<IntersectSweep>,

    #[arg(long)]
    pub from: Option<f64>,

    #[arg(long)]
    pub to: Option<f64>,

    #[arg(long, default_value_t = 11)]
    pub steps: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Kernels,
    Kappa,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum, default_value_t = Suite::All)]
    pub suite: Suite,

    /// Sample count for each Monte-Carlo oracle run.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
}

#[derive(Args, Debug)]
pub struct ValidityArgs {
    /// Mean kinetic energy in eV.
    #[arg(long, default_value_t = 1e4, allow_negative_numbers = true)]
    pub energy_ev: f64,

    /// Initial wavepacket size in the run's length unit.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub dx0: f64,
}
