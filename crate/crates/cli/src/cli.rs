use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exact EM observables and collapse dynamics of a charged particle under
/// QMUPL collapse.
#[derive(Debug, Parser)]
#[command(name = "radiance", version, args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Physical constants and derived particle parameters.
    Constants(ConstantsArgs),
    /// Zeros of the characteristic function H(z).
    Roots(RootsArgs),
    /// Response kernels F_n(t), G±_n(k,t), G±±(k,k',t) on a time grid.
    Response(ResponseArgs),
    /// Photon emission rate dΓ/dk on a wavenumber or energy grid.
    Spectrum(SpectrumArgs),
    /// Collapse-induced mean energy growth of a free particle.
    Energy(EnergyArgs),
    /// Monte-Carlo ensemble of ζ-family trajectories on a 1D grid.
    Simulate(SimulateArgs),
    /// QMUPL or GRW master-equation evolution on a 1D grid.
    Master(MasterArgs),
    /// Order-of-limits experiment (ω₀ → 0 versus t → ∞).
    Limits(LimitsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants(_) => "constants",
            Command::Roots(_) => "roots",
            Command::Response(_) => "response",
            Command::Spectrum(_) => "spectrum",
            Command::Energy(_) => "energy",
            Command::Simulate(_) => "simulate",
            Command::Master(_) => "master",
            Command::Limits(_) => "limits",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Particle {
    Electron,
    Proton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Units {
    /// CODATA 2018 constants
    Si,
    /// ħ = c = ε₀ = 1, default mass 1 and charge 0
    Natural,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// key=value file, or a previous JSON output to replay.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ParticleArgs {
    #[arg(long, value_enum, default_value_t = Particle::Electron)]
    pub particle: Particle,
    #[arg(long, value_enum, default_value_t = Units::Si)]
    pub units: Units,
    /// Mass (kg); overrides the preset.
    #[arg(long)]
    pub mass: Option<f64>,
    /// Charge (C); overrides the preset.
    #[arg(long)]
    pub charge: Option<f64>,
    /// Oscillator angular frequency (rad/s); 0 for a free particle.
    #[arg(long, default_value_t = 0.0)]
    pub omega0: f64,
    /// QMUPL collapse strength λ (m⁻²·s⁻¹). Defaults to the value matching
    /// the standard GRW parameters.
    #[arg(long, conflicts_with_all = ["lambda_grw", "gamma_csl"])]
    pub lambda: Option<f64>,
    /// GRW collapse rate λ_GRW (s⁻¹); λ = α·λ_GRW/2.
    #[arg(long, requires = "alpha", conflicts_with = "gamma_csl")]
    pub lambda_grw: Option<f64>,
    /// CSL strength γ (m³·s⁻¹); λ = α^{5/2}γ/(16π^{3/2}).
    #[arg(long, requires = "alpha")]
    pub gamma_csl: Option<f64>,
    /// GRW/CSL localisation constant α = 1/r_C² (m⁻²).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Allow ω₀ at or beyond the validity bound 2m/(√27β).
    #[arg(long)]
    pub force_exact: bool,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[command(flatten)]
    pub particle: ParticleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RootMethodArg {
    Cardan,
    Approx,
    Both,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[command(flatten)]
    pub particle: ParticleArgs,
    #[arg(long, value_enum, default_value_t = RootMethodArg::Both)]
    pub method: RootMethodArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    F0,
    F1,
    F2,
    /// G⁺₀
    Gp0,
    /// G⁺₁
    Gp1,
    /// G⁻₀
    Gm0,
    /// G⁻₁
    Gm1,
    /// G⁺⁺
    Gpp,
    /// G⁺⁻
    Gpm,
    /// G⁻⁺
    Gmp,
    /// G⁻⁻
    Gmm,
}

#[derive(Debug, Args)]
pub struct ResponseArgs {
    #[command(flatten)]
    pub particle: ParticleArgs,
    #[arg(long, value_enum)]
    pub kernel: KernelArg,
    /// Photon wavenumber k (m⁻¹) for G kernels.
    #[arg(long)]
    pub k: Option<f64>,
    /// Second wavenumber k′ (m⁻¹) for G±± kernels.
    #[arg(long)]
    pub k_prime: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub tmin: f64,
    #[arg(long)]
    pub tmax: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    /// Keep the runaway pole z₁ ≈ m/β.
    #[arg(long)]
    pub include_runaway: bool,
    /// Drop the field pole.
    #[arg(long)]
    pub exclude_field: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    FreeExact,
    FreeBeta0,
    HoLargeTime,
    HoFiniteTime,
    HoBeta0,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub particle: ParticleArgs,
    #[arg(long, value_enum)]
    pub regime: RegimeArg,
    /// Smallest wavenumber (m⁻¹).
    #[arg(long, conflicts_with_all = ["emin_kev", "emax_kev"], requires = "kmax")]
    pub kmin: Option<f64>,
    /// Largest wavenumber (m⁻¹).
    #[arg(long, requires = "kmin")]
    pub kmax: Option<f64>,
    /// Smallest photon energy (keV).
    #[arg(long, requires = "emax_kev")]
    pub emin_kev: Option<f64>,
    /// Largest photon energy (keV).
    #[arg(long, requires = "emin_kev")]
    pub emax_kev: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    /// Uniform rather than logarithmic spacing.
    #[arg(long)]
    pub linear: bool,
    /// Time (s) for the finite-time regime.
    #[arg(long)]
    pub t: Option<f64>,
    /// Keep terms oscillating at the photon frequency.
    #[arg(long)]
    pub retain_oscillations: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub particle: ParticleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HamiltonianArg {
    Zero,
    Free,
    Harmonic,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = -16.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 16.0, allow_negative_numbers = true)]
    pub x_max: f64,
    /// Grid size, a power of two.
    #[arg(long, default_value_t = 128)]
    pub n_points: usize,
    /// Centre of the initial Gaussian (or midpoint of the two branches).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub center: f64,
    /// Position spread σ of each Gaussian.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Mean wavenumber of the initial state.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub k0: f64,
    /// Start from two Gaussians this far apart.
    #[arg(long)]
    pub cat_separation: Option<f64>,
    /// Probability weight of the right-hand branch; ignored without
    /// `--cat-separation`.
    #[arg(long, default_value_t = 0.5)]
    pub cat_weight: f64,
    #[arg(long, value_enum, default_value_t = HamiltonianArg::Free)]
    pub hamiltonian: HamiltonianArg,
    #[arg(long)]
    pub dt: f64,
    #[arg(long)]
    pub t_final: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub particle: ParticleArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Unit phase ζ: `1`, `i`, `-1`, `-i`, or a phase angle in radians.
    #[arg(long, default_value = "1", allow_negative_numbers = true)]
    pub zeta: String,
    #[arg(long, default_value_t = 1000)]
    pub n_traj: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub sample_every: usize,
    /// Fail when the standard error of E[⟨p²⟩] at t_final exceeds this.
    #[arg(long)]
    pub max_standard_error: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Qmupl,
    Grw,
}

#[derive(Debug, Args)]
pub struct MasterArgs {
    #[command(flatten)]
    pub particle: ParticleArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = ModelArg::Qmupl)]
    pub model: ModelArg,
    /// Number of output times after t = 0.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LimitsArgs {
    #[command(flatten)]
    pub particle: ParticleArgs,
    /// Photon wavenumber (m⁻¹).
    #[arg(long, conflicts_with = "energy_kev", required_unless_present = "energy_kev")]
    pub k: Option<f64>,
    /// Photon energy (keV).
    #[arg(long)]
    pub energy_kev: Option<f64>,
    /// Fixed time (s) for the ω₀ → 0 sequence; defaults to 10/(ck).
    #[arg(long)]
    pub t: Option<f64>,
    /// Decades of ω₀ below ck/10 in the finite-time sequence.
    #[arg(long, default_value_t = 4)]
    pub decades: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}
