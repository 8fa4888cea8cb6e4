//! One-dimensional QMUPL and GRW collapse dynamics.
//!
//! - [`grid`]: wavefunctions on a periodic position grid, FFT helpers;
//! - [`noise`]: seeded Wiener increments;
//! - [`sde`]: the ζ-family of stochastic Schrödinger equations;
//! - [`master`]: density matrices and the QMUPL/GRW master equations;
//! - [`ensemble`]: parallel, deterministic trajectory ensembles.
//!
//! All evolvers share one Strang split (half kinetic, position step, half
//! kinetic), which makes the ζ = i ensemble average coincide with the
//! master-equation scheme step for step.

use num_complex::Complex64;
use thiserror::Error;

pub mod ensemble;
pub mod grid;
pub mod master;
pub mod noise;
pub mod sde;

pub use ensemble::{ensemble_run, EnsembleConfig, EnsembleStats, ObservableStats};
pub use grid::WavefunctionGrid;
pub use master::{evolve_master, evolve_master_grw, evolve_master_qmupl, Decoherence, DensityMatrixGrid};
pub use noise::NoisePath;
pub use sde::{evolve_zeta, Hamiltonian, Trajectory, ZetaStepper};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid time step: {0}")]
    InvalidTimeStep(String),
    #[error("ζ = {0} is not a unit phase")]
    InvalidZeta(Complex64),
    #[error("initial state has squared norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("norm drift {drift:e} at step {step} exceeds tolerance")]
    NormDrift { step: usize, drift: f64 },
    #[error("midpoint ⟨q⟩ iteration did not converge at step {step}")]
    MidpointNotConverged { step: usize },
    #[error("non-finite amplitude at step {step}")]
    NonFinite { step: usize },
    #[error("wavefunction reached the grid edge (edge/peak = {ratio:e})")]
    GridEscape { ratio: f64 },
    #[error("noise path has {available} increments, {needed} needed")]
    NoiseTooShort { needed: usize, available: usize },
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("trace drift {drift:e} exceeds tolerance")]
    TraceDrift { drift: f64 },
    #[error("at least 100 trajectories required, got {0}")]
    TooFewTrajectories(usize),
    #[error("standard error of {observable} is {standard_error:e}, above the requested {tolerance:e}")]
    NonConvergence { observable: &'static str, standard_error: f64, tolerance: f64 },
}
