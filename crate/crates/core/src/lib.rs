//! Exact electromagnetic observables of a charged particle, free or
//! harmonically bound, whose wavefunction undergoes QMUPL collapse.
//!
//! Within the dipole approximation the Heisenberg equations of the
//! particle + field system are linear and solve by Laplace transform. All
//! time dependence is then controlled by the zeros of the characteristic
//! function H(z) = κ + z²(m − βz):
//!
//! - [`model_params`]: constants, parameters, unit conversions;
//! - [`characteristic`]: H(z) and its roots (Cardan, small-ω₀ expansion);
//! - [`residue`]: inverse Laplace transforms of rational functions;
//! - [`response`]: the kernels F_n, G^±_n, G^±_± as residue sums;
//! - [`radiation`]: emission spectra, energy growth and the order-of-limits
//!   experiment.

pub mod characteristic;
pub mod model_params;
pub mod radiation;
pub mod residue;
pub mod response;

pub use characteristic::{approx_roots, cardan_roots, h_of_z, residue_weight, CubicRoots, RootError, RootMethod};
pub use model_params::{GrwParams, ModelParams, ParamError, PhotonEnergy, PhysicalConstants};
pub use radiation::{Oscillations, RadiationError, Regime, SpectrumPoint, SpectrumSweep};
pub use response::{f_n, g_pm_n, g_pm_pm, KernelKind, PolePolicy, ResponseError, ResponseEval, Sign};
