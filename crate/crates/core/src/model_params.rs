//! Physical constants, collapse-model parameters and unit conversions.
//!
//! Everything is SI internally. Conversions from the cgs-flavoured values
//! common in the collapse-model literature (α in cm⁻², γ in cm³·s⁻¹, photon
//! energies in keV) happen at the boundary through the helpers at the bottom
//! of this module.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Proton mass (kg), CODATA 2018.
pub const PROTON_MASS: f64 = 1.672_621_923_69e-27;

/// Average nucleon mass (kg), used for mass-proportional collapse strengths.
pub const NUCLEON_MASS: f64 = 1.673_925_000_00e-27;

/// Joules per keV.
pub const JOULE_PER_KEV: f64 = 1.602_176_634e-16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
}

fn finite(name: &'static str, value: f64) -> Result<f64, ParamError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ParamError::NonFinite { name, value })
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64, ParamError> {
    if finite(name, value)? > 0.0 {
        Ok(value)
    } else {
        Err(ParamError::NonPositive { name, value })
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<f64, ParamError> {
    if finite(name, value)? >= 0.0 {
        Ok(value)
    } else {
        Err(ParamError::Negative { name, value })
    }
}

/// Fundamental constants. The CODATA 2018 set is [`PhysicalConstants::CODATA_2018`];
/// custom sets (e.g. natural units for numerical experiments) go through
/// [`PhysicalConstants::new`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J·s)
    pub hbar: f64,
    /// Speed of light (m/s)
    pub c: f64,
    /// Vacuum permittivity (C²·N⁻¹·m⁻²)
    pub epsilon0: f64,
    /// Electron mass (kg)
    pub electron_mass: f64,
    /// Elementary charge (C)
    pub elementary_charge: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 recommended values.
    pub const CODATA_2018: Self = Self {
        hbar: 1.054_571_817e-34,
        c: 299_792_458.0,
        epsilon0: 8.854_187_812_8e-12,
        electron_mass: 9.109_383_701_5e-31,
        elementary_charge: 1.602_176_634e-19,
    };

    pub fn new(
        hbar: f64,
        c: f64,
        epsilon0: f64,
        electron_mass: f64,
        elementary_charge: f64,
    ) -> Result<Self, ParamError> {
        Ok(Self {
            hbar: positive("hbar", hbar)?,
            c: positive("c", c)?,
            epsilon0: positive("epsilon0", epsilon0)?,
            electron_mass: positive("electron_mass", electron_mass)?,
            elementary_charge: positive("elementary_charge", elementary_charge)?,
        })
    }

    /// ħ = c = ε₀ = m_e = e = 1.
    pub fn natural() -> Self {
        Self {
            hbar: 1.0,
            c: 1.0,
            epsilon0: 1.0,
            electron_mass: 1.0,
            elementary_charge: 1.0,
        }
    }

    /// ħc (J·m)
    pub fn hbar_c(&self) -> f64 {
        self.hbar * self.c
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// Radiation-reaction (Abraham–Lorentz) coefficient β = e²/(6πε₀c³), in kg·s.
pub fn beta_coefficient(charge: f64, constants: &PhysicalConstants) -> f64 {
    charge * charge / (6.0 * PI * constants.epsilon0 * constants.c.powi(3))
}

/// Parameters of a single charged particle, optionally harmonically bound,
/// subject to QMUPL collapse. Immutable after construction; `beta` and
/// `kappa` are always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    constants: PhysicalConstants,
    mass: f64,
    charge: f64,
    omega0: f64,
    kappa: f64,
    lambda_qmupl: f64,
    beta: f64,
}

impl ModelParams {
    /// `mass` is the renormalised mass (kg), `omega0` the oscillator angular
    /// frequency (rad/s, zero for a free particle) and `lambda_qmupl` the
    /// collapse strength (m⁻²·s⁻¹).
    pub fn new(
        constants: PhysicalConstants,
        mass: f64,
        charge: f64,
        omega0: f64,
        lambda_qmupl: f64,
    ) -> Result<Self, ParamError> {
        let mass = positive("mass", mass)?;
        let charge = finite("charge", charge)?;
        let omega0 = non_negative("omega0", omega0)?;
        let lambda_qmupl = non_negative("lambda", lambda_qmupl)?;
        Ok(Self {
            constants,
            mass,
            charge,
            omega0,
            kappa: mass * omega0 * omega0,
            lambda_qmupl,
            beta: beta_coefficient(charge, &constants),
        })
    }

    /// Free electron with CODATA constants.
    pub fn electron(lambda_qmupl: f64) -> Result<Self, ParamError> {
        let k = PhysicalConstants::CODATA_2018;
        Self::new(k, k.electron_mass, k.elementary_charge, 0.0, lambda_qmupl)
    }

    /// Free proton with CODATA constants.
    pub fn proton(lambda_qmupl: f64) -> Result<Self, ParamError> {
        let k = PhysicalConstants::CODATA_2018;
        Self::new(k, PROTON_MASS, k.elementary_charge, 0.0, lambda_qmupl)
    }

    pub fn with_omega0(&self, omega0: f64) -> Result<Self, ParamError> {
        Self::new(self.constants, self.mass, self.charge, omega0, self.lambda_qmupl)
    }

    pub fn with_lambda(&self, lambda_qmupl: f64) -> Result<Self, ParamError> {
        Self::new(self.constants, self.mass, self.charge, self.omega0, lambda_qmupl)
    }

    pub fn with_charge(&self, charge: f64) -> Result<Self, ParamError> {
        Self::new(self.constants, self.mass, charge, self.omega0, self.lambda_qmupl)
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn charge(&self) -> f64 {
        self.charge
    }
    pub fn omega0(&self) -> f64 {
        self.omega0
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn lambda(&self) -> f64 {
        self.lambda_qmupl
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn hbar(&self) -> f64 {
        self.constants.hbar
    }

    pub fn is_free(&self) -> bool {
        self.kappa == 0.0
    }

    /// Upper end 2m/(√27·β) of the regime where the small-ω₀ root expansion
    /// holds. Infinite for a neutral particle.
    pub fn validity_bound(&self) -> f64 {
        if self.beta == 0.0 {
            f64::INFINITY
        } else {
            2.0 * self.mass / (27f64.sqrt() * self.beta)
        }
    }

    pub fn in_validity_region(&self) -> bool {
        self.omega0 < self.validity_bound()
    }

    /// Runaway rate m/β (s⁻¹).
    pub fn runaway_rate(&self) -> f64 {
        self.mass / self.beta
    }

    /// Photon angular frequency ω_k = c·k.
    pub fn omega_k(&self, k: f64) -> f64 {
        self.constants.c * k
    }
}

/// GRW / CSL collapse parameters, all in SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrwParams {
    /// Collapse rate λ_GRW (s⁻¹)
    pub lambda_grw: f64,
    /// Inverse squared correlation length α (m⁻²)
    pub alpha: f64,
    /// CSL strength γ (m³·s⁻¹)
    pub gamma_csl: f64,
    /// Correlation length r_C = 1/√α (m)
    pub r_c: f64,
}

impl GrwParams {
    /// From the GRW rate; γ follows from λ_GRW = γ(α/4π)^{3/2}.
    pub fn from_grw(lambda_grw: f64, alpha: f64) -> Result<Self, ParamError> {
        let alpha = positive("alpha", alpha)?;
        let lambda_grw = non_negative("lambda_grw", lambda_grw)?;
        Ok(Self {
            lambda_grw,
            alpha,
            gamma_csl: lambda_grw / csl_volume_factor(alpha),
            r_c: 1.0 / alpha.sqrt(),
        })
    }

    /// From the CSL strength γ.
    pub fn from_csl(gamma_csl: f64, alpha: f64) -> Result<Self, ParamError> {
        let alpha = positive("alpha", alpha)?;
        let gamma_csl = non_negative("gamma_csl", gamma_csl)?;
        Ok(Self {
            lambda_grw: gamma_csl * csl_volume_factor(alpha),
            alpha,
            gamma_csl,
            r_c: 1.0 / alpha.sqrt(),
        })
    }

    /// Standard values: λ_GRW = 2.2·10⁻¹⁷ s⁻¹, α = 10¹⁰ cm⁻².
    pub fn standard() -> Self {
        Self::from_grw(2.2e-17, per_cm2_to_per_m2(1e10)).expect("standard GRW values are valid")
    }

    pub fn lambda_qmupl(&self) -> f64 {
        self.alpha * self.lambda_grw / 2.0
    }
}

/// (α/4π)^{3/2}
fn csl_volume_factor(alpha: f64) -> f64 {
    (alpha / (4.0 * PI)).powf(1.5)
}

/// QMUPL strength λ = α·λ_GRW/2 matching GRW at distances well below r_C.
pub fn lambda_from_grw(grw: &GrwParams) -> Result<f64, ParamError> {
    let alpha = positive("alpha", grw.alpha)?;
    let lambda_grw = non_negative("lambda_grw", grw.lambda_grw)?;
    Ok(alpha * lambda_grw / 2.0)
}

/// Same identification expressed through the CSL strength:
/// λ = α^{5/2}·γ/(16π^{3/2}).
pub fn lambda_from_csl(gamma_csl: f64, alpha: f64) -> Result<f64, ParamError> {
    let alpha = positive("alpha", alpha)?;
    let gamma_csl = non_negative("gamma_csl", gamma_csl)?;
    Ok(alpha.powf(2.5) * gamma_csl / (16.0 * PI.powf(1.5)))
}

/// Mass-proportional collapse strength λ = (m/m_N)²·λ₀.
pub fn mass_scaled_lambda(lambda0: f64, mass: f64) -> f64 {
    (mass / NUCLEON_MASS).powi(2) * lambda0
}

/// Photon energy with an explicit unit tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PhotonEnergy {
    Joule(f64),
    KeV(f64),
}

impl PhotonEnergy {
    pub fn joules(self) -> f64 {
        match self {
            PhotonEnergy::Joule(e) => e,
            PhotonEnergy::KeV(e) => e * JOULE_PER_KEV,
        }
    }
}

/// k = E/(ħc), in m⁻¹.
pub fn photon_energy_to_wavenumber(
    energy: PhotonEnergy,
    constants: &PhysicalConstants,
) -> Result<f64, ParamError> {
    let e = non_negative("photon energy", energy.joules())?;
    Ok(e / constants.hbar_c())
}

/// Inverse of [`photon_energy_to_wavenumber`], in keV.
pub fn wavenumber_to_kev(k: f64, constants: &PhysicalConstants) -> f64 {
    k * constants.hbar_c() / JOULE_PER_KEV
}

pub fn per_cm2_to_per_m2(x: f64) -> f64 {
    x * 1e4
}

pub fn cm3_to_m3(x: f64) -> f64 {
    x * 1e-6
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn electron_beta_matches_reference_value() {
        let k = PhysicalConstants::CODATA_2018;
        let beta = beta_coefficient(k.elementary_charge, &k);
        assert!(rel(beta, 5.71e-54) < 5e-3, "beta = {beta:e}");
    }

    #[test]
    fn beta_scaling_in_charge() {
        let k = PhysicalConstants::CODATA_2018;
        assert_eq!(beta_coefficient(0.0, &k), 0.0);
        let e = k.elementary_charge;
        assert!(rel(beta_coefficient(2.0 * e, &k), 4.0 * beta_coefficient(e, &k)) < 1e-15);
    }

    #[test]
    fn validity_bound_for_electron() {
        let p = ModelParams::electron(0.0).unwrap();
        assert!(rel(p.validity_bound(), 6.14e22) < 1e-2);
        assert!(p.in_validity_region());
        assert!(!p.with_omega0(7e22).unwrap().in_validity_region());
    }

    #[test]
    fn lambda_from_standard_grw() {
        let grw = GrwParams::from_grw(2.2e-17, per_cm2_to_per_m2(1e10)).unwrap();
        assert!(rel(lambda_from_grw(&grw).unwrap(), 1.1e-3) < 1e-12);
        let zero = GrwParams::from_grw(0.0, 1e14).unwrap();
        assert_eq!(lambda_from_grw(&zero).unwrap(), 0.0);
    }

    #[test]
    fn lambda_rejects_nonpositive_alpha() {
        let bad = GrwParams { lambda_grw: 1.0, alpha: 0.0, gamma_csl: 0.0, r_c: 0.0 };
        assert!(matches!(lambda_from_grw(&bad), Err(ParamError::NonPositive { .. })));
        assert!(GrwParams::from_grw(1.0, -1.0).is_err());
    }

    #[test]
    fn csl_branch_agrees_with_grw_branch() {
        let alpha = per_cm2_to_per_m2(1e10);
        let gamma = cm3_to_m3(1e-30);
        let via_gamma = lambda_from_csl(gamma, alpha).unwrap();
        let grw = GrwParams::from_csl(gamma, alpha).unwrap();
        let via_grw = lambda_from_grw(&grw).unwrap();
        assert!(rel(via_gamma, via_grw) < 1e-2);
        // the footnote γ reproduces the quoted λ_GRW ≈ 2.2e-17 s⁻¹
        assert!(rel(grw.lambda_grw, 2.2e-17) < 0.03);
    }

    #[test]
    fn photon_energy_conversion() {
        let k = PhysicalConstants::CODATA_2018;
        assert_eq!(photon_energy_to_wavenumber(PhotonEnergy::KeV(0.0), &k).unwrap(), 0.0);
        let k11 = photon_energy_to_wavenumber(PhotonEnergy::KeV(11.0), &k).unwrap();
        assert!(rel(k11, 11.0 * 1.602_176_634e-16 / (k.hbar * k.c)) < 1e-14);
        assert!(rel(k11, 5.575e10) < 1e-3);
        let compton = k.electron_mass * k.c / k.hbar;
        let k511 = photon_energy_to_wavenumber(PhotonEnergy::KeV(511.0), &k).unwrap();
        assert!(rel(k511, compton) < 2e-3);
        assert!(photon_energy_to_wavenumber(PhotonEnergy::Joule(-1.0), &k).is_err());
        assert!(rel(wavenumber_to_kev(k11, &k), 11.0) < 1e-14);
    }

    #[test]
    fn constructor_validation() {
        let k = PhysicalConstants::CODATA_2018;
        assert!(ModelParams::new(k, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(k, 1.0, 1.0, -1.0, 0.0).is_err());
        assert!(ModelParams::new(k, 1.0, 1.0, 0.0, -1.0).is_err());
        assert!(ModelParams::new(k, 1.0, f64::NAN, 0.0, 0.0).is_err());
        assert!(PhysicalConstants::new(1.0, 1.0, 0.0, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn beta_is_quadratic_in_charge(q in 1e-21f64..1e-17, s in 0.1f64..10.0) {
            let k = PhysicalConstants::CODATA_2018;
            prop_assert!(rel(beta_coefficient(s * q, &k), s * s * beta_coefficient(q, &k)) < 1e-13);
        }

        #[test]
        fn csl_grw_round_trip(log_gamma in -40f64..-30.0, log_alpha in 10f64..18.0) {
            let gamma = 10f64.powf(log_gamma);
            let alpha = 10f64.powf(log_alpha);
            let a = GrwParams::from_csl(gamma, alpha).unwrap();
            let b = GrwParams::from_grw(a.lambda_grw, a.alpha).unwrap();
            prop_assert!(rel(b.gamma_csl, gamma) < 1e-12);
            prop_assert!(rel(a.r_c, 1.0 / alpha.sqrt()) < 1e-15);
        }

        #[test]
        fn kappa_over_mass_is_omega_squared(log_m in -31f64..-20.0, log_w in 0f64..22.0) {
            let p = ModelParams::new(
                PhysicalConstants::CODATA_2018, 10f64.powf(log_m), 1.6e-19, 10f64.powf(log_w), 0.0,
            ).unwrap();
            prop_assert!(rel(p.kappa() / p.mass(), p.omega0() * p.omega0()) < 4.0 * f64::EPSILON);
        }
    }
}
