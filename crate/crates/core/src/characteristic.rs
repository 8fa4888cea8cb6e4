//! The characteristic function H(z) = κ + z²(m − βz) and its three zeros.
//!
//! For β > 0 and κ ≥ 0 there is always one positive real root (the runaway
//! rate, ≈ m/β) and a conjugate pair with non-positive real part. The pair
//! sits near ±iω₀ and is many orders of magnitude smaller than the runaway
//! root, so every residual check here is taken relative to the size of the
//! individual terms of H rather than in absolute terms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model_params::ModelParams;

/// |H′(z)| below this fraction of its term scale marks a repeated root.
const SIMPLE_ROOT_THRESHOLD: f64 = 1e-10;
const MAX_POLISH_ITERATIONS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("β = 0: the characteristic polynomial degenerates to degree two")]
    DegenerateCubic,
    #[error("ω₀ = {omega0:e} s⁻¹ is outside the small-ω₀ regime (bound {bound:e} s⁻¹)")]
    OutsideValidity { omega0: f64, bound: f64 },
    #[error("z = {root} is not a simple root of H")]
    NonSimpleRoot { root: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootMethod {
    CardanExact,
    SmallOmega0Approx,
    Oracle,
}

/// Zeros of H. `z1` is the real runaway root, `z2` has Im ≥ 0 and
/// `z3 = conj(z2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicRoots {
    pub z1: Complex64,
    pub z2: Complex64,
    pub z3: Complex64,
    pub method: RootMethod,
}

impl CubicRoots {
    pub fn as_array(&self) -> [Complex64; 3] {
        [self.z1, self.z2, self.z3]
    }

    /// Decay rate |Re z₂| of the bound-state transients.
    pub fn decay_rate(&self) -> f64 {
        -self.z2.re
    }
}

/// Cardan auxiliaries for z³ + a₂z² + a₁z + a₀ with a₀ = −κ/β, a₁ = 0,
/// a₂ = −m/β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CardanIntermediates {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub q: f64,
    pub r: f64,
    /// q³ + r²
    pub discriminant: f64,
    pub s1: Complex64,
    pub s2: Complex64,
}

/// H(z) in Horner form.
pub fn h_of_z(params: &ModelParams, z: Complex64) -> Complex64 {
    params.kappa() + z * z * (params.mass() - params.beta() * z)
}

/// H′(z) = 2mz − 3βz².
pub fn h_prime(params: &ModelParams, z: Complex64) -> Complex64 {
    z * (2.0 * params.mass() - 3.0 * params.beta() * z)
}

/// |κ| + |m z²| + |β z³|, the natural size against which H(z) is compared.
pub fn residual_scale(params: &ModelParams, z: Complex64) -> f64 {
    let z2 = z.norm_sqr();
    params.kappa().abs() + params.mass() * z2 + params.beta() * z2 * z.norm()
}

/// |H(z)| / residual_scale(z)
pub fn relative_residual(params: &ModelParams, z: Complex64) -> f64 {
    let scale = residual_scale(params, z);
    let h = h_of_z(params, z).norm();
    if scale == 0.0 {
        h
    } else {
        h / scale
    }
}

pub fn cardan_intermediates(params: &ModelParams) -> Result<CardanIntermediates, RootError> {
    let beta = params.beta();
    if beta == 0.0 {
        return Err(RootError::DegenerateCubic);
    }
    let (m, kappa) = (params.mass(), params.kappa());
    let a0 = -kappa / beta;
    let a1 = 0.0;
    let a2 = -m / beta;
    let q = a1 / 3.0 - a2 * a2 / 9.0;
    let r = (a1 * a2 - 3.0 * a0) / 6.0 - a2 * a2 * a2 / 27.0;
    // With a₁ = 0 the discriminant collapses to κ²/4β² + κm³/27β⁴, a sum of
    // non-negative terms; forming q³ + r² directly would cancel ~(m/β)⁶.
    let discriminant = kappa * kappa / (4.0 * beta * beta) + kappa * m.powi(3) / (27.0 * beta.powi(4));
    let (s1, s2) = if discriminant >= 0.0 {
        let s1 = (r + discriminant.sqrt()).cbrt();
        // s₁s₂ = −q keeps s₂ accurate where r − √D would cancel
        let s2 = if s1 != 0.0 { -q / s1 } else { (r - discriminant.sqrt()).cbrt() };
        (Complex64::new(s1, 0.0), Complex64::new(s2, 0.0))
    } else {
        // three real roots; unreachable for κ ≥ 0 but kept for completeness
        let s1 = (Complex64::new(r, 0.0) + Complex64::new(discriminant, 0.0).sqrt()).powf(1.0 / 3.0);
        let s2 = -q / s1;
        (s1, s2)
    };
    Ok(CardanIntermediates { a0, a1, a2, q, r, discriminant, s1, s2 })
}

/// Roots of H by Cardan's formulas, followed by Newton polishing of the
/// conjugate pair in the scaled variable z = ω₀(i + u), where the dominant
/// cancellation z² + ω₀² = ω₀²u(2i + u) is carried exactly. The runaway
/// root then follows from z₁ + z₂ + z₃ = m/β.
pub fn cardan_roots(params: &ModelParams) -> Result<CubicRoots, RootError> {
    let c = cardan_intermediates(params)?;
    let m_over_beta = params.runaway_rate();
    if params.is_free() {
        return Ok(CubicRoots {
            z1: Complex64::new(m_over_beta, 0.0),
            z2: Complex64::new(0.0, 0.0),
            z3: Complex64::new(0.0, 0.0),
            method: RootMethod::CardanExact,
        });
    }

    let sum = c.s1 + c.s2;
    let diff = c.s1 - c.s2;
    let shift = -c.a2 / 3.0;
    let half_sqrt3 = 3f64.sqrt() / 2.0;
    let i = Complex64::i();
    let mut pair = -0.5 * sum + shift + i * half_sqrt3 * diff;
    if pair.im < 0.0 {
        pair = pair.conj();
    }

    let omega0 = params.omega0();
    let eps = params.beta() * omega0 / params.mass();
    let mut u = pair / omega0 - i;
    for _ in 0..MAX_POLISH_ITERATIONS {
        let w = i + u;
        let f = u * (2.0 * i + u) - eps * w * w * w;
        let df = 2.0 * (i + u) - 3.0 * eps * w * w;
        let step = f / df;
        u -= step;
        if step.norm() <= 4.0 * f64::EPSILON * u.norm() {
            break;
        }
    }
    let mut z2 = omega0 * (i + u);
    if z2.im < 0.0 {
        z2 = z2.conj();
    }
    let z1 = Complex64::new(m_over_beta - 2.0 * z2.re, 0.0);
    Ok(CubicRoots { z1, z2, z3: z2.conj(), method: RootMethod::CardanExact })
}

/// Leading-order roots for ω₀ ≪ 2m/(√27β):
/// z₁ ≈ m/β, z₂,₃ ≈ −ω₀²β/2m ± iω₀.
pub fn approx_roots(params: &ModelParams) -> Result<CubicRoots, RootError> {
    if params.beta() == 0.0 {
        return Err(RootError::DegenerateCubic);
    }
    if !params.in_validity_region() {
        return Err(RootError::OutsideValidity {
            omega0: params.omega0(),
            bound: params.validity_bound(),
        });
    }
    let w = params.omega0();
    let z2 = Complex64::new(-w * w * params.beta() / (2.0 * params.mass()), w);
    Ok(CubicRoots {
        z1: Complex64::new(params.runaway_rate(), 0.0),
        z2,
        z3: z2.conj(),
        method: RootMethod::SmallOmega0Approx,
    })
}

/// The bracket [(z − z_ℓ)/H(z)] at z = z_ℓ, i.e. 1/H′(z_ℓ) for a simple root.
pub fn residue_weight(params: &ModelParams, root: Complex64) -> Result<Complex64, RootError> {
    let d = h_prime(params, root);
    let scale = root.norm() * (2.0 * params.mass() + 3.0 * params.beta() * root.norm());
    if d == Complex64::new(0.0, 0.0) || d.norm() <= SIMPLE_ROOT_THRESHOLD * scale {
        return Err(RootError::NonSimpleRoot { root });
    }
    Ok(1.0 / d)
}
