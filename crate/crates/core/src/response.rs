//! Response kernels F_n(t), G^±_n(k,t) and G^±_±(k,k′,t).
//!
//! Each kernel is the inverse Laplace transform of a rational function whose
//! denominator contains H(z):
//!
//! ```text
//! F_n      ↔ 1 / (zⁿ H(z))                      n = 0, 1, 2
//! G^±_n    ↔ zⁿ / ((z ± iω_k) H(z))             n = 0, 1
//! G^{s,s′} ↔ z² / ((z + s·iω_k)(z + s′·iω_k′) H(z))
//! ```
//!
//! They are evaluated as residue sums over the zeros of H, the origin and the
//! field poles z = ∓iω_k. A [`PolePolicy`] decides whether the runaway zero
//! and the field pole contribute. For a free particle H = z²(m − βz) has a
//! double zero at the origin; that case builds its own pole set rather than
//! taking ω₀ → 0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::characteristic::{cardan_roots, h_of_z, CubicRoots, RootError};
use crate::model_params::ModelParams;
use crate::residue::{Pole, PoleKind, RationalKernel};

/// Field poles closer than this (relative) are merged into a double pole.
const CONFLUENT_FIELD_POLES: f64 = 1e-8;
/// A field pole this close (relative) to a zero of H cannot be resolved.
const RESONANCE_DEGENERACY: f64 = 1e-14;
/// Imaginary residue tolerated in F_n relative to the size of its terms.
const REALITY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResponseError {
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error("kernel index n = {0} is not supported")]
    InvalidIndex(u32),
    #[error("time must be non-negative and finite, got {0}")]
    InvalidTime(f64),
    #[error("wavenumber must be positive and finite, got {0}")]
    InvalidWavenumber(f64),
    #[error("field pole {field} coincides with a zero of H")]
    ResonanceDegeneracy { field: Complex64 },
    #[error("F_n has a non-negligible imaginary part {im:e} (real part {re:e})")]
    NonReal { re: f64, im: f64 },
    #[error("this closed form requires a free particle (κ = 0)")]
    RequiresFreeParticle,
}

/// Which poles contribute to a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolePolicy {
    pub include_runaway: bool,
    pub include_field_pole: bool,
}

impl PolePolicy {
    /// Every pole; the mathematically complete inverse transform.
    pub const FULL: Self = Self { include_runaway: true, include_field_pole: true };

    fn keeps(&self, pole: &Pole) -> bool {
        match pole.kind {
            PoleKind::Runaway => self.include_runaway,
            PoleKind::Field => self.include_field_pole,
            PoleKind::Mechanical | PoleKind::Origin => true,
        }
    }
}

impl Default for PolePolicy {
    /// Runaway zero dropped, field pole kept.
    fn default() -> Self {
        Self { include_runaway: false, include_field_pole: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    F0,
    F1,
    F2,
    GPlus0,
    GPlus1,
    GMinus0,
    GMinus1,
    Gpm(Sign, Sign),
}

/// A kernel value together with the arguments that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseEval {
    pub kind: KernelKind,
    pub t: f64,
    pub k: Option<f64>,
    pub k_prime: Option<f64>,
    pub value: Complex64,
    pub policy: PolePolicy,
}

impl ResponseEval {
    pub fn evaluate(
        params: &ModelParams,
        kind: KernelKind,
        k: Option<f64>,
        k_prime: Option<f64>,
        t: f64,
        policy: PolePolicy,
    ) -> Result<Self, ResponseError> {
        let need_k = |x: Option<f64>| x.ok_or(ResponseError::InvalidWavenumber(f64::NAN));
        let value = match kind {
            KernelKind::F0 => Complex64::new(f_n(params, 0, t, policy)?, 0.0),
            KernelKind::F1 => Complex64::new(f_n(params, 1, t, policy)?, 0.0),
            KernelKind::F2 => Complex64::new(f_n(params, 2, t, policy)?, 0.0),
            KernelKind::GPlus0 => g_pm_n(params, Sign::Plus, 0, need_k(k)?, t, policy)?,
            KernelKind::GPlus1 => g_pm_n(params, Sign::Plus, 1, need_k(k)?, t, policy)?,
            KernelKind::GMinus0 => g_pm_n(params, Sign::Minus, 0, need_k(k)?, t, policy)?,
            KernelKind::GMinus1 => g_pm_n(params, Sign::Minus, 1, need_k(k)?, t, policy)?,
            KernelKind::Gpm(s1, s2) => {
                g_pm_pm(params, (s1, s2), need_k(k)?, need_k(k_prime)?, t, policy)?
            }
        };
        Ok(Self { kind, t, k, k_prime, value, policy })
    }
}

fn check_time(t: f64) -> Result<(), ResponseError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(ResponseError::InvalidTime(t))
    }
}

fn check_k(k: f64) -> Result<(), ResponseError> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(ResponseError::InvalidWavenumber(k))
    }
}

/// Poles of 1/H(z) with multiplicities: three simple zeros when κ > 0,
/// the runaway zero plus a double origin when κ = 0.
fn h_poles(params: &ModelParams, roots: &CubicRoots) -> (Vec<Pole>, u32) {
    let runaway = Pole::simple(roots.z1, PoleKind::Runaway);
    if params.is_free() {
        (vec![runaway], 2)
    } else {
        (
            vec![
                runaway,
                Pole::simple(roots.z2, PoleKind::Mechanical),
                Pole::simple(roots.z3, PoleKind::Mechanical),
            ],
            0,
        )
    }
}

/// Builds `z^num / (z^den · Π(z − field) · H(z))`, cancelling powers of z
/// against the origin.
fn build_kernel(
    params: &ModelParams,
    num: u32,
    den: u32,
    field: &[Complex64],
) -> Result<RationalKernel, ResponseError> {
    let roots = cardan_roots(params)?;
    let (mut poles, h_origin) = h_poles(params, &roots);
    for &f in field {
        for p in &poles {
            if (f - p.at).norm() <= RESONANCE_DEGENERACY * f.norm().max(p.at.norm()) {
                return Err(ResponseError::ResonanceDegeneracy { field: f });
            }
        }
    }
    let origin = h_origin as i64 + den as i64 - num as i64;
    let numerator_power = if origin < 0 { (-origin) as u32 } else { 0 };
    if origin > 0 {
        poles.push(Pole { at: Complex64::new(0.0, 0.0), order: origin as u32, kind: PoleKind::Origin });
    }
    match field {
        [a, b] if (a - b).norm() <= CONFLUENT_FIELD_POLES * a.norm().max(b.norm()) => {
            poles.push(Pole { at: (a + b) / 2.0, order: 2, kind: PoleKind::Field });
        }
        _ => poles.extend(field.iter().map(|&f| Pole::simple(f, PoleKind::Field))),
    }
    Ok(RationalKernel {
        gain: Complex64::new(-1.0 / params.beta(), 0.0),
        numerator_power,
        poles,
    })
}

/// Pole of 1/(z + s·iω) sits at z = −s·iω.
fn field_pole(params: &ModelParams, sign: Sign, k: f64) -> Complex64 {
    Complex64::new(0.0, -sign.value() * params.omega_k(k))
}

/// Kernel behind F_n.
pub fn f_kernel(params: &ModelParams, n: u32) -> Result<RationalKernel, ResponseError> {
    if n > 2 {
        return Err(ResponseError::InvalidIndex(n));
    }
    build_kernel(params, 0, n, &[])
}

/// Kernel behind G^±_n.
pub fn g_kernel(
    params: &ModelParams,
    sign: Sign,
    n: u32,
    k: f64,
) -> Result<RationalKernel, ResponseError> {
    if n > 1 {
        return Err(ResponseError::InvalidIndex(n));
    }
    check_k(k)?;
    build_kernel(params, n, 0, &[field_pole(params, sign, k)])
}

/// Kernel behind G^{s,s′}(k,k′).
pub fn gpm_kernel(
    params: &ModelParams,
    signs: (Sign, Sign),
    k: f64,
    k_prime: f64,
) -> Result<RationalKernel, ResponseError> {
    check_k(k)?;
    check_k(k_prime)?;
    build_kernel(
        params,
        2,
        0,
        &[field_pole(params, signs.0, k), field_pole(params, signs.1, k_prime)],
    )
}

/// F_n(t), n ∈ {0, 1, 2}. Works for bound and free particles; for κ > 0 the
/// origin contributes 0, 1/κ and t/κ respectively.
pub fn f_n(params: &ModelParams, n: u32, t: f64, policy: PolePolicy) -> Result<f64, ResponseError> {
    check_time(t)?;
    let kernel = f_kernel(params, n)?;
    let terms: Vec<_> = kernel
        .terms(t)
        .into_iter()
        .filter(|term| policy.keeps(&term.pole))
        .collect();
    let value: Complex64 = terms.iter().map(|term| term.value).sum();
    let scale: f64 = terms.iter().map(|term| term.value.norm()).sum();
    if value.im.abs() > REALITY_TOLERANCE * scale {
        return Err(ResponseError::NonReal { re: value.re, im: value.im });
    }
    Ok(value.re)
}

/// G^±_n(k, t), n ∈ {0, 1}.
pub fn g_pm_n(
    params: &ModelParams,
    sign: Sign,
    n: u32,
    k: f64,
    t: f64,
    policy: PolePolicy,
) -> Result<Complex64, ResponseError> {
    check_time(t)?;
    let kernel = g_kernel(params, sign, n, k)?;
    Ok(kernel.inverse_laplace_filtered(t, |p| policy.keeps(p)))
}

/// G^{s,s′}(k, k′, t). Coincident field poles (same sign, k = k′) are
/// treated as one double pole.
pub fn g_pm_pm(
    params: &ModelParams,
    signs: (Sign, Sign),
    k: f64,
    k_prime: f64,
    t: f64,
    policy: PolePolicy,
) -> Result<Complex64, ResponseError> {
    check_time(t)?;
    let kernel = gpm_kernel(params, signs, k, k_prime)?;
    Ok(kernel.inverse_laplace_filtered(t, |p| policy.keeps(p)))
}

/// Free-particle position kernel F̄₀(t) = t/m + β/m² − (β/m²)·e^{mt/β},
/// the last term present only when the runaway pole is included.
pub fn f_n_free(params: &ModelParams, t: f64, policy: PolePolicy) -> Result<f64, ResponseError> {
    if !params.is_free() {
        return Err(ResponseError::RequiresFreeParticle);
    }
    check_time(t)?;
    let (m, beta) = (params.mass(), params.beta());
    let mut v = t / m + beta / (m * m);
    if policy.include_runaway {
        v -= beta / (m * m) * (m * t / beta).exp();
    }
    Ok(v)
}

/// Free-particle Ḡ^±₁(k,t):
///
/// ```text
/// ∓i/(mω)  +  ±i·e^{∓iωt} / (ω(m ± iβω))  −  e^{mt/β} / (m(m/β ± iω))
///  origin        field pole                   runaway
/// ```
pub fn g_pm_1_free(
    params: &ModelParams,
    sign: Sign,
    k: f64,
    t: f64,
    policy: PolePolicy,
) -> Result<Complex64, ResponseError> {
    if !params.is_free() {
        return Err(ResponseError::RequiresFreeParticle);
    }
    check_time(t)?;
    check_k(k)?;
    let (m, beta) = (params.mass(), params.beta());
    let w = params.omega_k(k);
    let s = sign.value();
    let i = Complex64::i();
    let mut v = -s * i / (m * w);
    if policy.include_field_pole {
        let phase = Complex64::new(0.0, -s * w * t).exp();
        v += s * i * phase / (w * (m + s * i * beta * w));
    }
    if policy.include_runaway {
        let rate = m / beta;
        v -= (rate * t).exp() / (m * (rate + s * i * w));
    }
    Ok(v)
}

/// Field-pole part of G^±₁: (∓iω)·e^{∓iωt}/H(∓iω).
pub fn g1_field_term(params: &ModelParams, sign: Sign, k: f64, t: f64) -> Complex64 {
    let p = field_pole(params, sign, k);
    p * (p * t).exp() / h_of_z(params, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_params::PhysicalConstants;

    /// m = 1, β = 0.05, ω₀ = 1 in natural units.
    fn toy(omega0: f64) -> ModelParams {
        let k = PhysicalConstants::natural();
        let charge = (0.05 * 6.0 * std::f64::consts::PI).sqrt();
        ModelParams::new(k, 1.0, charge, omega0, 1.0).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * a.norm().max(b.norm()).max(1e-300)
    }

    #[test]
    fn f0_vanishes_at_t0_with_all_poles() {
        let p = toy(1.0);
        assert!(f_n(&p, 0, 0.0, PolePolicy::FULL).unwrap().abs() < 1e-14);
    }

    #[test]
    fn f1_and_f2_final_values() {
        let p = toy(1.0);
        let decay = -cardan_roots(&p).unwrap().z2.re;
        let t = 60.0 / decay;
        let f1 = f_n(&p, 1, t, PolePolicy::default()).unwrap();
        assert!((f1 * p.kappa() - 1.0).abs() < 1e-9, "{f1}");
        let h = 1e-3;
        let slope = (f_n(&p, 2, t + h, PolePolicy::default()).unwrap()
            - f_n(&p, 2, t - h, PolePolicy::default()).unwrap())
            / (2.0 * h);
        assert!((slope * p.kappa() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn invalid_arguments() {
        let p = toy(1.0);
        assert_eq!(f_n(&p, 3, 1.0, PolePolicy::FULL), Err(ResponseError::InvalidIndex(3)));
        assert!(matches!(f_n(&p, 0, -1.0, PolePolicy::FULL), Err(ResponseError::InvalidTime(_))));
        assert!(matches!(
            g_pm_n(&p, Sign::Plus, 1, 0.0, 1.0, PolePolicy::FULL),
            Err(ResponseError::InvalidWavenumber(_))
        ));
        assert!(matches!(
            f_n_free(&p, 1.0, PolePolicy::FULL),
            Err(ResponseError::RequiresFreeParticle)
        ));
    }

    #[test]
    fn g_conjugation() {
        let p = toy(1.3);
        for policy in [PolePolicy::FULL, PolePolicy::default()] {
            for n in 0..2 {
                for &(k, t) in &[(0.4, 0.7), (2.5, 3.0)] {
                    let gp = g_pm_n(&p, Sign::Plus, n, k, t, policy).unwrap();
                    let gm = g_pm_n(&p, Sign::Minus, n, k, t, policy).unwrap();
                    assert!(close(gm, gp.conj(), 1e-13));
                }
            }
        }
    }

    #[test]
    fn g1_identity_with_all_poles() {
        let p = toy(0.8);
        for &(k, t) in &[(0.3, 0.2), (1.0, 1.0), (4.0, 2.5)] {
            let f0 = f_n(&p, 0, t, PolePolicy::FULL).unwrap();
            let w = p.omega_k(k);
            for sign in [Sign::Plus, Sign::Minus] {
                let g1 = g_pm_n(&p, sign, 1, k, t, PolePolicy::FULL).unwrap();
                let g0 = g_pm_n(&p, sign, 0, k, t, PolePolicy::FULL).unwrap();
                let rhs = f0 - sign.value() * Complex64::i() * w * g0;
                assert!(close(g1, rhs, 1e-9), "{g1} vs {rhs}");
            }
        }
    }

    #[test]
    fn free_closed_forms_match_residue_engine() {
        let p = toy(0.0);
        for policy in [PolePolicy::FULL, PolePolicy::default()] {
            for t in [0.0, 0.1, 0.9, 2.0] {
                let closed = f_n_free(&p, t, policy).unwrap();
                let engine = f_n(&p, 0, t, policy).unwrap();
                assert!((closed - engine).abs() <= 1e-12 * closed.abs().max(1.0));
                for k in [0.2, 3.0] {
                    for sign in [Sign::Plus, Sign::Minus] {
                        let a = g_pm_1_free(&p, sign, k, t, policy).unwrap();
                        let b = g_pm_n(&p, sign, 1, k, t, policy).unwrap();
                        // G₁ vanishes at t = 0; compare against the mode amplitude 1/(mω)
                        let scale = 1.0 / (p.mass() * p.omega_k(k));
                        assert!((a - b).norm() <= 1e-12 * a.norm().max(scale), "{a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn free_velocity_kernel_tends_to_inverse_mass() {
        let p = toy(0.0);
        let h = 1e-3;
        let t = 50.0;
        let d = (f_n_free(&p, t + h, PolePolicy::default()).unwrap()
            - f_n_free(&p, t - h, PolePolicy::default()).unwrap())
            / (2.0 * h);
        assert!((d * p.mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn free_field_term_drives_velocity_mode() {
        // d/dt of the field part of Ḡ^+₁ is e^{−iωt}/(m + iβω)
        let p = toy(0.0);
        let (k, t, h) = (1.7, 0.9, 1e-4);
        let only_field = PolePolicy { include_runaway: false, include_field_pole: true };
        let no_field = PolePolicy { include_runaway: false, include_field_pole: false };
        let field = |t| {
            g_pm_1_free(&p, Sign::Plus, k, t, only_field).unwrap()
                - g_pm_1_free(&p, Sign::Plus, k, t, no_field).unwrap()
        };
        let d = (field(t + h) - field(t - h)) / (2.0 * h);
        let w = p.omega_k(k);
        let expected = Complex64::new(0.0, -w * t).exp() / (p.mass() + Complex64::i() * p.beta() * w);
        assert!(close(d, expected, 1e-7), "{d} vs {expected}");
        let coeff = field(0.0);
        let printed = Complex64::i() / (w * (p.mass() + Complex64::i() * p.beta() * w));
        assert!(close(coeff, printed, 1e-14));
    }

    #[test]
    fn gpm_opposite_signs_equal_k_is_finite() {
        let p = toy(1.0);
        let v = g_pm_pm(&p, (Sign::Plus, Sign::Minus), 1.0, 1.0, 1.5, PolePolicy::FULL).unwrap();
        assert!(v.re.is_finite() && v.im.is_finite());
        let kernel = gpm_kernel(&p, (Sign::Plus, Sign::Minus), 1.0, 1.0).unwrap();
        assert!(kernel.poles.iter().all(|p| p.order == 1));
    }

    #[test]
    fn gpm_confluent_limit() {
        let p = toy(1.0);
        let (k, t, d) = (1.4, 1.1, 1e-6);
        for signs in [(Sign::Plus, Sign::Plus), (Sign::Minus, Sign::Minus)] {
            let at = g_pm_pm(&p, signs, k, k, t, PolePolicy::FULL).unwrap();
            let hi = g_pm_pm(&p, signs, k, k * (1.0 + d), t, PolePolicy::FULL).unwrap();
            let lo = g_pm_pm(&p, signs, k, k * (1.0 - d), t, PolePolicy::FULL).unwrap();
            let extrapolated = (hi + lo) / 2.0;
            assert!(close(at, extrapolated, 1e-7), "{at} vs {extrapolated}");
        }
    }

    #[test]
    fn free_gpm_has_no_origin_pole() {
        let p = toy(0.0);
        let kernel = gpm_kernel(&p, (Sign::Plus, Sign::Minus), 1.0, 2.0).unwrap();
        assert!(kernel.poles.iter().all(|p| p.kind != PoleKind::Origin));
        assert_eq!(kernel.numerator_power, 0);
    }

    #[test]
    fn eval_agrees_with_definition() {
        let p = toy(1.2);
        let z = Complex64::new(0.3, 0.7);
        let k = 0.9;
        let w = p.omega_k(k);
        let kernel = g_kernel(&p, Sign::Plus, 1, k).unwrap();
        let direct = z / ((z + Complex64::i() * w) * h_of_z(&p, z));
        assert!(close(kernel.eval(z), direct, 1e-13));
    }
}
