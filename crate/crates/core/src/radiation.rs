//! Collapse-induced photon emission and energy growth.
//!
//! The noise-averaged photon density per mode is
//!
//! ```text
//! S_col(k, t) = λħe² / (16π³ε₀ω_k) · ∫₀ᵗ G⁻₁(k,s) G⁺₁(k,s) ds
//! ```
//!
//! with the runaway pole dropped. Summing over both polarisations and all
//! directions of k turns dS_col/dt into the rate per unit wavenumber,
//! dΓ/dk = 8πk²·dS_col/dt. That factor is the one for which the free
//! particle pipeline reproduces the closed-form free rate exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::characteristic::{cardan_roots, h_of_z, residue_weight, RootError};
use crate::model_params::ModelParams;
use crate::residue::{exprel, PoleKind};
use crate::response::{g_kernel, g_pm_1_free, PolePolicy, ResponseError, Sign};

/// Minimum number of grid points in the top decade for a tail fit.
pub const MIN_TAIL_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RadiationError {
    #[error(transparent)]
    Response(#[from] ResponseError),
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error("wavenumber must be positive and finite, got {0}")]
    InvalidWavenumber(f64),
    #[error("time must be non-negative and finite, got {0}")]
    InvalidTime(f64),
    #[error("this formula requires a free particle (κ = 0)")]
    RequiresFreeParticle,
    #[error("this formula requires a bound particle (κ > 0)")]
    RequiresBoundParticle,
    #[error("the finite-time regime needs a time argument")]
    MissingTime,
    #[error("wavenumber grid must be non-empty, positive and strictly increasing")]
    NonMonotoneGrid,
    #[error("only {found} grid points in the top decade, need at least {MIN_TAIL_POINTS}")]
    GridTooShort { found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Free particle, all orders in β.
    FreeExact,
    /// Free particle with β set to zero (first-order CSL shape, times two).
    FreeBeta0,
    /// Bound particle after the transients have decayed.
    HoLargeTime,
    /// Bound (or free) particle at a finite time t.
    HoFiniteTime,
    /// Large-time bound spectrum with β set to zero.
    HoBeta0,
}

impl Regime {
    pub fn is_bound(self) -> bool {
        matches!(self, Regime::HoLargeTime | Regime::HoFiniteTime | Regime::HoBeta0)
    }
}

/// Treatment of terms oscillating at the photon frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Oscillations {
    /// Cross terms between the field pole and the mechanical poles are
    /// dropped; they average to zero over many photon periods.
    #[default]
    Averaged,
    Retained,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    /// Wavenumber (m⁻¹)
    pub k: f64,
    /// dΓ/dk (s⁻¹ per m⁻¹)
    pub rate: f64,
    pub regime: Regime,
    pub t: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmissionSummary {
    /// dE_mean/dt (W), free particle only
    pub energy_growth_rate: Option<f64>,
    pub resonance_k: Option<f64>,
    pub resonance_peak: Option<f64>,
    /// Log-log slope of the rate over the top decade of the grid.
    pub tail_exponent: Option<f64>,
    /// Emitted power ∫ħck·dΓ diverges (tail exponent ≥ −2).
    pub ultraviolet_catastrophe: bool,
    /// 1/|Re z₂| for a bound particle.
    pub transient_decay_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSweep {
    pub points: Vec<SpectrumPoint>,
    pub summary: EmissionSummary,
}

fn check_k(k: f64) -> Result<(), RadiationError> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(RadiationError::InvalidWavenumber(k))
    }
}

fn check_t(t: f64) -> Result<(), RadiationError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(RadiationError::InvalidTime(t))
    }
}

/// λħe²/(16π³ε₀ω_k)
pub fn emission_prefactor(params: &ModelParams, k: f64) -> f64 {
    let c = params.constants();
    let e = params.charge();
    params.lambda() * c.hbar * e * e / (16.0 * PI.powi(3) * c.epsilon0 * params.omega_k(k))
}

/// Polarisation sum times the solid-angle integral: 8πk².
pub fn angular_polarization_factor(k: f64) -> f64 {
    8.0 * PI * k * k
}

/// Closed-form pieces of ∫₀ᵗ G⁻₁G⁺₁ ds for a bound particle, runaway
/// dropped: the double sum over the decaying roots, the two cross sums with
/// the field poles, and the secular term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeIntegralTerms {
    pub mechanical: Complex64,
    pub cross_minus: Complex64,
    pub cross_plus: Complex64,
    /// ω_k²/(H(−iω_k)H(iω_k)); the secular term is this times t.
    pub linear_coefficient: f64,
    pub t: f64,
}

impl TimeIntegralTerms {
    pub fn total(&self) -> f64 {
        (self.mechanical + self.cross_minus + self.cross_plus).re + self.linear_coefficient * self.t
    }
}

/// ω_k²/(H(−iω_k)H(iω_k)) = ω_k²/|H(iω_k)|².
pub fn linear_term_coefficient(params: &ModelParams, k: f64) -> f64 {
    let w = params.omega_k(k);
    let h = h_of_z(params, Complex64::new(0.0, w));
    w * w / h.norm_sqr()
}

pub fn bound_time_integral_terms(
    params: &ModelParams,
    k: f64,
    t: f64,
) -> Result<TimeIntegralTerms, RadiationError> {
    if params.is_free() {
        return Err(RadiationError::RequiresBoundParticle);
    }
    check_k(k)?;
    check_t(t)?;
    let roots = cardan_roots(params)?;
    let w = params.omega_k(k);
    let iw = Complex64::new(0.0, w);
    let i = Complex64::i();
    let decaying = [roots.z2, roots.z3];
    let weights = [residue_weight(params, roots.z2)?, residue_weight(params, roots.z3)?];
    let h_minus = h_of_z(params, -iw);
    let h_plus = h_of_z(params, iw);

    let mut mechanical = Complex64::new(0.0, 0.0);
    for (a, wa) in decaying.iter().zip(&weights) {
        for (b, wb) in decaying.iter().zip(&weights) {
            mechanical += a * b * wa * wb / ((a - iw) * (b + iw)) * exprel(a + b, t);
        }
    }
    let mut cross_minus = Complex64::new(0.0, 0.0);
    let mut cross_plus = Complex64::new(0.0, 0.0);
    for (z, wz) in decaying.iter().zip(&weights) {
        cross_minus += -i * w * z * wz / (h_minus * (z - iw)) * exprel(z - iw, t);
        cross_plus += i * w * z * wz / (h_plus * (z + iw)) * exprel(z + iw, t);
    }
    Ok(TimeIntegralTerms {
        mechanical,
        cross_minus,
        cross_plus,
        linear_coefficient: linear_term_coefficient(params, k),
        t,
    })
}

/// ∫₀ᵗ G⁻₁(k,s)G⁺₁(k,s) ds with the runaway pole dropped.
pub fn g1_product_time_integral(params: &ModelParams, k: f64, t: f64) -> Result<f64, RadiationError> {
    check_k(k)?;
    check_t(t)?;
    if params.is_free() {
        // Ḡ⁺₁ = a + b·e^{−iωt}
        let policy = PolePolicy::default();
        let no_field = PolePolicy { include_field_pole: false, ..policy };
        let a = g_pm_1_free(params, Sign::Plus, k, 0.0, no_field)?;
        let b = g_pm_1_free(params, Sign::Plus, k, 0.0, policy)? - a;
        let w = params.omega_k(k);
        let osc = a.conj() * b * exprel(Complex64::new(0.0, -w), t);
        Ok((a.norm_sqr() + b.norm_sqr()) * t + 2.0 * osc.re)
    } else {
        Ok(bound_time_integral_terms(params, k, t)?.total())
    }
}

/// S_col(k, t), the noise-induced photon density per mode at time t.
pub fn s_col_time_integral(params: &ModelParams, k: f64, t: f64) -> Result<f64, RadiationError> {
    Ok(emission_prefactor(params, k) * g1_product_time_integral(params, k, t)?)
}

/// Exponents and amplitudes of G⁺₁(k,t) = Σ cⱼ e^{pⱼt}, runaway dropped.
fn g1_plus_modes(params: &ModelParams, k: f64) -> Result<Vec<(Complex64, Complex64, PoleKind)>, RadiationError> {
    let kernel = g_kernel(params, Sign::Plus, 1, k)?;
    Ok(kernel
        .poles
        .iter()
        .enumerate()
        .filter(|(_, p)| p.kind != PoleKind::Runaway)
        .map(|(i, p)| (p.at, kernel.simple_amplitude(i), p.kind))
        .collect())
}

/// dΓ/dk at time t: 8πk² times the prefactor times |G⁺₁(k,t)|².
pub fn ho_finite_time_rate(
    params: &ModelParams,
    k: f64,
    t: f64,
    oscillations: Oscillations,
) -> Result<SpectrumPoint, RadiationError> {
    check_k(k)?;
    check_t(t)?;
    let modes = g1_plus_modes(params, k)?;
    let mut sq = 0.0;
    for (pi, ci, ki) in &modes {
        for (pj, cj, kj) in &modes {
            let mixed = (*ki == PoleKind::Field) != (*kj == PoleKind::Field);
            if mixed && oscillations == Oscillations::Averaged {
                continue;
            }
            sq += (ci * cj.conj() * ((pi + pj.conj()) * t).exp()).re;
        }
    }
    let rate = emission_prefactor(params, k) * angular_polarization_factor(k) * sq.max(0.0);
    Ok(SpectrumPoint { k, rate, regime: Regime::HoFiniteTime, t: Some(t) })
}

/// βck/m
pub fn reaction_parameter(params: &ModelParams, k: f64) -> f64 {
    params.beta() * params.omega_k(k) / params.mass()
}

/// [2 + (βck/m)²]/[1 + (βck/m)²], between 1 and 2.
pub fn csl_comparison_factor(params: &ModelParams, k: f64) -> f64 {
    let x2 = reaction_parameter(params, k).powi(2);
    if x2.is_infinite() {
        return 1.0;
    }
    (2.0 + x2) / (1.0 + x2)
}

/// λħe²/(2π²ε₀m²c³k)
fn free_rate_scale(params: &ModelParams, k: f64) -> f64 {
    let c = params.constants();
    let e = params.charge();
    params.lambda() * c.hbar * e * e
        / (2.0 * PI * PI * c.epsilon0 * params.mass().powi(2) * c.c.powi(3) * k)
}

/// Free-particle rate λħe²/(2π²ε₀m²c³k)·[2 + (βck/m)²]/[1 + (βck/m)²].
pub fn free_emission_rate(params: &ModelParams, k: f64) -> Result<SpectrumPoint, RadiationError> {
    if !params.is_free() {
        return Err(RadiationError::RequiresFreeParticle);
    }
    check_k(k)?;
    let rate = free_rate_scale(params, k) * csl_comparison_factor(params, k);
    Ok(SpectrumPoint { k, rate, regime: Regime::FreeExact, t: None })
}

pub fn free_emission_rate_beta0(params: &ModelParams, k: f64) -> Result<SpectrumPoint, RadiationError> {
    if !params.is_free() {
        return Err(RadiationError::RequiresFreeParticle);
    }
    check_k(k)?;
    Ok(SpectrumPoint { k, rate: 2.0 * free_rate_scale(params, k), regime: Regime::FreeBeta0, t: None })
}

fn large_time_rate(params: &ModelParams, k: f64, beta: f64) -> f64 {
    let c = params.constants();
    let e = params.charge();
    let (w0, ck) = (params.omega0(), params.omega_k(k));
    let detune = w0 * w0 - ck * ck;
    let denom = params.mass().powi(2) * detune * detune + beta * beta * ck.powi(6);
    params.lambda() * c.hbar * c.c * e * e / (2.0 * PI * PI * c.epsilon0) * k.powi(3) / denom
}

/// Large-time rate λħce²/(2π²ε₀) · k³/(m²(ω₀² − c²k²)² + β²c⁶k⁶).
/// At κ = 0 this is the t → ∞ limit taken before ω₀ → 0.
pub fn ho_emission_rate_large_time(params: &ModelParams, k: f64) -> Result<SpectrumPoint, RadiationError> {
    check_k(k)?;
    let rate = large_time_rate(params, k, params.beta());
    Ok(SpectrumPoint { k, rate, regime: Regime::HoLargeTime, t: None })
}

pub fn ho_emission_rate_beta0(params: &ModelParams, k: f64) -> Result<SpectrumPoint, RadiationError> {
    check_k(k)?;
    let rate = large_time_rate(params, k, 0.0);
    Ok(SpectrumPoint { k, rate, regime: Regime::HoBeta0, t: None })
}

/// Rate in any regime; `t` is required for [`Regime::HoFiniteTime`].
pub fn emission_rate(
    params: &ModelParams,
    k: f64,
    regime: Regime,
    t: Option<f64>,
    oscillations: Oscillations,
) -> Result<SpectrumPoint, RadiationError> {
    match regime {
        Regime::FreeExact => free_emission_rate(params, k),
        Regime::FreeBeta0 => free_emission_rate_beta0(params, k),
        Regime::HoLargeTime => ho_emission_rate_large_time(params, k),
        Regime::HoBeta0 => ho_emission_rate_beta0(params, k),
        Regime::HoFiniteTime => {
            ho_finite_time_rate(params, k, t.ok_or(RadiationError::MissingTime)?, oscillations)
        }
    }
}

/// dE_mean/dt = (3/2)λħ²/m for a free particle (three dimensions).
pub fn mean_energy_growth(params: &ModelParams) -> Result<f64, RadiationError> {
    if !params.is_free() {
        return Err(RadiationError::RequiresFreeParticle);
    }
    Ok(1.5 * params.lambda() * params.hbar().powi(2) / params.mass())
}

/// Same growth written with GRW parameters: (3/4)λ_GRW·α·ħ²/m.
pub fn mean_energy_growth_grw(lambda_grw: f64, alpha: f64, mass: f64, hbar: f64) -> f64 {
    0.75 * lambda_grw * alpha * hbar * hbar / mass
}

/// 1/|Re z₂|, the lifetime of the bound-state transients.
pub fn transient_decay_time(params: &ModelParams) -> Result<f64, RadiationError> {
    if params.is_free() {
        return Err(RadiationError::RequiresBoundParticle);
    }
    Ok(1.0 / cardan_roots(params)?.decay_rate())
}

/// Least-squares slope of ln(rate) against ln(k) over the last decade.
pub fn fit_tail_exponent(points: &[SpectrumPoint]) -> Result<Option<f64>, RadiationError> {
    let k_max = points.last().ok_or(RadiationError::NonMonotoneGrid)?.k;
    let tail: Vec<_> = points.iter().filter(|p| p.k >= k_max / 10.0 * (1.0 - 1e-12)).collect();
    if tail.len() < MIN_TAIL_POINTS {
        return Err(RadiationError::GridTooShort { found: tail.len() });
    }
    if tail.iter().any(|p| !(p.rate > 0.0) || !p.rate.is_finite()) {
        return Ok(None);
    }
    let n = tail.len() as f64;
    let xs: Vec<f64> = tail.iter().map(|p| p.k.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|p| p.rate.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(Some(sxy / sxx))
}

/// Evaluates `regime` on a strictly increasing grid and summarises the
/// resonance and the ultraviolet tail.
pub fn spectrum_sweep(
    params: &ModelParams,
    k_grid: &[f64],
    regime: Regime,
    t: Option<f64>,
    oscillations: Oscillations,
) -> Result<SpectrumSweep, RadiationError> {
    if k_grid.is_empty() || k_grid[0] <= 0.0 || k_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(RadiationError::NonMonotoneGrid);
    }
    let points = k_grid
        .iter()
        .map(|&k| emission_rate(params, k, regime, t, oscillations))
        .collect::<Result<Vec<_>, _>>()?;
    let tail_exponent = fit_tail_exponent(&points)?;

    let (resonance_k, resonance_peak) = if regime.is_bound() {
        let best = points
            .iter()
            .filter(|p| !p.rate.is_nan())
            .max_by(|a, b| a.rate.total_cmp(&b.rate))
            .filter(|p| p.rate > 0.0);
        (best.map(|p| p.k), best.map(|p| p.rate))
    } else {
        (None, None)
    };

    let energy_growth_rate = if params.is_free() { Some(mean_energy_growth(params)?) } else { None };
    let transient_decay_time =
        if params.is_free() || params.beta() == 0.0 { None } else { Some(transient_decay_time(params)?) };

    Ok(SpectrumSweep {
        summary: EmissionSummary {
            energy_growth_rate,
            resonance_k,
            resonance_peak,
            tail_exponent,
            ultraviolet_catastrophe: tail_exponent.is_some_and(|e| e >= -2.0),
            transient_decay_time,
        },
        points,
    })
}

/// Order-of-limits experiment at a fixed photon wavenumber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitsReport {
    pub k: f64,
    pub t: f64,
    /// Free-particle rate.
    pub free_rate: f64,
    /// (ω₀, finite-time rate at t) for decreasing ω₀.
    pub finite_time_sequence: Vec<(f64, f64)>,
    /// Last finite-time rate over the free rate.
    pub finite_time_ratio: f64,
    /// ω₀ = ck/10.
    pub witness_omega0: f64,
    /// Large-time rate at the witness ω₀.
    pub large_time_at_witness: f64,
    /// Large-time rate at the witness ω₀ over the free rate.
    pub large_time_ratio: f64,
    /// Large-time rate with ω₀ → 0 taken afterwards, over the free rate.
    pub large_time_limit_ratio: f64,
}

/// Compares ω₀ → 0 at fixed t against t → ∞ first. `decades` controls how
/// far the finite-time ω₀ sequence descends from ck/10, in steps of one
/// decade.
pub fn limit_noncommutation(
    params: &ModelParams,
    k: f64,
    t: f64,
    decades: u32,
) -> Result<LimitsReport, RadiationError> {
    check_k(k)?;
    check_t(t)?;
    let free = params.with_omega0(0.0).map_err(|_| RadiationError::InvalidWavenumber(k))?;
    let free_rate = free_emission_rate(&free, k)?.rate;
    let witness_omega0 = params.omega_k(k) / 10.0;
    let bound = |w0: f64| params.with_omega0(w0).map_err(|_| RadiationError::InvalidWavenumber(k));

    let mut finite_time_sequence = Vec::with_capacity(decades as usize + 1);
    for d in 0..=decades {
        let w0 = witness_omega0 / 10f64.powi(d as i32);
        let rate = ho_finite_time_rate(&bound(w0)?, k, t, Oscillations::Averaged)?.rate;
        finite_time_sequence.push((w0, rate));
    }
    let finite_time_ratio = finite_time_sequence.last().map(|x| x.1).unwrap_or(f64::NAN) / free_rate;
    let large_time_at_witness = ho_emission_rate_large_time(&bound(witness_omega0)?, k)?.rate;
    let large_time_limit = ho_emission_rate_large_time(&free, k)?.rate;

    Ok(LimitsReport {
        k,
        t,
        free_rate,
        finite_time_sequence,
        finite_time_ratio,
        witness_omega0,
        large_time_at_witness,
        large_time_ratio: large_time_at_witness / free_rate,
        large_time_limit_ratio: large_time_limit / free_rate,
    })
}
