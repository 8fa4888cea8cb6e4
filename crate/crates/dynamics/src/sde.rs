//! Split-step integration of the ζ-family of collapse equations
//!
//! ```text
//! dψ = [−(i/ħ)H dt + √λ(ζq − ζ_R⟨q⟩)dW − (λ/2)(|ζ|²q² − 2ζζ_R q⟨q⟩ + ζ_R²⟨q⟩²)dt] ψ
//! ```
//!
//! Each step is half a kinetic step in momentum space, a position-space step,
//! and another half kinetic step. In position space the equation is diagonal
//! and, with ⟨q⟩ frozen at c, linear, so it is applied exactly:
//! ψ(q) ← exp[(a − b²/2)dt + b·ΔW]·ψ(q) with b = √λ(ζq − ζ_R c). For ζ = i
//! this is the random phase e^{i√λ q ΔW}, i.e. the Stratonovich random
//! potential −√λħq·w(t). For ζ_R ≠ 0, c is the midpoint ⟨q⟩ found by fixed
//! point iteration and the state is renormalised afterwards.

use num_complex::Complex64;
use radiance_core::ModelParams;
use serde::{Deserialize, Serialize};

use crate::grid::{Spectral, WavefunctionGrid};
use crate::noise::NoisePath;
use crate::DynamicsError;

/// Norm error of the state entering a nonlinear step that aborts the run.
pub const MAX_NORM_DRIFT: f64 = 1e-4;
/// Convergence of the midpoint ⟨q⟩, relative to the box length.
pub const MIDPOINT_TOLERANCE: f64 = 1e-10;
const MAX_MIDPOINT_ITERATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hamiltonian {
    /// No Hamiltonian evolution; only the collapse terms act.
    Zero,
    /// p²/2m
    Free,
    /// p²/2m + mω₀²q²/2
    Harmonic { omega0: f64 },
}

impl Hamiltonian {
    /// Free for ω₀ = 0, harmonic otherwise.
    pub fn from_params(params: &ModelParams) -> Self {
        if params.omega0() == 0.0 {
            Hamiltonian::Free
        } else {
            Hamiltonian::Harmonic { omega0: params.omega0() }
        }
    }

    pub fn has_kinetic(self) -> bool {
        !matches!(self, Hamiltonian::Zero)
    }

    pub fn potential(self, mass: f64, x: f64) -> f64 {
        match self {
            Hamiltonian::Harmonic { omega0 } => 0.5 * mass * omega0 * omega0 * x * x,
            _ => 0.0,
        }
    }
}

pub fn check_zeta(zeta: Complex64) -> Result<(), DynamicsError> {
    if (zeta.norm() - 1.0).abs() <= 1e-12 {
        Ok(())
    } else {
        Err(DynamicsError::InvalidZeta(zeta))
    }
}

/// Reusable stepper for one grid, parameter set, ζ and dt.
pub struct ZetaStepper {
    zeta: Complex64,
    sqrt_lambda: f64,
    lambda: f64,
    dt: f64,
    positions: Vec<f64>,
    box_length: f64,
    /// e^{−iV dt/ħ}
    potential_phase: Vec<Complex64>,
    /// e^{−iħk² dt/4m}
    kinetic_half: Option<Vec<Complex64>>,
    spectral: Spectral,
}

impl ZetaStepper {
    pub fn new(
        template: &WavefunctionGrid,
        params: &ModelParams,
        hamiltonian: Hamiltonian,
        zeta: Complex64,
        dt: f64,
    ) -> Result<Self, DynamicsError> {
        check_zeta(zeta)?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(DynamicsError::InvalidTimeStep(format!("dt = {dt}")));
        }
        let hbar = params.hbar();
        let m = params.mass();
        let lambda = params.lambda();
        let spectral = Spectral::for_grid(template);
        let length = template.length();

        let kinetic_phase = hbar * spectral.k_max().powi(2) * dt / (2.0 * m);
        if hamiltonian.has_kinetic() && kinetic_phase > std::f64::consts::PI {
            return Err(DynamicsError::InvalidTimeStep(format!(
                "kinetic phase per step {kinetic_phase:.3} rad exceeds π; reduce dt or refine less"
            )));
        }
        let noise_scale = lambda * dt * length * length / 4.0;
        if noise_scale > 1.0 {
            return Err(DynamicsError::InvalidTimeStep(format!(
                "λ·dt·(L/2)² = {noise_scale:.3} exceeds 1; reduce dt"
            )));
        }

        let positions = template.positions();
        let potential_phase = positions
            .iter()
            .map(|&x| Complex64::from_polar(1.0, -hamiltonian.potential(m, x) * dt / hbar))
            .collect();
        let kinetic_half = hamiltonian.has_kinetic().then(|| {
            spectral
                .k
                .iter()
                .map(|k| Complex64::from_polar(1.0, -hbar * k * k * dt / (4.0 * m)))
                .collect()
        });
        Ok(Self {
            zeta,
            sqrt_lambda: lambda.sqrt(),
            lambda,
            dt,
            positions,
            box_length: length,
            potential_phase,
            kinetic_half,
            spectral,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn is_nonlinear(&self) -> bool {
        self.zeta.re != 0.0 && self.lambda > 0.0
    }

    fn kinetic(&self, psi: &mut [Complex64]) {
        if let Some(phase) = &self.kinetic_half {
            self.spectral.forward(psi);
            let scale = 1.0 / psi.len() as f64;
            for (a, p) in psi.iter_mut().zip(phase) {
                *a *= p * scale;
            }
            self.spectral.inverse(psi);
        }
    }

    /// Collapse exponent (a − b²/2)dt + bΔW at position q with ⟨q⟩ = c.
    fn exponent(&self, q: f64, c: f64, dw: f64) -> Complex64 {
        let z = self.zeta;
        let zr = z.re;
        let l = self.lambda;
        let quad = -0.5 * l * (z.norm_sqr() + z * z) * q * q;
        let lin = 2.0 * l * z * zr * c * q;
        let cst = -l * zr * zr * c * c;
        (quad + lin + cst) * self.dt + self.sqrt_lambda * (z * q - zr * c) * dw
    }

    /// ⟨q⟩ of the state after the position step with centre c.
    fn trial_mean(&self, psi: &[Complex64], c: f64, dw: f64) -> f64 {
        let (mut w, mut wq) = (0.0, 0.0);
        for (a, &q) in psi.iter().zip(&self.positions) {
            let s = (2.0 * self.exponent(q, c, dw).re).exp() * a.norm_sqr();
            w += s;
            wq += s * q;
        }
        wq / w
    }

    fn mean(&self, psi: &[Complex64]) -> f64 {
        let (w, wq) = psi
            .iter()
            .zip(&self.positions)
            .fold((0.0, 0.0), |(w, wq), (a, q)| (w + a.norm_sqr(), wq + a.norm_sqr() * q));
        wq / w
    }

    /// One full step with Wiener increment `dw`. `step_index` only labels
    /// diagnostics.
    pub fn step(&mut self, psi: &mut WavefunctionGrid, dw: f64, step_index: usize) -> Result<(), DynamicsError> {
        if self.is_nonlinear() {
            // The exact linear position step moves the raw norm by O(λ·Var q·dt)
            // before renormalisation; only the incoming state must stay normalised.
            let drift = (psi.norm_squared() - 1.0).abs();
            if !(drift <= MAX_NORM_DRIFT) {
                return Err(DynamicsError::NormDrift { step: step_index, drift });
            }
        }
        self.kinetic(&mut psi.amplitudes);

        let c = if self.is_nonlinear() {
            let c0 = self.mean(&psi.amplitudes);
            let mut c = c0;
            let mut converged = false;
            for _ in 0..MAX_MIDPOINT_ITERATIONS {
                let next = 0.5 * (c0 + self.trial_mean(&psi.amplitudes, c, dw));
                let done = (next - c).abs() <= MIDPOINT_TOLERANCE * self.box_length;
                c = next;
                if done {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(DynamicsError::MidpointNotConverged { step: step_index });
            }
            c
        } else {
            0.0
        };

        for ((a, &q), v) in psi.amplitudes.iter_mut().zip(&self.positions).zip(&self.potential_phase) {
            *a *= self.exponent(q, c, dw).exp() * v;
        }

        if self.is_nonlinear() {
            let n2 = psi.norm_squared();
            if !(n2.is_finite() && n2 > 0.0) {
                return Err(DynamicsError::NonFinite { step: step_index });
            }
            psi.normalize();
        }

        self.kinetic(&mut psi.amplitudes);
        if psi.amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(DynamicsError::NonFinite { step: step_index });
        }
        psi.check_boundary()
    }
}

/// Sampled states of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<WavefunctionGrid>,
}

/// Number of steps of size dt that make up t_final.
pub fn step_count(t_final: f64, dt: f64) -> Result<usize, DynamicsError> {
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(DynamicsError::InvalidTimeStep(format!("t_final = {t_final}")));
    }
    let n = (t_final / dt).round();
    if (n * dt - t_final).abs() > 1e-9 * t_final.max(dt) {
        return Err(DynamicsError::InvalidTimeStep(format!("t_final = {t_final} is not a multiple of dt = {dt}")));
    }
    Ok(n as usize)
}

/// Evolves ψ₀ along `noise` up to t_final, keeping every `record_every`-th
/// state (and the initial and final ones).
pub fn evolve_zeta(
    psi0: &WavefunctionGrid,
    params: &ModelParams,
    hamiltonian: Hamiltonian,
    zeta: Complex64,
    noise: &NoisePath,
    t_final: f64,
    record_every: usize,
) -> Result<Trajectory, DynamicsError> {
    if !psi0.is_normalized() {
        return Err(DynamicsError::NotNormalized(psi0.norm_squared()));
    }
    psi0.check_boundary()?;
    let steps = step_count(t_final, noise.dt)?;
    if steps > noise.len() {
        return Err(DynamicsError::NoiseTooShort { needed: steps, available: noise.len() });
    }
    let record_every = record_every.max(1);
    let mut stepper = ZetaStepper::new(psi0, params, hamiltonian, zeta, noise.dt)?;
    let mut psi = psi0.clone();
    let mut out = Trajectory { times: vec![0.0], states: vec![psi.clone()] };
    for (i, &dw) in noise.increments[..steps].iter().enumerate() {
        stepper.step(&mut psi, dw, i)?;
        if (i + 1) % record_every == 0 || i + 1 == steps {
            out.times.push((i + 1) as f64 * noise.dt);
            out.states.push(psi.clone());
        }
    }
    Ok(out)
}
