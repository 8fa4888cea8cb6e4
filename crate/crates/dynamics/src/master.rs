//! Position-representation master equations
//!
//! ```text
//! ∂ρ(x,y)/∂t = −(i/ħ)[H, ρ](x,y) − D(x − y)·ρ(x,y)
//! ```
//!
//! with D(r) = λr²/2 for QMUPL and D(r) = λ_GRW(1 − e^{−αr²/4}) for GRW.
//! Integrated by Strang splitting: the kinetic part is exact in momentum
//! space, the potential and decoherence parts are exact in position space.
//! The split matches [`crate::sde`] step for step, so the noise average of
//! the ζ = i scheme reproduces this scheme exactly.

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use radiance_core::{GrwParams, ModelParams};
use serde::{Deserialize, Serialize};

use crate::grid::{Spectral, WavefunctionGrid};
use crate::sde::{step_count, Hamiltonian};
use crate::DynamicsError;

/// Trace drift tolerated before evolution aborts.
pub const MAX_TRACE_DRIFT: f64 = 1e-5;
/// Hermiticity tolerance for a valid density matrix.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
/// Trace tolerance for a valid density matrix.
pub const TRACE_TOLERANCE: f64 = 1e-6;

/// ρ(x_i, x_j) stored row-major at `rho[i·n + j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dx: f64,
    pub rho: Vec<Complex64>,
}

impl DensityMatrixGrid {
    /// |ψ⟩⟨ψ|
    pub fn from_pure(psi: &WavefunctionGrid) -> Self {
        let mut out = Self::zeros_like(psi);
        out.add_pure(psi, 1.0);
        out
    }

    pub fn zeros_like(psi: &WavefunctionGrid) -> Self {
        Self {
            x_min: psi.x_min,
            x_max: psi.x_max,
            n_points: psi.n_points,
            dx: psi.dx,
            rho: vec![Complex64::new(0.0, 0.0); psi.n_points * psi.n_points],
        }
    }

    /// ρ += w·|ψ⟩⟨ψ|
    pub fn add_pure(&mut self, psi: &WavefunctionGrid, weight: f64) {
        let n = self.n_points;
        for (i, a) in psi.amplitudes.iter().enumerate() {
            let wa = a * weight;
            for (r, b) in self.rho[i * n..(i + 1) * n].iter_mut().zip(&psi.amplitudes) {
                *r += wa * b.conj();
            }
        }
    }

    /// ρ += other
    pub fn accumulate(&mut self, other: &DensityMatrixGrid) {
        for (a, b) in self.rho.iter_mut().zip(&other.rho) {
            *a += b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.rho.iter_mut().for_each(|a| *a *= s);
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.rho[i * self.n_points + j]
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x_min + j as f64 * self.dx).collect()
    }

    /// dx·Σρ(x,x)
    pub fn trace(&self) -> Complex64 {
        (0..self.n_points).map(|i| self.at(i, i)).sum::<Complex64>() * self.dx
    }

    /// max |ρ(x,y) − ρ(y,x)*|
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.n_points;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.at(i, j) - self.at(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the operator ρ (matrix ρ·dx), ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.n_points;
        let m = DMatrix::from_fn(n, n, |i, j| {
            // symmetrise so the Hermitian solver sees an exactly Hermitian input
            let v = 0.5 * (self.at(i, j) + self.at(j, i).conj()) * self.dx;
            Complex::new(v.re, v.im)
        });
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Tr ρ² = dx²·Σ|ρ(x,y)|²
    pub fn purity(&self) -> f64 {
        self.dx * self.dx * self.rho.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    /// Hilbert–Schmidt distance dx·√Σ|ρ − σ|².
    pub fn frobenius_distance(&self, other: &DensityMatrixGrid) -> f64 {
        self.dx * self.rho.iter().zip(&other.rho).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Checks Hermiticity, unit trace and a real non-negative diagonal.
    pub fn validate(&self) -> Result<(), DynamicsError> {
        if self.rho.len() != self.n_points * self.n_points {
            return Err(DynamicsError::InvalidDensity("shape mismatch".into()));
        }
        let scale = self.rho.iter().map(|a| a.norm()).fold(0.0, f64::max).max(1.0);
        let herm = self.hermiticity_error();
        if herm > HERMITICITY_TOLERANCE * scale {
            return Err(DynamicsError::InvalidDensity(format!("not Hermitian: {herm:e}")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(DynamicsError::InvalidDensity(format!("trace {tr}")));
        }
        for i in 0..self.n_points {
            let d = self.at(i, i);
            if d.re < -TRACE_TOLERANCE * scale || d.im.abs() > HERMITICITY_TOLERANCE * scale {
                return Err(DynamicsError::InvalidDensity(format!("diagonal entry {i} = {d}")));
            }
        }
        Ok(())
    }

    /// ⟨q⟩, ⟨q²⟩
    pub fn position_moments(&self) -> (f64, f64) {
        let tr = self.trace().re;
        let xs = self.positions();
        let (q, q2) = xs.iter().enumerate().fold((0.0, 0.0), |(q, q2), (i, x)| {
            let p = self.at(i, i).re * self.dx;
            (q + p * x, q2 + p * x * x)
        });
        (q / tr, q2 / tr)
    }

    /// ⟨p²⟩ = ħ²·Σ k²⟨k|ρ|k⟩ / Σ⟨k|ρ|k⟩
    pub fn p2_expectation(&self, hbar: f64) -> f64 {
        let n = self.n_points;
        let spectral = Spectral::new(n, self.dx);
        let mut buf = self.rho.clone();
        to_momentum(&mut buf, n, &spectral);
        let (num, den) = (0..n).fold((0.0, 0.0), |(a, b), i| {
            let d = buf[i * n + i].re;
            (a + spectral.k[i].powi(2) * d, b + d)
        });
        hbar * hbar * num / den
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// ρ(x,y) → ρ̃(k,k′) = Σ e^{−ikx}ρ(x,y)e^{ik′y}, returned transposed
/// (row index k′).
fn to_momentum(data: &mut [Complex64], n: usize, s: &Spectral) {
    for row in data.chunks_mut(n) {
        s.inverse(row);
    }
    transpose(data, n);
    for row in data.chunks_mut(n) {
        s.forward(row);
    }
    // undo the transposition so that data[k·n + k′] = ρ̃(k,k′)
    transpose(data, n);
}

fn from_momentum(data: &mut [Complex64], n: usize, s: &Spectral) {
    transpose(data, n);
    for row in data.chunks_mut(n) {
        s.inverse(row);
    }
    transpose(data, n);
    for row in data.chunks_mut(n) {
        s.forward(row);
    }
    let norm = 1.0 / (n * n) as f64;
    data.iter_mut().for_each(|a| *a *= norm);
}

/// Localisation term of the master equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoherence {
    /// D(r) = λr²/2
    Qmupl { lambda: f64 },
    /// D(r) = λ_GRW(1 − e^{−αr²/4})
    Grw { lambda_grw: f64, alpha: f64 },
}

impl Decoherence {
    pub fn rate(self, r: f64) -> f64 {
        match self {
            Decoherence::Qmupl { lambda } => 0.5 * lambda * r * r,
            Decoherence::Grw { lambda_grw, alpha } => -lambda_grw * (-alpha * r * r / 4.0).exp_m1(),
        }
    }
}

/// Split-step propagator for one grid, Hamiltonian and dt.
pub struct MasterStepper {
    n: usize,
    spectral: Spectral,
    kinetic_half: Option<Vec<Complex64>>,
    diagonal: Vec<Complex64>,
}

impl MasterStepper {
    pub fn new(
        rho: &DensityMatrixGrid,
        params: &ModelParams,
        hamiltonian: Hamiltonian,
        decoherence: Decoherence,
        dt: f64,
    ) -> Self {
        let n = rho.n_points;
        let hbar = params.hbar();
        let m = params.mass();
        let spectral = Spectral::new(n, rho.dx);
        let xs = rho.positions();
        let v: Vec<f64> = xs.iter().map(|&x| hamiltonian.potential(m, x)).collect();
        let mut diagonal = Vec::with_capacity(n * n);
        for (i, x) in xs.iter().enumerate() {
            for (j, y) in xs.iter().enumerate() {
                let phase = -(v[i] - v[j]) * dt / hbar;
                let decay = -decoherence.rate(x - y) * dt;
                diagonal.push(Complex64::new(decay, phase).exp());
            }
        }
        let kinetic_half = hamiltonian.has_kinetic().then(|| {
            let mut out = Vec::with_capacity(n * n);
            for k in &spectral.k {
                for kp in &spectral.k {
                    out.push(Complex64::from_polar(1.0, -hbar * (k * k - kp * kp) * dt / (4.0 * m)));
                }
            }
            out
        });
        Self { n, spectral, kinetic_half, diagonal }
    }

    fn kinetic(&self, rho: &mut [Complex64]) {
        if let Some(phase) = &self.kinetic_half {
            to_momentum(rho, self.n, &self.spectral);
            for (a, p) in rho.iter_mut().zip(phase) {
                *a *= p;
            }
            from_momentum(rho, self.n, &self.spectral);
        }
    }

    pub fn step(&self, rho: &mut DensityMatrixGrid) {
        self.kinetic(&mut rho.rho);
        for (a, d) in rho.rho.iter_mut().zip(&self.diagonal) {
            *a *= d;
        }
        self.kinetic(&mut rho.rho);
    }
}

/// Evolves ρ₀ to t_final in steps of dt. With H = 0 a single exact step
/// covers the whole interval.
pub fn evolve_master(
    rho0: &DensityMatrixGrid,
    params: &ModelParams,
    hamiltonian: Hamiltonian,
    decoherence: Decoherence,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrixGrid, DynamicsError> {
    rho0.validate()?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(DynamicsError::InvalidTimeStep(format!("dt = {dt}")));
    }
    let (steps, dt) = if hamiltonian.has_kinetic() {
        (step_count(t_final, dt)?, dt)
    } else {
        (usize::from(t_final > 0.0), t_final)
    };
    let stepper = MasterStepper::new(rho0, params, hamiltonian, decoherence, dt);
    let mut rho = rho0.clone();
    let tr0 = rho0.trace().re;
    for _ in 0..steps {
        stepper.step(&mut rho);
    }
    let drift = (rho.trace().re - tr0).abs();
    if drift > MAX_TRACE_DRIFT {
        return Err(DynamicsError::TraceDrift { drift });
    }
    Ok(rho)
}

pub fn evolve_master_qmupl(
    rho0: &DensityMatrixGrid,
    params: &ModelParams,
    hamiltonian: Hamiltonian,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrixGrid, DynamicsError> {
    evolve_master(rho0, params, hamiltonian, Decoherence::Qmupl { lambda: params.lambda() }, t_final, dt)
}

pub fn evolve_master_grw(
    rho0: &DensityMatrixGrid,
    grw: &GrwParams,
    params: &ModelParams,
    hamiltonian: Hamiltonian,
    t_final: f64,
    dt: f64,
) -> Result<DensityMatrixGrid, DynamicsError> {
    let d = Decoherence::Grw { lambda_grw: grw.lambda_grw, alpha: grw.alpha };
    evolve_master(rho0, params, hamiltonian, d, t_final, dt)
}
