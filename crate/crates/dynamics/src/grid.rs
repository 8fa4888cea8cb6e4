use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::DynamicsError;

/// Normalisation tolerance for a state handed to the evolvers.
pub const NORM_TOLERANCE: f64 = 1e-8;
/// Edge amplitude allowed relative to the peak amplitude.
pub const BOUNDARY_GUARD: f64 = 1e-6;

/// Uniform periodic grid x_j = x_min + j·dx, j = 0..n_points, with
/// dx = (x_max − x_min)/n_points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dx: f64,
    pub amplitudes: Vec<Complex64>,
}

fn check_layout(x_min: f64, x_max: f64, n_points: usize) -> Result<f64, DynamicsError> {
    if !n_points.is_power_of_two() || n_points < 4 {
        return Err(DynamicsError::InvalidGrid(format!("n_points = {n_points} is not a power of two ≥ 4")));
    }
    if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
        return Err(DynamicsError::InvalidGrid(format!("bad bounds [{x_min}, {x_max}]")));
    }
    Ok((x_max - x_min) / n_points as f64)
}

impl WavefunctionGrid {
    pub fn from_amplitudes(x_min: f64, x_max: f64, amplitudes: Vec<Complex64>) -> Result<Self, DynamicsError> {
        let n_points = amplitudes.len();
        let dx = check_layout(x_min, x_max, n_points)?;
        Ok(Self { x_min, x_max, n_points, dx, amplitudes })
    }

    /// Normalised Gaussian of width σ (|ψ|² has standard deviation σ)
    /// centred at `center` with mean wavenumber `k0`.
    pub fn gaussian(
        x_min: f64,
        x_max: f64,
        n_points: usize,
        center: f64,
        sigma: f64,
        k0: f64,
    ) -> Result<Self, DynamicsError> {
        Self::superposition(x_min, x_max, n_points, &[(Complex64::new(1.0, 0.0), center, sigma, k0)])
    }

    /// Normalised Σ c_j·g_j(x) with (c_j, center_j, σ_j, k_j).
    pub fn superposition(
        x_min: f64,
        x_max: f64,
        n_points: usize,
        terms: &[(Complex64, f64, f64, f64)],
    ) -> Result<Self, DynamicsError> {
        let dx = check_layout(x_min, x_max, n_points)?;
        if terms.iter().any(|t| !(t.2 > 0.0)) {
            return Err(DynamicsError::InvalidGrid("Gaussian width must be positive".into()));
        }
        let amplitudes = (0..n_points)
            .map(|j| {
                let x = x_min + j as f64 * dx;
                terms
                    .iter()
                    .map(|&(c, x0, s, k0)| {
                        let norm = (2.0 * PI * s * s).powf(-0.25);
                        c * norm * (-(x - x0).powi(2) / (4.0 * s * s)).exp() * Complex64::from_polar(1.0, k0 * x)
                    })
                    .sum()
            })
            .collect();
        let mut grid = Self { x_min, x_max, n_points, dx, amplitudes };
        grid.normalize();
        Ok(grid)
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x_min + j as f64 * self.dx).collect()
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn norm_squared(&self) -> f64 {
        self.dx * self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()
    }

    pub fn normalize(&mut self) -> f64 {
        let n = self.norm_squared().sqrt();
        if n > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= n);
        }
        n
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_squared() - 1.0).abs() <= NORM_TOLERANCE
    }

    /// ⟨q⟩ and ⟨q²⟩ for the normalised state.
    pub fn position_moments(&self) -> (f64, f64) {
        let mut w = 0.0;
        let mut q = 0.0;
        let mut q2 = 0.0;
        for (a, x) in self.amplitudes.iter().zip(self.positions()) {
            let p = a.norm_sqr();
            w += p;
            q += p * x;
            q2 += p * x * x;
        }
        (q / w, q2 / w)
    }

    /// Largest edge amplitude divided by the peak amplitude.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let edge = self.amplitudes[0].norm().max(self.amplitudes[self.n_points - 1].norm());
        if peak == 0.0 {
            0.0
        } else {
            edge / peak
        }
    }

    pub fn check_boundary(&self) -> Result<(), DynamicsError> {
        let ratio = self.boundary_ratio();
        if ratio < BOUNDARY_GUARD {
            Ok(())
        } else {
            Err(DynamicsError::GridEscape { ratio })
        }
    }
}

/// FFT plans and angular wavenumbers for one grid size.
#[derive(Clone)]
pub struct Spectral {
    pub n: usize,
    /// Wavenumber of each FFT bin (rad/m), in FFT order.
    pub k: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Spectral {
    pub fn new(n: usize, dx: f64) -> Self {
        let mut planner = FftPlanner::new();
        let dk = 2.0 * PI / (n as f64 * dx);
        let k = (0..n)
            .map(|j| if j < n / 2 { j as f64 * dk } else { (j as f64 - n as f64) * dk })
            .collect();
        Self { n, k, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn for_grid(grid: &WavefunctionGrid) -> Self {
        Self::new(grid.n_points, grid.dx)
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    /// Unnormalised inverse transform.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
    }

    /// Largest |k| on the grid.
    pub fn k_max(&self) -> f64 {
        self.k.iter().fold(0.0f64, |m, k| m.max(k.abs()))
    }

    /// ⟨k²⟩ of a state (normalised over its own weight).
    pub fn k2_expectation(&self, amplitudes: &[Complex64]) -> f64 {
        let mut buf = amplitudes.to_vec();
        self.forward(&mut buf);
        let (num, den) = buf
            .iter()
            .zip(&self.k)
            .fold((0.0, 0.0), |(n, d), (a, k)| (n + a.norm_sqr() * k * k, d + a.norm_sqr()));
        num / den
    }

    /// ⟨k⟩ of a state.
    pub fn k_expectation(&self, amplitudes: &[Complex64]) -> f64 {
        let mut buf = amplitudes.to_vec();
        self.forward(&mut buf);
        let (num, den) =
            buf.iter().zip(&self.k).fold((0.0, 0.0), |(n, d), (a, k)| (n + a.norm_sqr() * k, d + a.norm_sqr()));
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments() {
        let g = WavefunctionGrid::gaussian(-20.0, 20.0, 512, 1.5, 0.8, 2.0).unwrap();
        assert!(g.is_normalized());
        let (q, q2) = g.position_moments();
        assert!((q - 1.5).abs() < 1e-12);
        assert!((q2 - q * q - 0.64).abs() < 1e-12);
        let s = Spectral::for_grid(&g);
        assert!((s.k_expectation(&g.amplitudes) - 2.0).abs() < 1e-10);
        // ⟨k²⟩ = k0² + 1/(4σ²)
        assert!((s.k2_expectation(&g.amplitudes) - (4.0 + 1.0 / (4.0 * 0.64))).abs() < 1e-10);
        assert!(g.check_boundary().is_ok());
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(WavefunctionGrid::gaussian(-1.0, 1.0, 100, 0.0, 0.1, 0.0).is_err());
        assert!(WavefunctionGrid::gaussian(1.0, -1.0, 128, 0.0, 0.1, 0.0).is_err());
        assert!(WavefunctionGrid::gaussian(-1.0, 1.0, 128, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn boundary_guard_trips_for_wide_states() {
        let g = WavefunctionGrid::gaussian(-5.0, 5.0, 128, 0.0, 2.0, 0.0).unwrap();
        assert!(matches!(g.check_boundary(), Err(DynamicsError::GridEscape { .. })));
    }
}
