//! Inverse Laplace transforms of rational functions by residues.
//!
//! A [`RationalKernel`] is `gain · zᵃ / Π (z − p_j)^{m_j}` with at least one
//! more pole than zeros, so its inverse transform is the sum over poles of
//! Res[e^{zt}·K(z)]. Poles of any order are handled through truncated
//! Taylor series around the pole.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Where a pole comes from. Used by pole-inclusion policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleKind {
    /// The positive real zero of H (Abraham–Lorentz runaway).
    Runaway,
    /// The decaying conjugate pair of zeros of H.
    Mechanical,
    /// z = 0, from z⁻ⁿ factors or from the free-particle double zero of H.
    Origin,
    /// z = ∓iω_k, from the (z ± iω_k) factors.
    Field,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub at: Complex64,
    pub order: u32,
    pub kind: PoleKind,
}

impl Pole {
    pub fn simple(at: Complex64, kind: PoleKind) -> Self {
        Self { at, order: 1, kind }
    }
}

/// `gain · z^numerator_power / Π (z − p_j)^{m_j}`
#[derive(Debug, Clone, PartialEq)]
pub struct RationalKernel {
    pub gain: Complex64,
    pub numerator_power: u32,
    pub poles: Vec<Pole>,
}

/// Contribution of one pole to the inverse transform at time t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueTerm {
    pub pole: Pole,
    pub value: Complex64,
}

impl RationalKernel {
    pub fn degree_gap(&self) -> i64 {
        self.poles.iter().map(|p| p.order as i64).sum::<i64>() - self.numerator_power as i64
    }

    /// Taylor coefficients g₀..g_{n-1} of g(z) = K(z)(z − p)^{order} about
    /// the pole at index `idx`.
    fn regular_part_series(&self, idx: usize, n: usize) -> Vec<Complex64> {
        let p = self.poles[idx].at;
        let mut series = vec![Complex64::new(0.0, 0.0); n];
        series[0] = self.gain;

        // zᵃ = Σ C(a,i) p^{a−i} (z − p)^i
        let a = self.numerator_power as usize;
        let mut monomial = vec![Complex64::new(0.0, 0.0); n];
        let mut binom = 1.0;
        for (i, c) in monomial.iter_mut().enumerate().take(n.min(a + 1)) {
            if i > 0 {
                binom *= (a + 1 - i) as f64 / i as f64;
            }
            *c = binom * p.powu((a - i) as u32);
        }
        series = mul_truncated(&series, &monomial);

        for (j, other) in self.poles.iter().enumerate() {
            if j == idx {
                continue;
            }
            // (z − p_j)⁻¹ = Σ (−1)^i (z − p)^i / d^{i+1},  d = p − p_j
            let d = p - other.at;
            let inv = 1.0 / d;
            let mut factor = vec![Complex64::new(0.0, 0.0); n];
            let mut pw = inv;
            for c in factor.iter_mut() {
                *c = pw;
                pw *= -inv;
            }
            for _ in 0..other.order {
                series = mul_truncated(&series, &factor);
            }
        }
        series
    }

    /// Residue of e^{zt}K(z) at pole `idx`.
    pub fn residue(&self, idx: usize, t: f64) -> Complex64 {
        let pole = self.poles[idx];
        let n = pole.order as usize;
        let g = self.regular_part_series(idx, n);
        // coefficient of (z − p)^{n−1} in e^{pt}·Σ (t^j/j!)(z − p)^j · g(z)
        let mut acc = Complex64::new(0.0, 0.0);
        let mut tj = 1.0;
        for j in 0..n {
            if j > 0 {
                tj *= t / j as f64;
            }
            acc += tj * g[n - 1 - j];
        }
        acc * (pole.at * t).exp()
    }

    /// Coefficient c with Res = c·e^{pt}, for a simple pole.
    pub fn simple_amplitude(&self, idx: usize) -> Complex64 {
        debug_assert_eq!(self.poles[idx].order, 1);
        self.regular_part_series(idx, 1)[0]
    }

    pub fn terms(&self, t: f64) -> Vec<ResidueTerm> {
        (0..self.poles.len())
            .map(|i| ResidueTerm { pole: self.poles[i], value: self.residue(i, t) })
            .collect()
    }

    /// Sum of residues whose pole passes `keep`.
    pub fn inverse_laplace_filtered<F>(&self, t: f64, keep: F) -> Complex64
    where
        F: Fn(&Pole) -> bool,
    {
        (0..self.poles.len())
            .filter(|&i| keep(&self.poles[i]))
            .map(|i| self.residue(i, t))
            .sum()
    }

    pub fn inverse_laplace(&self, t: f64) -> Complex64 {
        self.inverse_laplace_filtered(t, |_| true)
    }

    /// K(z) evaluated directly.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut v = self.gain * z.powu(self.numerator_power);
        for p in &self.poles {
            v /= (z - p.at).powu(p.order);
        }
        v
    }
}

fn mul_truncated(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        if a[i] == Complex64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..(n - i) {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// (e^{xt} − 1)/x, equal to t at x = 0, accurate for small |xt|.
pub fn exprel(x: Complex64, t: f64) -> Complex64 {
    let xt = x * t;
    if xt.norm() < 1e-3 {
        // t·(1 + xt/2 + (xt)²/6 + (xt)³/24 + (xt)⁴/120)
        let s = 1.0 + xt / 2.0 * (1.0 + xt / 3.0 * (1.0 + xt / 4.0 * (1.0 + xt / 5.0)));
        t * s
    } else {
        expm1(xt) / x
    }
}

/// e^z − 1 without cancellation for small |z|.
pub fn expm1(z: Complex64) -> Complex64 {
    let (a, b) = (z.re, z.im);
    let half = (b / 2.0).sin();
    let re = a.exp_m1() * b.cos() - 2.0 * half * half;
    let im = a.exp() * b.sin();
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn simple_poles_partial_fraction() {
        // 1/((z+1)(z+2)) -> e^{-t} − e^{-2t}
        let k = RationalKernel {
            gain: c(1.0, 0.0),
            numerator_power: 0,
            poles: vec![
                Pole::simple(c(-1.0, 0.0), PoleKind::Mechanical),
                Pole::simple(c(-2.0, 0.0), PoleKind::Mechanical),
            ],
        };
        for t in [0.0f64, 0.3, 1.7] {
            let v = k.inverse_laplace(t);
            let e = (-t).exp() - (-2.0 * t).exp();
            assert!((v - e).norm() < 1e-15, "{v} vs {e}");
        }
    }

    #[test]
    fn double_and_triple_poles() {
        // 1/(z+1)² -> t e^{-t};  z/(z+1)³ -> (t − t²/2) e^{-t}
        let k2 = RationalKernel {
            gain: c(1.0, 0.0),
            numerator_power: 0,
            poles: vec![Pole { at: c(-1.0, 0.0), order: 2, kind: PoleKind::Origin }],
        };
        let k3 = RationalKernel {
            gain: c(1.0, 0.0),
            numerator_power: 1,
            poles: vec![Pole { at: c(-1.0, 0.0), order: 3, kind: PoleKind::Origin }],
        };
        for t in [0.1f64, 1.0, 3.0] {
            let e = (-t).exp();
            assert!((k2.inverse_laplace(t).re - t * e).abs() < 1e-15);
            assert!((k3.inverse_laplace(t).re - (t - t * t / 2.0) * e).abs() < 1e-15);
        }
    }

    #[test]
    fn mixed_orders_match_hand_expansion() {
        // 1/(z²(z−a)) = 1/(a² (z−a)) − 1/(a² z) − 1/(a z²)
        let a = 3.0;
        let k = RationalKernel {
            gain: c(1.0, 0.0),
            numerator_power: 0,
            poles: vec![
                Pole { at: c(0.0, 0.0), order: 2, kind: PoleKind::Origin },
                Pole::simple(c(a, 0.0), PoleKind::Runaway),
            ],
        };
        for t in [0.0, 0.5, 1.2] {
            let e = ((a * t).exp() - 1.0) / (a * a) - t / a;
            assert!((k.inverse_laplace(t).re - e).abs() < 1e-13 * e.abs().max(1.0));
        }
    }

    #[test]
    fn exprel_is_continuous() {
        let t = 2.0;
        for x in [c(1e-9, 0.0), c(0.0, 1e-6), c(-1e-4, 3e-4), c(0.4, -0.2)] {
            let direct = ((x * t).exp() - 1.0) / x;
            assert!((exprel(x, t) - direct).norm() < 1e-6 * direct.norm());
        }
        assert_eq!(exprel(c(0.0, 0.0), t), c(t, 0.0));
        let tiny = c(1e-12, -2e-12);
        let v = exprel(tiny, t);
        assert!((v - c(t, 0.0)).norm() < 1e-10);
    }
}
