//! Independent numerical references: companion-matrix eigenvalues for the
//! zeros of H and a Bromwich contour quadrature for inverse Laplace
//! transforms.
#![allow(dead_code)]

use nalgebra::Matrix3;
use num_complex::Complex64;

/// Zeros of H(z) = κ + z²(m − βz) from two scaled companion matrices.
///
/// With e = βω₀/m the runaway zero is m/β times the large root of
/// w³ − w² − e², and the decaying pair is ω₀/v for the roots v ≈ ±i of
/// v³ + v − e. Each root is taken from the scaling in which it is O(1).
/// Returns (z1, z2, z3) with Im z2 > 0.
pub fn companion_roots(mass: f64, beta: f64, omega0: f64) -> (Complex64, Complex64, Complex64) {
    let e = beta * omega0 / mass;
    let forward = Matrix3::new(1.0, 0.0, e * e, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    let w = forward
        .complex_eigenvalues()
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap();
    let z1 = Complex64::new(w.re, w.im) * (mass / beta);

    let reversed = Matrix3::new(0.0, -1.0, e, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    let mut pair: Vec<Complex64> = reversed
        .complex_eigenvalues()
        .iter()
        .map(|v| Complex64::new(v.re, v.im))
        .filter(|v| v.norm() > 0.5)
        .map(|v| omega0 / v)
        .collect();
    assert_eq!(pair.len(), 2, "companion pair not separated for e = {e}");
    pair.sort_by(|a, b| b.im.total_cmp(&a.im));
    (Complex64::new(z1.re, 0.0), pair[0], pair[1])
}

/// f(t) from F(z) by trapezoid quadrature on z(u) = a + μ(1 + iu)², with
/// every singularity of F strictly left of the contour. `poles` only
/// positions the contour. The step is halved until two successive
/// estimates agree to `tol` relative.
pub fn bromwich<F>(f: F, poles: &[Complex64], t: f64, tol: f64) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    assert!(t > 0.0);
    let a = poles.iter().map(|p| p.re).fold(0.0f64, f64::max) + 1.0;
    let mu = poles.iter().map(|p| p.im.abs() / 2.0).fold(1.0f64, f64::max);
    // e^{−μu²t} below 1e-30 of the peak at the cut-off
    let u_max = (70.0 / (mu * t)).sqrt();
    let integrand = |u: f64| {
        let s = Complex64::new(1.0, u);
        let z = a + mu * s * s;
        (z * t).exp() * f(z) * s
    };
    let mut n = 1024usize;
    let mut previous: Option<Complex64> = None;
    loop {
        let h = 2.0 * u_max / n as f64;
        let sum: Complex64 = (0..=n)
            .map(|j| {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                w * integrand(-u_max + j as f64 * h)
            })
            .sum();
        let value = sum * h * mu / std::f64::consts::PI;
        if let Some(p) = previous {
            if (value - p).norm() <= tol * value.norm() || n >= 1 << 22 {
                return value;
            }
        }
        previous = Some(value);
        n *= 2;
    }
}

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}
