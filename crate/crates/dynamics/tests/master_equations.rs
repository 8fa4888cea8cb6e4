use num_complex::Complex64;
use radiance_core::{GrwParams, ModelParams, PhysicalConstants};
use radiance_dynamics::master::{evolve_master, Decoherence};
use radiance_dynamics::{evolve_master_grw, evolve_master_qmupl, DensityMatrixGrid, Hamiltonian, WavefunctionGrid};

fn natural(lambda: f64) -> ModelParams {
    ModelParams::new(PhysicalConstants::natural(), 1.0, 0.0, 0.0, lambda).unwrap()
}

fn cat(n: usize, half_box: f64) -> DensityMatrixGrid {
    let psi = WavefunctionGrid::superposition(
        -half_box,
        half_box,
        n,
        &[(Complex64::new(0.6, 0.0), -3.0, 1.0, 0.7), (Complex64::new(0.0, 0.8), 3.0, 1.0, -0.4)],
    )
    .unwrap();
    DensityMatrixGrid::from_pure(&psi)
}

fn max_dev(a: &DensityMatrixGrid, b: impl Fn(usize, usize) -> Complex64) -> f64 {
    let n = a.n_points;
    (0..n * n).map(|idx| (a.rho[idx] - b(idx / n, idx % n)).norm()).fold(0.0, f64::max)
}

#[test]
fn qmupl_without_hamiltonian_matches_closed_form() {
    let rho0 = cat(64, 12.0);
    let (lambda, t) = (0.7, 1.3);
    let rho = evolve_master_qmupl(&rho0, &natural(lambda), Hamiltonian::Zero, t, 0.01).unwrap();
    let xs = rho0.positions();
    let dev = max_dev(&rho, |i, j| rho0.at(i, j) * (-lambda * (xs[i] - xs[j]).powi(2) * t / 2.0).exp());
    assert!(dev < 1e-8, "{dev:e}");
    for i in 0..64 {
        assert_eq!(rho.at(i, i), rho0.at(i, i));
    }
}

#[test]
fn grw_without_hamiltonian_matches_closed_form_and_saturates() {
    let rho0 = cat(64, 12.0);
    let grw = GrwParams::from_grw(0.9, 0.25).unwrap();
    let t = 2.0;
    let rho = evolve_master_grw(&rho0, &grw, &natural(0.0), Hamiltonian::Zero, t, 0.01).unwrap();
    let xs = rho0.positions();
    let factor = |r: f64| (-grw.lambda_grw * (1.0 - (-grw.alpha * r * r / 4.0).exp()) * t).exp();
    let dev = max_dev(&rho, |i, j| rho0.at(i, j) * factor(xs[i] - xs[j]));
    assert!(dev < 1e-8, "{dev:e}");

    let d = Decoherence::Grw { lambda_grw: grw.lambda_grw, alpha: grw.alpha };
    assert!((d.rate(1e3) - grw.lambda_grw).abs() < 1e-15);
    assert!(d.rate(10.0) < d.rate(20.0) && d.rate(20.0) <= grw.lambda_grw);
}

#[test]
fn grw_agrees_with_qmupl_at_small_distances() {
    // r_C = 1/√α = 60, so the whole 2×1 box satisfies |x − y| ≤ r_C/30
    let grw = GrwParams::from_grw(3.0, 1.0 / 3600.0).unwrap();
    let lambda = grw.lambda_qmupl();
    let q = Decoherence::Qmupl { lambda };
    let g = Decoherence::Grw { lambda_grw: grw.lambda_grw, alpha: grw.alpha };
    let r_max = grw.r_c / 30.0;
    for i in 1..=100 {
        let r = r_max * i as f64 / 100.0;
        let rel = (g.rate(r) - q.rate(r)).abs() / q.rate(r);
        assert!(rel < 1e-3, "r={r}: {rel:e}");
    }

    let psi = WavefunctionGrid::gaussian(-1.0, 1.0, 64, 0.0, 0.12, 0.0).unwrap();
    let rho0 = DensityMatrixGrid::from_pure(&psi);
    let a = evolve_master_grw(&rho0, &grw, &natural(lambda), Hamiltonian::Zero, 5.0, 1.0).unwrap();
    let b = evolve_master_qmupl(&rho0, &natural(lambda), Hamiltonian::Zero, 5.0, 1.0).unwrap();
    let n = rho0.n_points;
    for idx in 0..n * n {
        let decay_a = 1.0 - (a.rho[idx] / rho0.rho[idx]).re;
        let decay_b = 1.0 - (b.rho[idx] / rho0.rho[idx]).re;
        if decay_b > 1e-12 {
            assert!((decay_a - decay_b).abs() <= 1e-3 * decay_b);
        }
    }
}

#[test]
fn grw_converges_to_qmupl_linearly_in_alpha() {
    let lambda = 0.5;
    let rho0 = cat(64, 12.0);
    let p = natural(lambda);
    let reference = evolve_master_qmupl(&rho0, &p, Hamiltonian::Free, 1.0, 0.01).unwrap();
    let alphas: Vec<f64> = (0..6).map(|i| 1e-4 * 10f64.powf(i as f64 / 5.0)).collect();
    let errors: Vec<f64> = alphas
        .iter()
        .map(|&alpha| {
            let grw = GrwParams::from_grw(2.0 * lambda / alpha, alpha).unwrap();
            let rho = evolve_master_grw(&rho0, &grw, &p, Hamiltonian::Free, 1.0, 0.01).unwrap();
            rho.frobenius_distance(&reference)
        })
        .collect();
    let lx: Vec<f64> = alphas.iter().map(|a| a.ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let mx = lx.iter().sum::<f64>() / 6.0;
    let my = ly.iter().sum::<f64>() / 6.0;
    let slope = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope - 1.0).abs() <= 0.1, "slope {slope}, errors {errors:?}");
}

#[test]
fn momentum_spread_grows_at_rate_lambda_hbar_squared() {
    let lambda = 0.4;
    let p = natural(lambda);
    let rho0 = cat(64, 16.0);
    let (t, h, dt) = (0.5, 0.05, 0.005);
    let at = |t: f64| evolve_master_qmupl(&rho0, &p, Hamiltonian::Free, t, dt).unwrap().p2_expectation(1.0);
    let slope = (at(t + h) - at(t - h)) / (2.0 * h);
    assert!((slope / lambda - 1.0).abs() < 0.01, "slope {slope}");
}

#[test]
fn evolvers_preserve_hermiticity_trace_and_positivity() {
    let rho0 = cat(64, 14.0);
    let p = natural(0.8).with_omega0(0.6).unwrap();
    let grw = GrwParams::from_grw(1.5, 0.3).unwrap();
    let runs = [
        evolve_master_qmupl(&rho0, &p, Hamiltonian::from_params(&p), 2.0, 0.01).unwrap(),
        evolve_master_grw(&rho0, &grw, &p, Hamiltonian::from_params(&p), 2.0, 0.01).unwrap(),
        evolve_master(&rho0, &p, Hamiltonian::Free, Decoherence::Qmupl { lambda: 0.0 }, 2.0, 0.01).unwrap(),
    ];
    for rho in &runs {
        rho.validate().unwrap();
        assert!(rho.hermiticity_error() < 1e-10);
        assert!(rho.min_eigenvalue() >= -1e-8);
    }
    // no decoherence keeps the state pure
    assert!((runs[2].purity() - 1.0).abs() < 1e-10);
    assert!(runs[0].purity() < 0.9);
}
