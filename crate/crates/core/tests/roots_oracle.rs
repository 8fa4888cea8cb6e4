mod common;

use common::oracle::{companion_roots, loglog_slope, rel_err};
use num_complex::Complex64;
use proptest::prelude::*;
use radiance_core::characteristic::relative_residual;
use radiance_core::{approx_roots, cardan_roots, ModelParams, PhysicalConstants};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    let constants = PhysicalConstants::CODATA_2018;
    let mass = 10f64.powf(rng.gen_range(-31.0..-25.0));
    let charge = PhysicalConstants::CODATA_2018.elementary_charge * 10f64.powf(rng.gen_range(-1.0..1.0));
    let p = ModelParams::new(constants, mass, charge, 1.0, 1e-2).unwrap();
    let omega0 = p.validity_bound() * 10f64.powf(rng.gen_range(-8.0..-0.05));
    p.with_omega0(omega0).unwrap()
}

#[test]
fn cardan_matches_companion_matrix_on_random_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let r = cardan_roots(&p).unwrap();
        let (o1, o2, o3) = companion_roots(p.mass(), p.beta(), p.omega0());
        for (a, b) in [(r.z1, o1), (r.z2, o2), (r.z3, o3)] {
            worst = worst.max(rel_err(a, b));
        }
    }
    assert!(worst < 1e-10, "worst relative error {worst:e}");
}

#[test]
fn vieta_identities_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee);
    for _ in 0..100 {
        let p = random_params(&mut rng);
        let r = cardan_roots(&p).unwrap();
        let (z1, z2, z3) = (r.z1, r.z2, r.z3);
        let sum = z1 + z2 + z3;
        let m_over_beta = p.mass() / p.beta();
        assert!((sum.re - m_over_beta).abs() <= 1e-10 * m_over_beta && sum.im.abs() <= 1e-10 * m_over_beta);
        let pairs = z1 * z2 + z1 * z3 + z2 * z3;
        assert!(pairs.norm() <= 1e-10 * z1.norm() * z2.norm(), "{pairs}");
        let prod = z1 * z2 * z3;
        let target = Complex64::new(p.kappa() / p.beta(), 0.0);
        assert!(rel_err(prod, target) <= 1e-10, "{prod} vs {target}");
    }
}

#[test]
fn approximate_root_error_grows_at_least_cubically() {
    let p = ModelParams::electron(0.0).unwrap();
    let omegas: Vec<f64> = (0..11).map(|i| 1e20 * 10f64.powf(i as f64 / 10.0)).collect();
    let errors: Vec<f64> = omegas
        .iter()
        .map(|&w| {
            let q = p.with_omega0(w).unwrap();
            (approx_roots(&q).unwrap().z2.re - cardan_roots(&q).unwrap().z2.re).abs()
        })
        .collect();
    let slope = loglog_slope(&omegas, &errors);
    assert!(slope >= 3.0, "slope {slope}");
    assert!((slope - 4.0).abs() < 0.1, "slope {slope}");
}

#[test]
fn approximation_is_excellent_deep_inside_the_validity_region() {
    let p = ModelParams::electron(0.0).unwrap().with_omega0(1e15).unwrap();
    let a = approx_roots(&p).unwrap();
    let e = cardan_roots(&p).unwrap();
    assert!(rel_err(a.z2, e.z2) < 1e-12);
    assert!((a.z2.re / e.z2.re - 1.0).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn roots_are_zeros_with_a_stable_pair(
        log_mass in -31.0f64..-24.0,
        charge_scale in 0.05f64..20.0,
        fraction in 1e-9f64..0.99,
    ) {
        let p = ModelParams::new(
            PhysicalConstants::CODATA_2018,
            10f64.powf(log_mass),
            PhysicalConstants::CODATA_2018.elementary_charge * charge_scale,
            1.0,
            0.0,
        ).unwrap();
        let p = p.with_omega0(fraction * p.validity_bound()).unwrap();
        let r = cardan_roots(&p).unwrap();
        for z in r.as_array() {
            prop_assert!(relative_residual(&p, z) < 1e-12);
        }
        prop_assert!(r.z1.re > 0.0 && r.z1.im == 0.0);
        prop_assert!(r.z2.re < 0.0);
        prop_assert_eq!(r.z3, r.z2.conj());
    }
}
