//! Monte-Carlo ensembles of ζ-family trajectories.
//!
//! Trajectory i draws its noise from [`trajectory_seed`]`(master_seed, i)`.
//! Trajectories run in parallel in fixed blocks; per-trajectory samples are
//! collected in index order and reduced sequentially, so results do not
//! depend on the number of threads.

use num_complex::Complex64;
use radiance_core::ModelParams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::WavefunctionGrid;
use crate::master::DensityMatrixGrid;
use crate::noise::{trajectory_seed, NoisePath};
use crate::sde::{step_count, Hamiltonian, ZetaStepper};
use crate::DynamicsError;

pub const MIN_TRAJECTORIES: usize = 100;
/// Trajectories handled by one task; fixes the density reduction order.
const BLOCK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub zeta: Complex64,
    pub hamiltonian: Hamiltonian,
    pub dt: f64,
    pub t_final: f64,
    /// Observables are sampled every `sample_every` steps, plus t = 0.
    pub sample_every: usize,
    pub n_traj: usize,
    pub master_seed: u64,
    /// Also average |ψ⟩⟨ψ| at t_final.
    pub accumulate_density: bool,
    /// Fail if the standard error of E[⟨p²⟩] at t_final exceeds this.
    pub max_standard_error: Option<f64>,
}

/// Mean, trajectory-level variance and standard error of one observable
/// at each sampled time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableStats {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub standard_error: Vec<f64>,
}

impl ObservableStats {
    fn from_samples(samples: &[Vec<f64>], n_times: usize) -> Self {
        let n = samples.len() as f64;
        let mut mean = vec![0.0; n_times];
        let mut variance = vec![0.0; n_times];
        for s in samples {
            for (m, v) in mean.iter_mut().zip(s) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        for s in samples {
            for ((acc, v), m) in variance.iter_mut().zip(s).zip(&mean) {
                *acc += (v - m).powi(2);
            }
        }
        variance.iter_mut().for_each(|v| *v /= n - 1.0);
        let standard_error = variance.iter().map(|v| (v / n).sqrt()).collect();
        Self { mean, variance, standard_error }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub n_traj: usize,
    pub master_seed: u64,
    pub times: Vec<f64>,
    pub q: ObservableStats,
    pub q2: ObservableStats,
    pub p2: ObservableStats,
    /// ⟨q⟩ of every trajectory at t_final, in trajectory order.
    pub final_q: Vec<f64>,
    /// E[|ψ⟩⟨ψ|] at t_final when requested.
    pub density: Option<DensityMatrixGrid>,
    /// √((1 − Tr ρ²)/N): expected Hilbert–Schmidt distance between the
    /// sample average and the exact average.
    pub density_standard_error: Option<f64>,
}

impl EnsembleStats {
    /// Fraction of trajectories ending with ⟨q⟩ > threshold, and its
    /// binomial standard error.
    pub fn fraction_above(&self, threshold: f64) -> (f64, f64) {
        let n = self.final_q.len() as f64;
        let f = self.final_q.iter().filter(|&&q| q > threshold).count() as f64 / n;
        (f, (f * (1.0 - f) / n).sqrt())
    }

    /// Least-squares slope of E[⟨p²⟩] against t.
    pub fn p2_slope(&self) -> f64 {
        let n = self.times.len() as f64;
        let mt = self.times.iter().sum::<f64>() / n;
        let mp = self.p2.mean.iter().sum::<f64>() / n;
        let sxy: f64 = self.times.iter().zip(&self.p2.mean).map(|(t, p)| (t - mt) * (p - mp)).sum();
        let sxx: f64 = self.times.iter().map(|t| (t - mt).powi(2)).sum();
        sxy / sxx
    }
}

struct TrajectoryResult {
    q: Vec<f64>,
    q2: Vec<f64>,
    p2: Vec<f64>,
}

fn sample(psi: &WavefunctionGrid, stepper: &ZetaStepper, hbar: f64, out: &mut TrajectoryResult) {
    let (q, q2) = psi.position_moments();
    out.q.push(q);
    out.q2.push(q2);
    out.p2.push(hbar * hbar * stepper.spectral().k2_expectation(&psi.amplitudes));
}

fn run_one(
    psi0: &WavefunctionGrid,
    params: &ModelParams,
    config: &EnsembleConfig,
    steps: usize,
    index: usize,
) -> Result<(TrajectoryResult, WavefunctionGrid), DynamicsError> {
    let noise = NoisePath::generate(trajectory_seed(config.master_seed, index as u64), config.dt, steps)?;
    let mut stepper = ZetaStepper::new(psi0, params, config.hamiltonian, config.zeta, config.dt)?;
    let hbar = params.hbar();
    let mut psi = psi0.clone();
    let mut out = TrajectoryResult { q: vec![], q2: vec![], p2: vec![] };
    sample(&psi, &stepper, hbar, &mut out);
    for (i, &dw) in noise.increments.iter().enumerate() {
        stepper.step(&mut psi, dw, i)?;
        if (i + 1) % config.sample_every == 0 || i + 1 == steps {
            sample(&psi, &stepper, hbar, &mut out);
        }
    }
    Ok((out, psi))
}

pub fn ensemble_run(
    params: &ModelParams,
    psi0: &WavefunctionGrid,
    config: &EnsembleConfig,
) -> Result<EnsembleStats, DynamicsError> {
    if config.n_traj < MIN_TRAJECTORIES {
        return Err(DynamicsError::TooFewTrajectories(config.n_traj));
    }
    if !psi0.is_normalized() {
        return Err(DynamicsError::NotNormalized(psi0.norm_squared()));
    }
    let steps = step_count(config.t_final, config.dt)?;
    let sample_every = config.sample_every.max(1);
    let config = EnsembleConfig { sample_every, ..*config };
    // validate once before spawning work
    ZetaStepper::new(psi0, params, config.hamiltonian, config.zeta, config.dt)?;

    let n_blocks = config.n_traj.div_ceil(BLOCK);
    let blocks: Vec<(Vec<TrajectoryResult>, Option<DensityMatrixGrid>)> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let range = b * BLOCK..((b + 1) * BLOCK).min(config.n_traj);
            let mut results = Vec::with_capacity(range.len());
            let mut rho = config.accumulate_density.then(|| DensityMatrixGrid::zeros_like(psi0));
            for i in range {
                let (r, psi) = run_one(psi0, params, &config, steps, i)?;
                if let Some(rho) = rho.as_mut() {
                    rho.add_pure(&psi, 1.0);
                }
                results.push(r);
            }
            Ok((results, rho))
        })
        .collect::<Result<_, DynamicsError>>()?;

    let mut density = config.accumulate_density.then(|| DensityMatrixGrid::zeros_like(psi0));
    let mut qs = Vec::with_capacity(config.n_traj);
    let mut q2s = Vec::with_capacity(config.n_traj);
    let mut p2s = Vec::with_capacity(config.n_traj);
    for (results, rho) in blocks {
        if let (Some(total), Some(part)) = (density.as_mut(), rho.as_ref()) {
            total.accumulate(part);
        }
        for r in results {
            qs.push(r.q);
            q2s.push(r.q2);
            p2s.push(r.p2);
        }
    }
    let n = config.n_traj as f64;
    let density_standard_error = density.as_mut().map(|rho| {
        rho.scale(1.0 / n);
        ((1.0 - rho.purity()).max(0.0) / n).sqrt()
    });

    let mut times: Vec<f64> = (0..=steps).step_by(sample_every).map(|s| s as f64 * config.dt).collect();
    if steps % sample_every != 0 {
        times.push(steps as f64 * config.dt);
    }
    let n_times = times.len();
    let final_q = qs.iter().map(|q| q[n_times - 1]).collect();
    let stats = EnsembleStats {
        n_traj: config.n_traj,
        master_seed: config.master_seed,
        q: ObservableStats::from_samples(&qs, n_times),
        q2: ObservableStats::from_samples(&q2s, n_times),
        p2: ObservableStats::from_samples(&p2s, n_times),
        times,
        final_q,
        density,
        density_standard_error,
    };
    if let Some(tol) = config.max_standard_error {
        let se = *stats.p2.standard_error.last().unwrap();
        if se > tol {
            return Err(DynamicsError::NonConvergence { observable: "p2", standard_error: se, tolerance: tol });
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use radiance_core::PhysicalConstants;

    fn setup() -> (ModelParams, WavefunctionGrid, EnsembleConfig) {
        let p = ModelParams::new(PhysicalConstants::natural(), 1.0, 0.0, 0.0, 1.0).unwrap();
        let psi = WavefunctionGrid::gaussian(-12.0, 12.0, 64, 0.0, 1.0, 0.0).unwrap();
        let config = EnsembleConfig {
            zeta: Complex64::new(1.0, 0.0),
            hamiltonian: Hamiltonian::Free,
            dt: 4e-3,
            t_final: 0.1,
            sample_every: 5,
            n_traj: 130,
            master_seed: 42,
            accumulate_density: true,
            max_standard_error: None,
        };
        (p, psi, config)
    }

    #[test]
    fn same_seed_gives_identical_statistics() {
        let (p, psi, config) = setup();
        let a = ensemble_run(&p, &psi, &config).unwrap();
        let b = ensemble_run(&p, &psi, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.times.len(), 6);
        assert_eq!(a.final_q.len(), 130);
        let c = ensemble_run(&p, &psi, &EnsembleConfig { master_seed: 43, ..config }).unwrap();
        assert_ne!(a.final_q, c.final_q);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let (p, psi, config) = setup();
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let multi = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = single.install(|| ensemble_run(&p, &psi, &config).unwrap());
        let b = multi.install(|| ensemble_run(&p, &psi, &config).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn guards() {
        let (p, psi, config) = setup();
        assert!(matches!(
            ensemble_run(&p, &psi, &EnsembleConfig { n_traj: 99, ..config }),
            Err(DynamicsError::TooFewTrajectories(99))
        ));
        assert!(matches!(
            ensemble_run(&p, &psi, &EnsembleConfig { max_standard_error: Some(1e-12), ..config }),
            Err(DynamicsError::NonConvergence { .. })
        ));
    }
}
