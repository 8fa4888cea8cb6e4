use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::DynamicsError;

/// SplitMix64 finaliser.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trajectory `index` in an ensemble:
/// splitmix64(master_seed ⊕ splitmix64(index)). Depends only on the pair,
/// never on scheduling.
pub fn trajectory_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(index))
}

/// Wiener increments ΔW ~ N(0, dt) for one spatial dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisePath {
    pub seed: u64,
    pub dt: f64,
    pub increments: Vec<f64>,
}

impl NoisePath {
    pub fn generate(seed: u64, dt: f64, n_steps: usize) -> Result<Self, DynamicsError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(DynamicsError::InvalidTimeStep(format!("dt = {dt}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sd = dt.sqrt();
        let increments = (0..n_steps)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                sd * z
            })
            .collect();
        Ok(Self { seed, dt, increments })
    }

    /// Zero path; evolution without noise.
    pub fn silent(dt: f64, n_steps: usize) -> Self {
        Self { seed: 0, dt, increments: vec![0.0; n_steps] }
    }

    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.len() as f64
    }

    /// Same Brownian path sampled `factor` times more coarsely.
    pub fn coarsen(&self, factor: usize) -> Self {
        assert!(factor > 0);
        Self {
            seed: self.seed,
            dt: self.dt * factor as f64,
            increments: self.increments.chunks(factor).map(|c| c.iter().sum()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reproducible_and_correct_moments() {
        let a = NoisePath::generate(17, 0.01, 200_000).unwrap();
        let b = NoisePath::generate(17, 0.01, 200_000).unwrap();
        assert_eq!(a, b);
        let n = a.len() as f64;
        let mean = a.increments.iter().sum::<f64>() / n;
        let var = a.increments.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        // standard errors: √(dt/n) for the mean, dt·√(2/n) for the variance
        assert!(mean.abs() < 4.0 * (0.01 / n).sqrt());
        assert!((var - 0.01).abs() < 4.0 * 0.01 * (2.0 / n).sqrt());
        let lag: f64 = a.increments.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n - 1.0);
        assert!(lag.abs() < 4.0 * 0.01 / n.sqrt());
    }

    #[test]
    fn coarsening_preserves_endpoint() {
        let a = NoisePath::generate(3, 1e-3, 64).unwrap();
        let c = a.coarsen(4);
        assert_eq!(c.len(), 16);
        assert!((c.increments.iter().sum::<f64>() - a.increments.iter().sum::<f64>()).abs() < 1e-14);
        assert_eq!(c.dt, 4e-3);
    }

    proptest! {
        #[test]
        fn seeds_differ_across_indices(master in any::<u64>(), i in 0u64..1_000_000) {
            prop_assert_ne!(trajectory_seed(master, i), trajectory_seed(master, i + 1));
        }
    }
}
