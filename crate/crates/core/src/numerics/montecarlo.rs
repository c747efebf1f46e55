//! Seeded Monte Carlo estimate of Gaussian-weighted plane integrals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_domain, Result};

pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub value: f64,
    /// sample standard deviation over `sqrt(n_samples)`
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Estimates `∫∫ g(p)·(κ²/π)·exp(-κ²|p|²) d²p` by sampling `p` from the
/// weight itself, an isotropic normal law with per-axis deviation
/// `1/(sqrt(2)·κ)`.
///
/// The sample stream depends only on `seed`, so results are reproducible.
pub fn mc_integrate<G: FnMut(f64, f64) -> f64>(
    mut g: G,
    kappa: f64,
    n_samples: usize,
    seed: u64,
) -> Result<McResult> {
    check_domain(
        "kappa",
        kappa,
        kappa.is_finite() && kappa > 0.0,
        "0 < kappa",
    )?;
    check_domain(
        "n_samples",
        n_samples as f64,
        n_samples >= MIN_SAMPLES,
        ">= 1000",
    )?;
    let sigma = std::f64::consts::FRAC_1_SQRT_2 / kappa;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (mut mean, mut m2) = (0.0, 0.0);
    for i in 0..n_samples {
        let p1: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
        let p2: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
        let y = g(p1, p2);
        let delta = y - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (y - mean);
    }
    let variance = m2 / (n_samples - 1) as f64;
    Ok(McResult {
        value: mean,
        std_error: (variance / n_samples as f64).sqrt(),
        n_samples,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_sample_counts() {
        assert!(mc_integrate(|_, _| 1.0, 1.0, 999, 0).is_err());
        assert!(mc_integrate(|_, _| 1.0, 0.0, 5000, 0).is_err());
    }

    #[test]
    fn same_seed_same_stream() {
        let a = mc_integrate(|x, y| x * x + y, 0.5, 2000, 42).unwrap();
        let b = mc_integrate(|x, y| x * x + y, 0.5, 2000, 42).unwrap();
        let c = mc_integrate(|x, y| x * x + y, 0.5, 2000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn constant_has_zero_error() {
        let r = mc_integrate(|_, _| 3.0, 2.0, 1000, 7).unwrap();
        assert!((r.value - 3.0).abs() < 1e-15);
        assert!(r.std_error < 1e-15);
    }

    #[test]
    fn second_moment_within_four_sigma() {
        let kappa: f64 = 0.3;
        let r = mc_integrate(|x, _| x * x, kappa, 200_000, 11).unwrap();
        let exact = 1.0 / (2.0 * kappa * kappa);
        assert!((r.value - exact).abs() < 4.0 * r.std_error);
    }
}
