//! Additive white Gaussian noise attack channel.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::num::Real;

/// AWGN channel with a seed-determined noise stream. Two channels built
/// with the same `(sigma, seed)` produce identical output sequences; one
/// instance per worker keeps parallel sweeps reproducible.
#[derive(Debug, Clone)]
pub struct AwgnChannel<F> {
    sigma: F,
    seed: u64,
    rng: ChaCha12Rng,
}

impl<F: Real> AwgnChannel<F> {
    pub fn new(sigma: F, seed: u64) -> Result<Self> {
        if !(sigma >= F::zero()) || !sigma.is_finite() {
            return Err(Error::invalid("noise deviation must be >= 0 and finite"));
        }
        Ok(AwgnChannel {
            sigma,
            seed,
            rng: ChaCha12Rng::seed_from_u64(seed),
        })
    }

    pub fn sigma(&self) -> F {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Draws one noise vector of length `n` (i.i.d. `N(0, σ²)` entries).
    pub fn noise(&mut self, n: usize) -> Vec<F> {
        (0..n)
            .map(|_| {
                let g: f64 = StandardNormal.sample(&mut self.rng);
                self.sigma * crate::num::real(g)
            })
            .collect()
    }

    /// Returns `x + n` with fresh noise.
    pub fn apply(&mut self, x: &[F]) -> Vec<F> {
        let noise = self.noise(x.len());
        x.iter().zip(&noise).map(|(&xi, &ni)| xi + ni).collect()
    }
}

/// Noise deviation for a target SNR against a known host power:
/// `σ = sqrt(P / 10^(SNR/10))`.
pub fn snr_to_sigma<F: Real>(snr_db: F, host_power: F) -> Result<F> {
    if !(host_power > F::zero()) || !host_power.is_finite() {
        return Err(Error::invalid("host power must be positive"));
    }
    let ten = crate::num::real::<F>(10.0);
    let ratio = ten.powf(snr_db / ten);
    Ok((host_power / ratio).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sigma_is_identity() {
        let mut ch = AwgnChannel::<f64>::new(0.0, 1).unwrap();
        let x = vec![1.0, -2.5, 3e4];
        assert_eq!(ch.apply(&x), x);
    }

    #[test]
    fn negative_sigma_is_rejected() {
        assert!(AwgnChannel::<f64>::new(-1.0, 1).is_err());
        assert!(AwgnChannel::<f64>::new(f64::NAN, 1).is_err());
    }

    #[test]
    fn same_seed_reproduces_the_stream() {
        let x = vec![0.0; 256];
        let mut a = AwgnChannel::<f64>::new(3.0, 42).unwrap();
        let mut b = AwgnChannel::<f64>::new(3.0, 42).unwrap();
        assert_eq!(a.apply(&x), b.apply(&x));
        let mut c = AwgnChannel::<f64>::new(3.0, 43).unwrap();
        assert_ne!(a.apply(&x), c.apply(&x));
    }

    #[test]
    fn sample_moments_match_sigma() {
        let sigma = 2.5;
        let mut ch = AwgnChannel::<f64>::new(sigma, 7).unwrap();
        let n = 1_000_000;
        let noise = ch.noise(n);
        let mean = noise.iter().sum::<f64>() / n as f64;
        let var = noise.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01 * sigma, "mean {mean}");
        let rel = (var - sigma * sigma).abs() / (sigma * sigma);
        assert!(rel < 0.01, "variance off by {rel}");
    }

    #[test]
    fn snr_conversion_examples() {
        assert_eq!(snr_to_sigma(0.0f64, 1.0).unwrap(), 1.0);
        assert!((snr_to_sigma(20.0f64, 1.0).unwrap() - 0.1).abs() < 1e-15);
        assert!(snr_to_sigma(10.0f64, 0.0).is_err());
        assert!(snr_to_sigma(10.0f64, -4.0).is_err());
    }
}
