//! Spiked covariance model with a planted sparse direction.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SpcaError};
use crate::instance::{Instance, Source};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikedModel {
    pub p: usize,
    pub n: usize,
    pub sigma_snr: f64,
    pub seed: u64,
}

impl Default for SpikedModel {
    fn default() -> Self {
        Self {
            p: 150,
            n: 150,
            sigma_snr: 2.0,
            seed: 0,
        }
    }
}

/// Length of the flat block and of the decaying block of the planted vector.
fn pattern(p: usize) -> (usize, usize) {
    if p >= 101 {
        (50, 50)
    } else {
        (p / 3, p / 3)
    }
}

/// Planted direction: ones, then `1/j` for `j = 1, 2, …`, then zeros.
pub fn spike_vector(p: usize) -> DVector<f64> {
    let (flat, decay) = pattern(p);
    DVector::from_fn(p, |i, _| {
        if i < flat {
            1.0
        } else if i < flat + decay {
            1.0 / (i + 1 - flat) as f64
        } else {
            0.0
        }
    })
}

/// `Σ = UᵀU/n + (σ/‖v‖²) vvᵀ` with uniform `U`, and the support of `v`.
pub fn generate_spiked(model: &SpikedModel) -> Result<(Instance, Vec<bool>)> {
    if model.p < 3 || model.n == 0 {
        return Err(SpcaError::Validation(format!(
            "spiked model needs p ≥ 3 and n ≥ 1 (got p = {}, n = {})",
            model.p, model.n
        )));
    }
    if !(model.sigma_snr >= 0.0) {
        return Err(SpcaError::Validation("signal-to-noise ratio must be nonnegative".into()));
    }
    let (p, n) = (model.p, model.n);
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let mut u = DMatrix::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            u[(i, j)] = rng.gen::<f64>();
        }
    }
    let v = spike_vector(p);
    let mut sigma = u.transpose() * &u / n as f64;
    sigma += (model.sigma_snr / v.norm_squared()) * &v * v.transpose();
    let mask = v.iter().map(|&a| a != 0.0).collect();
    let name = format!("spiked-p{}-n{}-snr{}-seed{}", p, n, model.sigma_snr, model.seed);
    Ok((Instance::new(name, Source::RawCovariance, sigma)?, mask))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spike_norm_at_default_size() {
        let v = spike_vector(150);
        let basel: f64 = (1..=50).map(|j| 1.0 / (j * j) as f64).sum();
        assert!((v.norm_squared() - (50.0 + basel)).abs() < 1e-12);
        assert!((v.norm_squared() - 51.6251).abs() < 1e-4);
        assert_eq!(v.iter().filter(|&&a| a != 0.0).count(), 100);
    }

    #[test]
    fn small_sizes_use_thirds() {
        let v = spike_vector(60);
        assert_eq!(v[19], 1.0);
        assert_eq!(v[20], 1.0);
        assert_eq!(v[21], 0.5);
        assert_eq!(v[39], 1.0 / 20.0);
        assert_eq!(v[40], 0.0);
    }

    #[test]
    fn zero_snr_is_pure_noise_with_mask() {
        let m = SpikedModel { p: 30, n: 40, sigma_snr: 0.0, seed: 3 };
        let (inst, mask) = generate_spiked(&m).unwrap();
        assert_eq!(mask.iter().filter(|&&b| b).count(), 20);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut raw = DMatrix::zeros(40, 30);
        for i in 0..40 {
            for j in 0..30 {
                raw[(i, j)] = rng.gen::<f64>();
            }
        }
        let expect = raw.transpose() * &raw / 40.0;
        assert!((inst.sigma() - expect).amax() < 1e-14);
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let m = SpikedModel { p: 60, n: 60, sigma_snr: 2.0, seed: 11 };
        let (a, _) = generate_spiked(&m).unwrap();
        let (b, _) = generate_spiked(&m).unwrap();
        assert_eq!(a.sigma(), b.sigma());
        let (c, _) = generate_spiked(&SpikedModel { seed: 12, ..m }).unwrap();
        assert_ne!(a.sigma(), c.sigma());
    }
}
