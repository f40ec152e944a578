use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::DensityMatrix;
use crate::{Error, Result};

/// Measures `ρ` in the computational basis `n_shots` times and returns the
/// count of each basis state. Reproducible for a given seed.
pub fn sample_shots(rho: &DensityMatrix, n_shots: usize, seed: u64) -> Result<Vec<u64>> {
    let mut counts = alloc::vec![0u64; rho.dim()];
    for i in sample_populations(&rho.populations(), n_shots, seed)? {
        counts[i] += 1;
    }
    Ok(counts)
}

/// Inverse-CDF sampling of outcome indices from a probability vector.
/// Tiny negative entries from round-off are clamped to zero.
pub fn sample_populations(populations: &[f64], n_shots: usize, seed: u64) -> Result<Vec<usize>> {
    if n_shots == 0 {
        return Err(Error::InvalidParameter("need at least one shot".into()));
    }
    if populations.is_empty() {
        return Err(Error::InvalidState("no outcomes to sample".into()));
    }
    let mut cdf = Vec::with_capacity(populations.len());
    let mut acc = 0.0;
    for &p in populations {
        if !p.is_finite() || p < -1e-9 {
            return Err(Error::InvalidState(alloc::format!(
                "invalid outcome probability {p}"
            )));
        }
        acc += p.max(0.0);
        cdf.push(acc);
    }
    if acc <= 0.0 {
        return Err(Error::InvalidState("probabilities sum to zero".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last = populations.len() - 1;
    Ok((0..n_shots)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * acc;
            cdf.partition_point(|&c| c <= u).min(last)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_shots() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let a = sample_shots(&rho, 200, 7).unwrap();
        let b = sample_shots(&rho, 200, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_shots(&rho, 200, 8).unwrap());
    }

    #[test]
    fn basis_state_gets_every_count() {
        let rho = DensityMatrix::basis(4, 5).unwrap();
        let counts = sample_shots(&rho, 100, 1).unwrap();
        assert_eq!(counts[5], 100);
        assert_eq!(counts.iter().sum::<u64>(), 100);
        assert!(sample_shots(&rho, 0, 1).is_err());
    }

    #[test]
    fn frequencies_follow_populations() {
        let shots = sample_populations(&[0.25, 0.0, 0.75], 20_000, 3).unwrap();
        let ones = shots.iter().filter(|&&i| i == 1).count();
        let twos = shots.iter().filter(|&&i| i == 2).count();
        assert_eq!(ones, 0);
        assert!((twos as f64 / 20_000.0 - 0.75).abs() < 0.02);
    }
}
