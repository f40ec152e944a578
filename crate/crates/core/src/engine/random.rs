use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::{DensityMatrix, PureState};
use crate::operator::{dim_of, Matrix, Vector};
use crate::{Complex64, Error, Result, MAX_DENSITY_SITES, MAX_PURE_SITES};

fn entry(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Normalized state with independent uniform complex amplitudes.
pub fn random_pure_state(n_sites: usize, seed: u64) -> Result<PureState> {
    if n_sites > MAX_PURE_SITES {
        return Err(Error::SizeLimit {
            what: "pure states",
            max: MAX_PURE_SITES,
            sites: n_sites,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = Vector::from_fn(dim_of(n_sites), |_, _| entry(&mut rng));
    let norm = v.norm();
    PureState::new(n_sites, v.unscale(norm))
}

/// Full-rank density matrix `GG†/tr(GG†)` from a random complex `G`.
pub fn random_density_matrix(n_sites: usize, seed: u64) -> Result<DensityMatrix> {
    if n_sites > MAX_DENSITY_SITES {
        return Err(Error::SizeLimit {
            what: "density matrices",
            max: MAX_DENSITY_SITES,
            sites: n_sites,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = dim_of(n_sites);
    let g = Matrix::from_fn(dim, dim, |_, _| entry(&mut rng));
    let mut rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho.unscale_mut(tr);
    // Symmetrize away round-off before validation.
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(n_sites, rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_states_are_valid_and_seeded() {
        let a = random_density_matrix(3, 11).unwrap();
        assert!((a.trace().re - 1.0).abs() < 1e-12);
        assert!(a.min_eigenvalue() > 0.0);
        assert_eq!(a, random_density_matrix(3, 11).unwrap());
        let psi = random_pure_state(4, 2).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        assert_ne!(psi, random_pure_state(4, 3).unwrap());
        assert!(random_density_matrix(9, 0).is_err());
    }
}
