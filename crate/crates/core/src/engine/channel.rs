use num_complex::Complex64;

use super::state::{DensityMatrix, PureState};
use crate::operator::{site_bit, HermitianOperator};
use crate::{Error, Result};

/// Retention below which a state counts as entirely nonphysical.
pub const MIN_RETENTION: f64 = 1e-12;

/// Uncorrelated dephasing: each qubit suffers a phase flip with
/// probability `p` per evolution step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingModel {
    p: f64,
}

impl DephasingModel {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::InvalidParameter(alloc::format!(
                "phase flip probability must lie in [0, 0.5], got {p}"
            )));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// `ρ → (1 − p) ρ + p σᶻ ρ σᶻ` on one site.
pub fn apply_phase_flip(rho: &DensityMatrix, site: usize, p: f64) -> DensityMatrix {
    let n = rho.n_sites();
    let bit = site_bit(n, site);
    let damp = Complex64::new(1.0 - 2.0 * p, 0.0);
    let mut m = rho.matrix().clone();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            // σᶻ ρ σᶻ flips the sign exactly when the two indices disagree on the site.
            if (i ^ j) & bit != 0 {
                m[(i, j)] *= damp;
            }
        }
    }
    DensityMatrix::from_matrix_unchecked(n, m)
}

/// Composes the single-site phase-flip channels over sites `1..=N`.
pub fn apply_dephasing(rho: &DensityMatrix, model: DephasingModel) -> DensityMatrix {
    (1..=rho.n_sites()).fold(rho.clone(), |acc, site| apply_phase_flip(&acc, site, model.p))
}

fn check_projector(projector: &HermitianOperator, dim: usize) -> Result<()> {
    if projector.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: projector.dim(),
        });
    }
    if !projector.is_diagonal_projector() {
        return Err(Error::InvalidParameter(
            "post-selection needs a diagonal 0/1 projector".into(),
        ));
    }
    Ok(())
}

/// `ρ → PρP / tr(PρP)`, returning the retention `tr(PρP)` alongside.
pub fn postselect(rho: &DensityMatrix, projector: &HermitianOperator) -> Result<(DensityMatrix, f64)> {
    check_projector(projector, rho.dim())?;
    let keep = projector.diagonal();
    let retention: f64 = rho
        .populations()
        .iter()
        .zip(&keep)
        .map(|(p, k)| p * k)
        .sum();
    if retention < MIN_RETENTION {
        return Err(Error::ZeroSupport(retention));
    }
    let scale = 1.0 / retention;
    let mut m = rho.matrix().clone();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            m[(i, j)] *= keep[i] * keep[j] * scale;
        }
    }
    Ok((DensityMatrix::from_matrix_unchecked(rho.n_sites(), m), retention))
}

/// Pure-state post-selection `|ψ⟩ → P|ψ⟩ / ‖P|ψ⟩‖`.
pub fn postselect_pure(state: &PureState, projector: &HermitianOperator) -> Result<(PureState, f64)> {
    check_projector(projector, state.dim())?;
    let keep = projector.diagonal();
    let mut v = state.amplitudes().clone();
    for (a, k) in v.iter_mut().zip(&keep) {
        *a *= *k;
    }
    let retention = v.norm_squared();
    if retention < MIN_RETENTION {
        return Err(Error::ZeroSupport(retention));
    }
    v /= Complex64::new(libm::sqrt(retention), 0.0);
    Ok((PureState::from_vector_unchecked(state.n_sites(), v), retention))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{physical_projector, BasisState};
    use crate::operator::max_abs_diff;

    #[test]
    fn probability_outside_range_is_rejected() {
        assert!(DephasingModel::new(-0.1).is_err());
        assert!(DephasingModel::new(0.6).is_err());
        assert!(DephasingModel::new(0.5).is_ok());
    }

    #[test]
    fn complete_dephasing_kills_single_qubit_coherence() {
        let plus = PureState::new(
            1,
            crate::operator::Vector::from_element(2, Complex64::new(libm::sqrt(0.5), 0.0)),
        )
        .unwrap();
        let rho = plus.to_density().unwrap();
        let out = apply_dephasing(&rho, DephasingModel::new(0.5).unwrap());
        assert_eq!(out.matrix()[(0, 1)], Complex64::new(0.0, 0.0));
        assert_eq!(out.matrix()[(1, 0)], Complex64::new(0.0, 0.0));
        assert!((out.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_probability_and_diagonal_states_are_untouched() {
        let psi = PureState::new(
            2,
            crate::operator::Vector::from_element(4, Complex64::new(0.5, 0.0)),
        )
        .unwrap();
        let rho = psi.to_density().unwrap();
        let same = apply_dephasing(&rho, DephasingModel::new(0.0).unwrap());
        assert_eq!(same.matrix(), rho.matrix());
        let diag = DensityMatrix::maximally_mixed(3).unwrap();
        let out = apply_dephasing(&diag, DephasingModel::new(0.3).unwrap());
        assert!(max_abs_diff(out.matrix(), diag.matrix()) == 0.0);
    }

    #[test]
    fn postselection_examples() {
        let p = physical_projector(4).unwrap();
        let vac = DensityMatrix::basis(4, BasisState::vacuum(4).index()).unwrap();
        let (same, keep) = postselect(&vac, &p).unwrap();
        assert_eq!(keep, 1.0);
        assert_eq!(same.matrix(), vac.matrix());

        let bad: BasisState = "↓↓↑↓".parse().unwrap();
        let bad_rho = DensityMatrix::basis(4, bad.index()).unwrap();
        assert!(matches!(postselect(&bad_rho, &p), Err(Error::ZeroSupport(_))));

        let half = DensityMatrix::mixture(&[(0.5, &vac), (0.5, &bad_rho)]).unwrap();
        let (phys, keep) = postselect(&half, &p).unwrap();
        assert!((keep - 0.5).abs() < 1e-15);
        assert!(max_abs_diff(phys.matrix(), vac.matrix()) < 1e-15);
    }

    #[test]
    fn non_projector_is_rejected() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let h = HermitianOperator::identity(2).scaled(0.5);
        assert!(postselect(&rho, &h).is_err());
    }
}
