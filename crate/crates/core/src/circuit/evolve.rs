use alloc::vec::Vec;

use super::compile::{compile_step, TrotterSchedule};
use super::gate::circuit_unitary;
use crate::engine::{apply_dephasing, DensityMatrix, DephasingModel, QuantumState, Spectral};
use crate::model::{build_spin_hamiltonian, ModelParams};
use crate::{Error, Result};

/// Repeats the compiled step `n_steps` times and records the state at every
/// step boundary, the initial state included. With `noise`, the dephasing
/// channel acts once after each step's gates; it needs a density matrix.
pub fn trotter_evolve(
    params: &ModelParams,
    schedule: &TrotterSchedule,
    initial: &QuantumState,
    noise: Option<DephasingModel>,
) -> Result<Vec<QuantumState>> {
    let step = compile_step(params, schedule)?;
    if initial.n_sites() != params.n_sites {
        return Err(Error::DimensionMismatch {
            expected: 1 << params.n_sites,
            found: 1 << initial.n_sites(),
        });
    }
    let mut out = Vec::with_capacity(schedule.n_steps + 1);
    out.push(initial.clone());
    match initial {
        QuantumState::Pure(psi) => {
            if noise.is_some() {
                return Err(Error::InvalidParameter(
                    "dephasing needs a density-matrix state".into(),
                ));
            }
            let mut psi = psi.clone();
            for _ in 0..schedule.n_steps {
                psi = step.apply(&psi)?;
                out.push(QuantumState::Pure(psi.clone()));
            }
        }
        QuantumState::Mixed(rho) => {
            let u = circuit_unitary(&step)?;
            let ud = u.adjoint();
            let mut m = rho.matrix().clone();
            for _ in 0..schedule.n_steps {
                m = &u * m * &ud;
                let mut rho = DensityMatrix::from_matrix_unchecked(params.n_sites, m);
                if let Some(model) = noise {
                    rho = apply_dephasing(&rho, model);
                }
                out.push(QuantumState::Mixed(rho.clone()));
                m = rho.into_matrix();
            }
        }
    }
    Ok(out)
}

/// Exact evolution under the full spin Hamiltonian, sampled at `k·T` for
/// `k = 0..=n_steps`.
pub fn exact_series(
    params: &ModelParams,
    step_time: f64,
    n_steps: usize,
    initial: &QuantumState,
) -> Result<Vec<QuantumState>> {
    let spectral = Spectral::new(&build_spin_hamiltonian(params)?);
    (0..=n_steps)
        .map(|k| {
            let t = k as f64 * step_time;
            // Skip the round trip through the eigenbasis at t = 0.
            if t == 0.0 {
                return Ok(initial.clone());
            }
            Ok(match initial {
                QuantumState::Pure(psi) => QuantumState::Pure(spectral.evolve(psi, t)?),
                QuantumState::Mixed(rho) => QuantumState::Mixed(spectral.evolve_density(rho, t)?),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::PureState;
    use crate::operator::max_abs_diff;

    #[test]
    fn noiseless_density_path_matches_pure_path() {
        let p = ModelParams::new(4, 1.0, 1.0, 0.5).unwrap();
        let s = TrotterSchedule::new(0.25, 6).unwrap();
        let psi = PureState::from_basis_state(&p.vacuum()).unwrap();
        let pure = trotter_evolve(&p, &s, &psi.clone().into(), None).unwrap();
        let rho = psi.to_density().unwrap();
        let zero = DephasingModel::new(0.0).unwrap();
        let mixed = trotter_evolve(&p, &s, &rho.into(), Some(zero)).unwrap();
        assert_eq!(pure.len(), 7);
        for (a, b) in pure.iter().zip(&mixed) {
            let da = a.to_density().unwrap();
            let db = b.to_density().unwrap();
            assert!(max_abs_diff(da.matrix(), db.matrix()) < 1e-12);
        }
    }

    #[test]
    fn zero_steps_returns_only_initial_state() {
        let p = ModelParams::new(2, 1.0, 1.0, 0.5).unwrap();
        let s = TrotterSchedule::new(0.25, 0).unwrap();
        let psi: QuantumState = PureState::from_basis_state(&p.vacuum()).unwrap().into();
        assert_eq!(trotter_evolve(&p, &s, &psi, None).unwrap(), [psi.clone()]);
        assert_eq!(exact_series(&p, 0.25, 0, &psi).unwrap(), [psi]);
    }

    #[test]
    fn noise_on_pure_state_is_rejected() {
        let p = ModelParams::new(2, 1.0, 1.0, 0.5).unwrap();
        let s = TrotterSchedule::new(0.25, 1).unwrap();
        let psi: QuantumState = PureState::from_basis_state(&p.vacuum()).unwrap().into();
        let noise = DephasingModel::new(0.1).ok();
        assert!(trotter_evolve(&p, &s, &psi, noise).is_err());
    }
}
