//! Comparisons against closed-form results derived independently of the
//! implementation.

use schwinger_core::circuit::{exact_series, trotter_evolve, TrotterSchedule};
use schwinger_core::engine::{
    sample_shots, DensityMatrix, DephasingModel, PureState, QuantumState, Spectral,
};
use schwinger_core::model::{build_spin_hamiltonian, BasisState, ModelParams};
use schwinger_core::observables::{
    dominant_frequency, negativities_pure, particle_number_density, particle_number_operator,
    spectral_lines, vacuum_persistence,
};

/// Two sites: the charge-zero block is `[[−m, w], [w, m + J]]` on
/// (vacuum, pair), so the pair population oscillates with
/// `Ω = sqrt((m + J/2)² + w²)`.
fn two_site_pair_probability(w: f64, j: f64, m: f64, t: f64) -> f64 {
    let omega = ((m + j / 2.0).powi(2) + w * w).sqrt();
    (w / omega).powi(2) * (omega * t).sin().powi(2)
}

#[test]
fn two_site_rabi_oscillation() {
    for (w, j, m) in [(1.0, 1.0, 0.5), (0.7, 0.0, 0.0), (1.0, 2.0, 1.3)] {
        let p = ModelParams::new(2, w, j, m).unwrap();
        let vac = PureState::from_basis_state(&p.vacuum()).unwrap();
        let states = exact_series(&p, 0.13, 40, &vac.into()).unwrap();
        for (k, s) in states.iter().enumerate() {
            let t = 0.13 * k as f64;
            let expected = two_site_pair_probability(w, j, m, t);
            // For two sites, one pair fills both sites: ν = P(pair).
            assert!((particle_number_density(s) - expected).abs() < 1e-12);
            let g2 = vacuum_persistence(s, p.vacuum().index()).g2;
            assert!((g2 - (1.0 - expected)).abs() < 1e-12);
        }
    }
}

#[test]
fn two_site_negativity() {
    // a|↑↓⟩ + b|↓↑⟩ has negativity |ab| across the middle.
    let p = ModelParams::new(2, 1.0, 1.0, 0.5).unwrap();
    let vac = PureState::from_basis_state(&p.vacuum()).unwrap();
    for s in exact_series(&p, 0.21, 20, &vac.into()).unwrap() {
        let psi = s.as_pure().unwrap();
        let a = psi.amplitudes()[1].norm();
        let b = psi.amplitudes()[2].norm();
        let neg = negativities_pure(psi, 1).unwrap();
        assert!((neg.negativity - a * b).abs() < 1e-12);
        assert!((neg.log_negativity - (2.0 * a * b + 1.0).log2()).abs() < 1e-12);
    }
}

#[test]
fn two_site_frequency() {
    // ν(t) = (w/Ω)² sin²(Ωt) oscillates at 2Ω.
    let (w, j, m) = (1.0, 1.0, 0.5);
    let p = ModelParams::new(2, w, j, m).unwrap();
    let h = build_spin_hamiltonian(&p).unwrap();
    let vac = PureState::from_basis_state(&p.vacuum()).unwrap();
    let lines = spectral_lines(&h, &vac, &particle_number_operator(2)).unwrap();
    let omega = ((m + j / 2.0_f64).powi(2) + w * w).sqrt();
    assert_eq!(lines.len(), 1);
    assert!((dominant_frequency(&lines).unwrap() - 2.0 * omega).abs() < 1e-12);
    assert!((lines[0].amplitude - 0.5 * (w / omega).powi(2)).abs() < 1e-12);
}

#[test]
fn short_time_particle_density_is_quadratic() {
    // Second order: ν ≈ (2(N−1)/N)(wt)², every link creates pairs at rate w.
    for n in [4, 6, 8] {
        let p = ModelParams::new(n, 1.0, 1.0, 0.5).unwrap();
        let vac = PureState::from_basis_state(&p.vacuum()).unwrap();
        let s = Spectral::new(&build_spin_hamiltonian(&p).unwrap());
        for wt in [0.005, 0.02, 0.05] {
            let nu = particle_number_density(&s.evolve(&vac, wt).unwrap().into());
            let expected = 2.0 * (n as f64 - 1.0) / n as f64 * wt * wt;
            assert!((nu / expected - 1.0).abs() < 0.05, "N={n} wt={wt}: {nu} vs {expected}");
        }
    }
}

#[test]
fn trotter_and_noise_limits() {
    let p = ModelParams::new(4, 1.0, 1.0, 0.5).unwrap();
    let vac = PureState::from_basis_state(&p.vacuum()).unwrap();
    let schedule = TrotterSchedule::new(0.2, 5).unwrap();
    let pure = trotter_evolve(&p, &schedule, &vac.clone().into(), None).unwrap();
    let rho0: QuantumState = DensityMatrix::pure(&vac).unwrap().into();
    let noiseless =
        trotter_evolve(&p, &schedule, &rho0, Some(DephasingModel::new(0.0).unwrap())).unwrap();
    for (a, b) in pure.iter().zip(&noiseless) {
        let da = a.to_density().unwrap();
        let db = b.to_density().unwrap();
        assert!((da.matrix() - db.matrix()).norm() < 1e-10);
    }
    // Full dephasing leaves a diagonal state after every step.
    let dephased =
        trotter_evolve(&p, &schedule, &rho0, Some(DephasingModel::new(0.5).unwrap())).unwrap();
    let last = dephased.last().unwrap().to_density().unwrap();
    let m = last.matrix();
    for i in 0..16 {
        for j in 0..16 {
            if i != j {
                assert!(m[(i, j)].norm() < 1e-15);
            }
        }
    }
    // Noise on a state vector is rejected.
    assert!(trotter_evolve(&p, &schedule, &vac.into(), Some(DephasingModel::new(0.1).unwrap())).is_err());
}

#[test]
fn shot_counts_follow_the_uniform_distribution() {
    // Chi-square with 7 degrees of freedom; 24.32 is the 0.1% critical value.
    let rho = DensityMatrix::maximally_mixed(3).unwrap();
    let shots = 8000;
    for seed in 0..5 {
        let counts = sample_shots(&rho, shots, seed).unwrap();
        assert_eq!(counts.iter().sum::<u64>(), shots as u64);
        let expected = shots as f64 / 8.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 24.32, "seed {seed}: chi2 = {chi2}");
    }
}

#[test]
fn vacuum_is_the_staggered_state() {
    let p = ModelParams::new(4, 1.0, 1.0, 0.5).unwrap();
    assert_eq!(p.vacuum().index(), 0b0101);
    assert_eq!(p.vacuum().to_string(), "↑↓↑↓");
    assert_ne!(BasisState::from_index(4, 13).charge(), 0);
}
