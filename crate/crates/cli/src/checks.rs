//! Fast invariant suite run by `schwinger check`.
//!
//! Every check is a plain function returning a [`CheckOutcome`], so tests
//! can call them directly and inject faults, e.g. a perturbed coupling
//! matrix.

use std::f64::consts::PI;

use schwinger_core::circuit::{
    average_zz_hamiltonian, basis_rotation, circuit_unitary, compile_section,
    hopping_pair_hamiltonian, local_rotation_symbols, ms_hamiltonian, msz_window_hamiltonian,
    parse_pulse_program, pulses_to_circuit, section_target, Bindings, Item, PulseProgram,
    Section, TrotterSchedule,
};
use schwinger_core::engine::{
    apply_dephasing, random_density_matrix, DephasingModel, PureState, Spectral,
};
use schwinger_core::model::{
    build_spin_hamiltonian, physical_projector, split_with_couplings, CouplingMatrix,
    ModelParams,
};
use schwinger_core::operator::{max_abs_diff, pauli_product, HermitianOperator, Matrix, Pauli};
use schwinger_core::{Complex64, Result};

/// The Table I pulse program for four sites and four Trotter steps.
pub const TABLE1_FIXTURE: &str = include_str!("../fixtures/table1.pulse");

/// Expected fixture shape: preparation, four identical steps, final recoupling.
pub const FIXTURE_PREP: usize = 12;
pub const FIXTURE_STEP: usize = 51;
pub const FIXTURE_STEPS: usize = 4;
pub const FIXTURE_FINAL: usize = 6;
pub const FIXTURE_TOTAL: usize = FIXTURE_PREP + FIXTURE_STEP * FIXTURE_STEPS + FIXTURE_FINAL;

const STEP_MARKER: &str = "% EVOLUTION STEP";
const FINAL_MARKER: &str = "% FINAL";

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn from_residual(name: &'static str, residual: f64, tol: f64, what: &str) -> Self {
        Self {
            name,
            passed: residual < tol,
            detail: format!("{what}: max residual {residual:.3e} (tolerance {tol:e})"),
        }
    }

    fn failed(name: &'static str, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed: false,
            detail: detail.into(),
        }
    }
}

fn guard(name: &'static str, f: impl FnOnce() -> Result<CheckOutcome>) -> CheckOutcome {
    f().unwrap_or_else(|e| CheckOutcome::failed(name, format!("error: {e}")))
}

/// Largest entry of `a − (tr a / d)·1`: zero iff `a` is a multiple of the
/// identity.
pub fn non_identity_residual(a: &Matrix) -> f64 {
    let d = a.nrows();
    let shift = a.trace() / Complex64::new(d as f64, 0.0);
    max_abs_diff(a, &(Matrix::identity(d, d) * shift))
}

/// `Ĥ_S − (Ĥ_ZZ + Ĥ_± + Ĥ_Z)` is a multiple of the identity, with
/// `Ĥ_ZZ` built from `couplings`. Returns the residual.
pub fn split_residual(params: &ModelParams, couplings: &CouplingMatrix) -> Result<f64> {
    let full = build_spin_hamiltonian(params)?;
    let split = split_with_couplings(params, couplings)?.total();
    Ok(non_identity_residual((&full - &split).matrix()))
}

fn check_params(n: usize) -> Result<ModelParams> {
    ModelParams::new(n, 1.0, 0.7, 0.45)
}

pub fn split_consistency() -> CheckOutcome {
    split_consistency_with(|_| {})
}

/// Split consistency for N = 2, 4, 6, 8 after `perturb` edits each
/// coupling matrix; the identity form is a no-op.
pub fn split_consistency_with(perturb: impl Fn(&mut CouplingMatrix)) -> CheckOutcome {
    const NAME: &str = "split consistency";
    guard(NAME, || {
        let mut worst: f64 = 0.0;
        for n in [2, 4, 6, 8] {
            let params = check_params(n)?;
            let mut c = CouplingMatrix::new(n, params.j);
            perturb(&mut c);
            worst = worst.max(split_residual(&params, &c)?);
        }
        Ok(CheckOutcome::from_residual(NAME, worst, 1e-12, "N = 2, 4, 6, 8"))
    })
}

/// `½(Ĥ_MSX⁽ⁱʲ⁾ + U†Ĥ_MSX⁽ⁱʲ⁾U) − J₀(σ⁺ᵢσ⁻ⱼ + h.c.)` over all pairs of an
/// `N`-site chain, `U = exp(iπ/4 (σᶻᵢ + σᶻⱼ))`.
pub fn pair_gate_residual(n: usize, j0: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 1..=n {
        for j in i + 1..=n {
            let pair = schwinger_core::circuit::QubitMask::from_sites(&[i, j]);
            let msx = ms_hamiltonian(n, pair, j0, 0.0);
            let zsum = HermitianOperator::new(
                n,
                pauli_product(n, &[(i, Pauli::Z)]) + pauli_product(n, &[(j, Pauli::Z)]),
            )?;
            let u = Spectral::new(&zsum).unitary(-PI / 4.0);
            let conj = u.adjoint() * msx.matrix() * &u;
            let lhs = (msx.matrix() + conj) * Complex64::new(0.5, 0.0);
            let rhs = hopping_pair_hamiltonian(n, i, j, j0);
            worst = worst.max(max_abs_diff(&lhs, rhs.matrix()));
        }
    }
    Ok(worst)
}

/// `R(y) Ĥ_MSX R†(y) − Ĥ_MSZ` with `R(y) = exp(iπ/4 Σσʸ)`.
pub fn basis_rotation_residual(n: usize, j0: f64) -> f64 {
    let all = schwinger_core::circuit::QubitMask::all(n);
    let r = basis_rotation(n, all);
    let rotated = &r * ms_hamiltonian(n, all, j0, 0.0).matrix() * r.adjoint();
    max_abs_diff(&rotated, msz_window_hamiltonian(n, all, j0).matrix())
}

pub fn pair_gate_identities() -> CheckOutcome {
    const NAME: &str = "pair-gate and basis-rotation identities";
    guard(NAME, || {
        let mut worst: f64 = 0.0;
        for n in 2..=6 {
            for j0 in [1.0, 0.37] {
                worst = worst
                    .max(pair_gate_residual(n, j0)?)
                    .max(basis_rotation_residual(n, j0));
            }
        }
        Ok(CheckOutcome::from_residual(NAME, worst, 1e-12, "N = 2..6"))
    })
}

/// Section-I circuit against `exp(−iĤ_ZZ T)`, and the time-averaged
/// window Hamiltonian against `(2/(N−2))(J₀/J) Ĥ_ZZ`.
pub fn section_one_residuals(n: usize, j: f64, j0: f64, step_time: f64) -> Result<(f64, f64)> {
    let params = ModelParams {
        n_sites: n,
        w: 1.0,
        j,
        m: 0.3,
        epsilon0: 0,
    };
    let schedule = TrotterSchedule::new(step_time, 1)?.with_j0(j0);
    let circuit = compile_section(&params, &schedule, Section::Zz)?;
    let exact = max_abs_diff(
        &circuit_unitary(&circuit)?,
        &section_target(&params, &schedule, Section::Zz)?,
    );
    let average = average_zz_hamiltonian(n, j0)?;
    let hzz = CouplingMatrix::new(n, j).to_operator();
    let scaled = hzz.scaled(2.0 / (n as f64 - 2.0) * j0 / j);
    Ok((exact, max_abs_diff(average.matrix(), scaled.matrix())))
}

pub fn section_one_exactness() -> CheckOutcome {
    const NAME: &str = "section I exactness";
    guard(NAME, || {
        let mut worst: f64 = 0.0;
        for n in 3..=8 {
            let (a, b) = section_one_residuals(n, 0.8, 1.3, 0.4)?;
            worst = worst.max(a).max(b);
        }
        Ok(CheckOutcome::from_residual(NAME, worst, 1e-11, "N = 3..8"))
    })
}

/// Largest `|tr(P E(ρ) P) − tr(PρP)|` over `samples` random 4-site states.
pub fn channel_projector_residual(p: f64, samples: u64) -> Result<f64> {
    let n = 4;
    let proj = physical_projector(n)?;
    let model = DephasingModel::new(p)?;
    let mut worst: f64 = 0.0;
    for seed in 0..samples {
        let rho = random_density_matrix(n, seed)?;
        let weight = |m: &Matrix| (proj.matrix() * m * proj.matrix()).trace().re;
        let before = weight(rho.matrix());
        let after = weight(apply_dephasing(&rho, model).matrix());
        worst = worst.max((after - before).abs());
    }
    Ok(worst)
}

pub fn channel_projector_compatibility() -> CheckOutcome {
    const NAME: &str = "channel-projector compatibility";
    guard(NAME, || {
        let worst = [0.031, 0.038]
            .into_iter()
            .map(|p| channel_projector_residual(p, 16))
            .try_fold(0.0f64, |acc, r| Ok::<_, schwinger_core::Error>(acc.max(r?)))?;
        Ok(CheckOutcome::from_residual(NAME, worst, 1e-12, "p = 0.031, 0.038"))
    })
}

/// Pulse counts per fixture segment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureShape {
    pub total: usize,
    pub prep: usize,
    pub steps: Vec<usize>,
    pub final_pulses: usize,
    pub crosstalk: usize,
}

impl FixtureShape {
    pub fn of(program: &PulseProgram) -> Self {
        #[derive(PartialEq)]
        enum Seg {
            Prep,
            Step,
            Final,
        }
        let mut seg = Seg::Prep;
        let mut shape = FixtureShape {
            total: program.pulse_count(),
            prep: 0,
            steps: Vec::new(),
            final_pulses: 0,
            crosstalk: program.crosstalk_count(),
        };
        for item in &program.items {
            match item {
                Item::Comment(c) if c.starts_with(STEP_MARKER) => {
                    seg = Seg::Step;
                    shape.steps.push(0);
                }
                Item::Comment(c) if c.starts_with(FINAL_MARKER) => seg = Seg::Final,
                Item::Comment(_) => {}
                Item::Pulse(_) => match seg {
                    Seg::Prep => shape.prep += 1,
                    Seg::Step => *shape.steps.last_mut().expect("step started") += 1,
                    Seg::Final => shape.final_pulses += 1,
                },
            }
        }
        shape
    }

    pub fn is_expected(&self) -> bool {
        self.total == FIXTURE_TOTAL
            && self.prep == FIXTURE_PREP
            && self.steps == [FIXTURE_STEP; FIXTURE_STEPS]
            && self.final_pulses == FIXTURE_FINAL
    }

    /// `12 + 51 + 51 + 51 + 51 + 6`.
    pub fn decomposition(&self) -> String {
        let mut parts = vec![self.prep.to_string()];
        parts.extend(self.steps.iter().map(|s| s.to_string()));
        parts.push(self.final_pulses.to_string());
        parts.join(" + ")
    }
}

pub fn fixture_pulse_count(text: &str) -> CheckOutcome {
    const NAME: &str = "Table I pulse count";
    guard(NAME, || {
        let shape = FixtureShape::of(&parse_pulse_program(text, 4)?);
        let expected = format!(
            "expected {FIXTURE_TOTAL} = {FIXTURE_PREP} + {FIXTURE_STEP} x {FIXTURE_STEPS} + {FIXTURE_FINAL}"
        );
        Ok(CheckOutcome {
            name: NAME,
            passed: shape.is_expected(),
            detail: format!(
                "found {} pulses ({}), {expected}; {} crosstalk corrections",
                shape.total,
                shape.decomposition(),
                shape.crosstalk
            ),
        })
    })
}

/// Bindings used to evaluate the fixture: `w = J = 1`, so one MS pulse of
/// angle `Δt` realizes exactly one step of length `T = Δt`.
pub fn fixture_bindings(m: f64, step_time: f64) -> Bindings {
    [("m", m), ("J", 1.0), ("w", 1.0), ("Delta_t", step_time)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

/// Distance, up to global phase, between the lowered fixture applied to
/// `|↓↓↓↓⟩` and the reference: vacuum, then per step the pair hopping
/// exponentials for (1,2), (3,4), (2,3), the shifted local fields and the
/// long-range couplings.
pub fn fixture_dynamics_residual(text: &str, m: f64, step_time: f64) -> Result<f64> {
    let n = 4;
    let program = parse_pulse_program(text, n)?;
    let lowered = pulses_to_circuit(&program, &fixture_bindings(m, step_time))?;
    let all_down = PureState::basis(n, (1 << n) - 1)?;
    let got = lowered.circuit.apply(&all_down)?;

    let params = ModelParams::new(n, 1.0, 1.0, m)?;
    let schedule = TrotterSchedule::new(step_time, 1)?;
    let pair = |i, j| Spectral::new(&hopping_pair_hamiltonian(n, i, j, 1.0)).unitary(step_time);
    let step = section_target(&params, &schedule, Section::Zz)?
        * section_target(&params, &schedule, Section::Local)?
        * pair(2, 3)
        * pair(3, 4)
        * pair(1, 2);
    let mut v = PureState::from_basis_state(&params.vacuum())?.into_amplitudes();
    for _ in 0..FIXTURE_STEPS {
        v = &step * v;
    }
    Ok(got.phase_insensitive_distance(&PureState::new(n, v)?))
}

pub fn fixture_dynamics(text: &str) -> CheckOutcome {
    const NAME: &str = "Table I dynamics";
    guard(NAME, || {
        let mut worst: f64 = 0.0;
        for (m, t) in [(0.5, 0.25), (1.3, 0.1)] {
            worst = worst.max(fixture_dynamics_residual(text, m, t)?);
        }
        Ok(CheckOutcome::from_residual(
            NAME,
            worst,
            1e-10,
            "lowered fixture vs exact per-term product",
        ))
    })
}

/// Section-III angles for four sites, as printed in the pulse program.
pub fn table1_local_angles() -> CheckOutcome {
    const NAME: &str = "Table I local angles";
    // Pulse angles are the negated gate angles.
    let got: Vec<String> = local_rotation_symbols(4, true)
        .into_iter()
        .map(|s| (-s).to_string())
        .collect();
    let expected = ["(2m+2J)Delta_t", "J Delta_t", "(2m+J)Delta_t", "0"];
    CheckOutcome {
        name: NAME,
        passed: got == expected,
        detail: format!("got {got:?}, expected {expected:?}"),
    }
}

/// The whole suite, against the given fixture text.
pub fn run_all(fixture: &str) -> Vec<CheckOutcome> {
    vec![
        split_consistency(),
        pair_gate_identities(),
        section_one_exactness(),
        channel_projector_compatibility(),
        table1_local_angles(),
        fixture_pulse_count(fixture),
        fixture_dynamics(fixture),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pristine_suite_passes() {
        for c in run_all(TABLE1_FIXTURE) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn fixture_shape_is_locked() {
        let shape = FixtureShape::of(&parse_pulse_program(TABLE1_FIXTURE, 4).unwrap());
        assert_eq!(shape.decomposition(), "12 + 51 + 51 + 51 + 51 + 6");
        assert_eq!(shape.total, 222);
    }
}
