//! Trotter-step compiler.
//!
//! One step is three sections, each built from native gates:
//!
//! - **I** (`Ĥ_ZZ`): `N − 2` windows. Window `n` hides sites `n+2..=N` and
//!   applies an MS gate rotated to the `z` axis by collective `R` pulses.
//!   Site pair `(i, j)` with `i < j` is active in `N − j` windows, which
//!   reproduces the linearly decaying couplings with a single angle `J·T`.
//! - **II** (`Ĥ_±`): `N − 1` windows, one per neighboring pair. An MS gate
//!   generates `σˣσˣ`; conjugating a second one by addressed `Z` rotations
//!   turns it into `σʸσʸ`, and the sum is the hopping term.
//! - **III** (`Ĥ_Z`): one addressed `Z` rotation per site.

use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;
use core::str::FromStr;

use alloc::vec::Vec;

use super::angle::{Angle, SymbolicAngle};
use super::gate::{Circuit, Gate, QubitMask, Window};
use crate::engine::Spectral;
use crate::model::{local_field_coefficients, z_field_operator, CouplingMatrix, ModelParams};
use crate::operator::{dim_of, pauli_product, HermitianOperator, Matrix, Pauli};
use crate::{Complex64, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Section {
    /// Long-range `σᶻσᶻ` couplings, section I.
    Zz,
    /// Nearest-neighbor hopping, section II.
    Hopping,
    /// Local `σᶻ` fields, section III.
    Local,
}

impl Section {
    pub const ALL: [Section; 3] = [Section::Zz, Section::Hopping, Section::Local];

    /// Roman numeral used in the step diagrams.
    pub fn label(self) -> &'static str {
        match self {
            Section::Zz => "I",
            Section::Hopping => "II",
            Section::Local => "III",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Section::Zz => "ZZ",
            Section::Hopping => "PM",
            Section::Local => "Z",
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Section {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ZZ" | "zz" | "I" => Ok(Section::Zz),
            "PM" | "pm" | "+-" | "±" | "II" => Ok(Section::Hopping),
            "Z" | "z" | "III" => Ok(Section::Local),
            other => Err(Error::InvalidParameter(alloc::format!(
                "unknown section {other:?}, expected ZZ, PM or Z"
            ))),
        }
    }
}

/// How each hopping window generates `σˣσˣ + σʸσʸ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HoppingStyle {
    /// `U, MS(0), U†, MS(0)` with `U = exp(i(π/4)(σᶻᵢ + σᶻⱼ))`.
    #[default]
    Conjugated,
    /// `MS(0), MS(π/2)`: the phase is changed instead of conjugating.
    PhaseShifted,
}

impl FromStr for HoppingStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "conjugated" => Ok(HoppingStyle::Conjugated),
            "phase-shifted" | "phase_shifted" => Ok(HoppingStyle::PhaseShifted),
            other => Err(Error::InvalidParameter(alloc::format!(
                "unknown hopping style {other:?}, expected conjugated or phase-shifted"
            ))),
        }
    }
}

/// Time discretization and compiler options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterSchedule {
    /// Simulated time `T` per step.
    pub step_time: f64,
    pub n_steps: usize,
    /// Base entangling strength `J₀` of the MS interaction.
    pub j0: f64,
    pub section_order: [Section; 3],
    /// Shift the local fields by a multiple of `Σσᶻ` so that site `N`
    /// needs no rotation.
    pub z_shift: bool,
    pub hopping_style: HoppingStyle,
}

impl TrotterSchedule {
    /// Section order used by default: hopping, local, long-range.
    pub const DEFAULT_ORDER: [Section; 3] = [Section::Hopping, Section::Local, Section::Zz];

    pub fn new(step_time: f64, n_steps: usize) -> Result<Self> {
        let s = Self {
            step_time,
            n_steps,
            j0: 1.0,
            section_order: Self::DEFAULT_ORDER,
            z_shift: true,
            hopping_style: HoppingStyle::Conjugated,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_order(mut self, order: [Section; 3]) -> Self {
        self.section_order = order;
        self
    }

    pub fn with_z_shift(mut self, z_shift: bool) -> Self {
        self.z_shift = z_shift;
        self
    }

    pub fn with_hopping_style(mut self, style: HoppingStyle) -> Self {
        self.hopping_style = style;
        self
    }

    pub fn with_j0(mut self, j0: f64) -> Self {
        self.j0 = j0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.step_time.is_finite() || self.step_time < 0.0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "step time must be finite and non-negative, got {}",
                self.step_time
            )));
        }
        if !self.j0.is_finite() || self.j0 <= 0.0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "J0 must be finite and positive, got {}",
                self.j0
            )));
        }
        let mut seen = self.section_order;
        seen.sort();
        if seen != Section::ALL {
            return Err(Error::InvalidParameter(alloc::format!(
                "section order must list ZZ, PM and Z once each, got {:?}",
                self.section_order
            )));
        }
        Ok(())
    }

    /// Duration `Δt_I = (J / 2J₀)·T` of one `Ĥ_ZZ` window.
    pub fn dt_zz(&self, params: &ModelParams) -> f64 {
        params.j / (2.0 * self.j0) * self.step_time
    }

    /// Duration `Δt_II = (w / J₀)·T` of one hopping window.
    pub fn dt_hopping(&self, params: &ModelParams) -> f64 {
        params.w / self.j0 * self.step_time
    }

    pub fn total_time(&self) -> f64 {
        self.n_steps as f64 * self.step_time
    }
}

fn check_compilable(params: &ModelParams, schedule: &TrotterSchedule) -> Result<()> {
    params.validate_chain()?;
    schedule.validate()?;
    if params.epsilon0 != 0 {
        return Err(Error::Unsupported(alloc::format!(
            "the compiler needs zero background field, got epsilon0 = {}",
            params.epsilon0
        )));
    }
    Ok(())
}

/// Symbolic section-III angles in the gate convention, one per site.
///
/// The rotation on site `n` is `exp(−i T hₙ σᶻ)`, i.e. angle `2T·hₙ`, with
/// `2hₙ = m(−1)ⁿ − J·#{odd k : n ≤ k < N}`. With `z_shift`, `2h_N` is
/// subtracted from every site; this changes the step only by a phase
/// within each magnetization sector.
pub fn local_rotation_symbols(n_sites: usize, z_shift: bool) -> Vec<SymbolicAngle> {
    let parity = |n: usize| if n % 2 == 0 { 1 } else { -1 };
    (1..=n_sites)
        .map(|n| {
            let odd_links = (n..n_sites).filter(|k| k % 2 == 1).count() as i32;
            let shift = if z_shift { parity(n_sites) } else { 0 };
            SymbolicAngle::new(parity(n) - shift, -odd_links, 0)
        })
        .collect()
}

/// Local field coefficients after the optional magnetization shift.
pub fn shifted_local_coefficients(params: &ModelParams, z_shift: bool) -> Vec<f64> {
    let mut coef = local_field_coefficients(params);
    if z_shift {
        let last = *coef.last().expect("at least two sites");
        for c in &mut coef {
            *c -= last;
        }
    }
    coef
}

struct Builder {
    n: usize,
    gates: Vec<Gate>,
    windows: Vec<Window>,
    hidden: QubitMask,
}

impl Builder {
    fn new(n: usize) -> Self {
        Self {
            n,
            gates: Vec::new(),
            windows: Vec::new(),
            hidden: QubitMask::EMPTY,
        }
    }

    fn unhide(&mut self, sites: QubitMask) {
        let hidden = self.hidden;
        for s in sites.sites().filter(|&s| hidden.contains(s)) {
            self.gates.push(Gate::Unhide(s));
            self.hidden = self.hidden.without(s);
        }
    }

    /// Makes exactly `active` unhidden.
    fn activate(&mut self, active: QubitMask) {
        self.unhide(active);
        let to_hide = active.complement(self.n);
        let hidden = self.hidden;
        for s in to_hide.sites().filter(|&s| !hidden.contains(s)) {
            self.gates.push(Gate::Hide(s));
            self.hidden = self.hidden.with(s);
        }
    }

    fn window(&mut self, step: usize, section: Section, index: usize, body: impl FnOnce(&mut Self)) {
        let start = self.gates.len();
        body(self);
        self.windows.push(Window {
            step,
            section,
            index,
            gates: start..self.gates.len(),
        });
    }

    fn finish(mut self) -> Circuit {
        self.unhide(QubitMask::all(self.n));
        Circuit::from_parts(self.n, self.gates, self.windows)
    }
}

fn emit_zz(b: &mut Builder, params: &ModelParams, schedule: &TrotterSchedule, step: usize) {
    let theta = Angle::symbolic(SymbolicAngle::new(0, 1, 0), params, schedule.step_time);
    for n in 1..b.n.saturating_sub(1) {
        b.window(step, Section::Zz, n, |b| {
            let active = QubitMask::range(1, n + 1);
            b.activate(active);
            // R(π/2, π/2) = R(y)†, then R(π/2, −π/2) = R(y) afterwards.
            b.gates.push(Gate::CollectiveRotation {
                theta: Angle::numeric(FRAC_PI_2),
                phi: FRAC_PI_2,
                active,
            });
            b.gates.push(Gate::EntanglingMS {
                theta,
                phi: 0.0,
                active,
            });
            b.gates.push(Gate::CollectiveRotation {
                theta: Angle::numeric(FRAC_PI_2),
                phi: -FRAC_PI_2,
                active,
            });
        });
    }
}

fn emit_hopping(b: &mut Builder, params: &ModelParams, schedule: &TrotterSchedule, step: usize) {
    let theta = Angle::symbolic(SymbolicAngle::new(0, 0, 1), params, schedule.step_time);
    for n in 1..b.n {
        b.window(step, Section::Hopping, n, |b| {
            let active = QubitMask::from_sites(&[n, n + 1]);
            b.activate(active);
            let ms = |phi| Gate::EntanglingMS { theta, phi, active };
            match schedule.hopping_style {
                HoppingStyle::Conjugated => {
                    let z = |angle: f64, site| Gate::AddressedZ {
                        theta: Angle::numeric(angle),
                        site,
                    };
                    b.gates.extend([z(-FRAC_PI_2, n), z(-FRAC_PI_2, n + 1)]);
                    b.gates.push(ms(0.0));
                    b.gates.extend([z(FRAC_PI_2, n), z(FRAC_PI_2, n + 1)]);
                    b.gates.push(ms(0.0));
                }
                HoppingStyle::PhaseShifted => {
                    b.gates.push(ms(0.0));
                    b.gates.push(ms(FRAC_PI_2));
                }
            }
        });
    }
}

fn emit_local(b: &mut Builder, params: &ModelParams, schedule: &TrotterSchedule, step: usize) {
    let symbols = local_rotation_symbols(b.n, schedule.z_shift);
    b.window(step, Section::Local, 1, |b| {
        for (k, sym) in symbols.into_iter().enumerate() {
            if sym.is_zero() {
                continue;
            }
            let site = k + 1;
            b.unhide(QubitMask::EMPTY.with(site));
            b.gates.push(Gate::AddressedZ {
                theta: Angle::symbolic(sym, params, schedule.step_time),
                site,
            });
        }
    });
}

fn emit_step(b: &mut Builder, params: &ModelParams, schedule: &TrotterSchedule, step: usize) {
    for section in schedule.section_order {
        match section {
            Section::Zz => emit_zz(b, params, schedule, step),
            Section::Hopping => emit_hopping(b, params, schedule, step),
            Section::Local => emit_local(b, params, schedule, step),
        }
    }
}

/// One Trotter step, starting and ending with every site unhidden.
pub fn compile_step(params: &ModelParams, schedule: &TrotterSchedule) -> Result<Circuit> {
    check_compilable(params, schedule)?;
    let mut b = Builder::new(params.n_sites);
    emit_step(&mut b, params, schedule, 0);
    Ok(b.finish())
}

/// A single section of one step.
pub fn compile_section(
    params: &ModelParams,
    schedule: &TrotterSchedule,
    section: Section,
) -> Result<Circuit> {
    check_compilable(params, schedule)?;
    let mut b = Builder::new(params.n_sites);
    match section {
        Section::Zz => emit_zz(&mut b, params, schedule, 0),
        Section::Hopping => emit_hopping(&mut b, params, schedule, 0),
        Section::Local => emit_local(&mut b, params, schedule, 0),
    }
    Ok(b.finish())
}

/// All `n_steps` steps back to back. Hiding carries over between steps
/// instead of being undone, and every site is unhidden at the end.
pub fn compile_trotter(params: &ModelParams, schedule: &TrotterSchedule) -> Result<Circuit> {
    check_compilable(params, schedule)?;
    let mut b = Builder::new(params.n_sites);
    for step in 0..schedule.n_steps {
        emit_step(&mut b, params, schedule, step);
    }
    Ok(b.finish())
}

fn zz_pair(n_sites: usize, i: usize, j: usize) -> Matrix {
    pauli_product(n_sites, &[(i, Pauli::Z), (j, Pauli::Z)])
}

fn sigma_phi_pair(n_sites: usize, i: usize, j: usize, phi: f64) -> Matrix {
    let (c, s) = (libm::cos(phi), libm::sin(phi));
    let mut m = Matrix::zeros(dim_of(n_sites), dim_of(n_sites));
    for (a, ca) in [(Pauli::X, c), (Pauli::Y, s)] {
        for (b, cb) in [(Pauli::X, c), (Pauli::Y, s)] {
            if ca * cb != 0.0 {
                m += pauli_product(n_sites, &[(i, a), (j, b)]) * Complex64::new(ca * cb, 0.0);
            }
        }
    }
    m
}

fn pair_sum(n_sites: usize, active: QubitMask, scale: f64, pair: impl Fn(usize, usize) -> Matrix) -> HermitianOperator {
    let dim = dim_of(n_sites);
    let mut m = Matrix::zeros(dim, dim);
    let sites: Vec<usize> = active.sites().collect();
    for (a, &i) in sites.iter().enumerate() {
        for &j in &sites[a + 1..] {
            m += pair(i, j);
        }
    }
    HermitianOperator::new(n_sites, m * Complex64::new(scale, 0.0))
        .expect("sum of Pauli products is Hermitian")
}

/// `J₀ Σ_{i<j∈A} σᵠᵢσᵠⱼ`, the MS interaction along phase `φ`.
pub fn ms_hamiltonian(n_sites: usize, active: QubitMask, j0: f64, phi: f64) -> HermitianOperator {
    pair_sum(n_sites, active, j0, |i, j| sigma_phi_pair(n_sites, i, j, phi))
}

/// `J₀ Σ_{i<j∈A} σᶻᵢσᶻⱼ`, the MS interaction after rotation to the `z` axis.
pub fn msz_window_hamiltonian(n_sites: usize, active: QubitMask, j0: f64) -> HermitianOperator {
    pair_sum(n_sites, active, j0, |i, j| zz_pair(n_sites, i, j))
}

/// Time-averaged section-I Hamiltonian `(1/(N−2)) Σₙ Ĥ⁽ⁿ⁾_MSZ`, with
/// window `n` acting on sites `1..=n+1`.
pub fn average_zz_hamiltonian(n_sites: usize, j0: f64) -> Result<HermitianOperator> {
    if n_sites < 3 {
        return Err(Error::InvalidParameter(alloc::format!(
            "section I has no windows for {n_sites} sites"
        )));
    }
    let windows = n_sites - 2;
    let total = (1..=windows).fold(HermitianOperator::zeros(n_sites), |acc, n| {
        &acc + &msz_window_hamiltonian(n_sites, QubitMask::range(1, n + 1), j0)
    });
    Ok(total.scaled(1.0 / windows as f64))
}

/// `w (σ⁺ᵢσ⁻ⱼ + σ⁻ᵢσ⁺ⱼ)`.
pub fn hopping_pair_hamiltonian(n_sites: usize, i: usize, j: usize, w: f64) -> HermitianOperator {
    let m = pauli_product(n_sites, &[(i, Pauli::Raise), (j, Pauli::Lower)])
        + pauli_product(n_sites, &[(i, Pauli::Lower), (j, Pauli::Raise)]);
    HermitianOperator::new(n_sites, m * Complex64::new(w, 0.0)).expect("hopping is Hermitian")
}

/// `exp(iπ/4 Σ σʸ)` over the active sites, the rotation taking `σˣ` to `σᶻ`.
pub fn basis_rotation(n_sites: usize, active: QubitMask) -> Matrix {
    let dim = dim_of(n_sites);
    let y = active.sites().fold(Matrix::zeros(dim, dim), |acc, s| {
        acc + pauli_product(n_sites, &[(s, Pauli::Y)])
    });
    let h = HermitianOperator::new(n_sites, y).expect("sum of σʸ is Hermitian");
    Spectral::new(&h).unitary(-PI / 4.0)
}

/// The exact unitary each section is meant to implement.
///
/// Sections I and III are single exponentials. Section II is the product
/// of the per-pair hopping exponentials in window order; overlapping pairs
/// do not commute, so it is not `exp(−iĤ_± T)`.
pub fn section_target(
    params: &ModelParams,
    schedule: &TrotterSchedule,
    section: Section,
) -> Result<Matrix> {
    check_compilable(params, schedule)?;
    let n = params.n_sites;
    let t = schedule.step_time;
    Ok(match section {
        Section::Zz => {
            Spectral::new(&CouplingMatrix::new(n, params.j).to_operator()).unitary(t)
        }
        Section::Hopping => (1..n).fold(Matrix::identity(dim_of(n), dim_of(n)), |acc, k| {
            Spectral::new(&hopping_pair_hamiltonian(n, k, k + 1, params.w)).unitary(t) * acc
        }),
        Section::Local => {
            let coef = shifted_local_coefficients(params, schedule.z_shift);
            Spectral::new(&z_field_operator(n, &coef)).unitary(t)
        }
    })
}

/// Product of the section targets in the configured order.
pub fn step_target(params: &ModelParams, schedule: &TrotterSchedule) -> Result<Matrix> {
    let dim = dim_of(params.n_sites);
    schedule
        .section_order
        .iter()
        .try_fold(Matrix::identity(dim, dim), |acc, &s| {
            Ok(section_target(params, schedule, s)? * acc)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::circuit_unitary;
    use crate::operator::max_abs_diff;

    fn params(n: usize, w: f64, j: f64, m: f64) -> ModelParams {
        let p = ModelParams {
            n_sites: n,
            w,
            j,
            m,
            epsilon0: 0,
        };
        p.validate_chain().unwrap();
        p
    }

    #[test]
    fn window_counts_and_masks() {
        let s = TrotterSchedule::new(0.1, 1).unwrap();
        let c = compile_step(&params(4, 1.0, 1.0, 0.5), &s).unwrap();
        assert_eq!(c.section_windows(0, Section::Zz).count(), 2);
        assert_eq!(c.section_windows(0, Section::Hopping).count(), 3);
        let masks: Vec<_> = c
            .section_windows(0, Section::Zz)
            .map(|w| match c.gates()[w.gates.end - 2] {
                Gate::EntanglingMS { active, .. } => active,
                _ => panic!("window does not end in MS, R"),
            })
            .collect();
        assert_eq!(
            masks,
            [QubitMask::range(1, 2), QubitMask::range(1, 3)]
        );
        assert_eq!(c.hidden_at_end(), QubitMask::EMPTY);
        c.validate().unwrap();
    }

    #[test]
    fn two_sites_have_no_zz_windows() {
        let s = TrotterSchedule::new(0.1, 1).unwrap();
        let c = compile_step(&params(2, 1.0, 1.0, 0.5), &s).unwrap();
        assert_eq!(c.section_windows(0, Section::Zz).count(), 0);
        assert!(c.section_windows(0, Section::Zz).all(|w| w.gates.is_empty()));
    }

    #[test]
    fn local_symbols_match_coefficients() {
        for n in 2..=8 {
            for shift in [false, true] {
                let p = params(n, 0.0, 0.7, 0.3);
                let coef = shifted_local_coefficients(&p, shift);
                for (sym, c) in local_rotation_symbols(n, shift).iter().zip(coef) {
                    assert!((sym.evaluate(&p, 1.0) - 2.0 * c).abs() < 1e-14);
                }
            }
        }
        let syms = local_rotation_symbols(4, true);
        assert_eq!(
            syms,
            [
                SymbolicAngle::new(-2, -2, 0),
                SymbolicAngle::new(0, -1, 0),
                SymbolicAngle::new(-2, -1, 0),
                SymbolicAngle::new(0, 0, 0)
            ]
        );
    }

    #[test]
    fn zero_couplings_give_identity() {
        let s = TrotterSchedule::new(0.3, 1).unwrap();
        let c = compile_step(&params(4, 0.0, 0.0, 0.0), &s).unwrap();
        let u = circuit_unitary(&c).unwrap();
        assert!(max_abs_diff(&u, &Matrix::identity(16, 16)) < 1e-12);
    }

    #[test]
    fn step_matches_section_targets() {
        for style in [HoppingStyle::Conjugated, HoppingStyle::PhaseShifted] {
            for order in [TrotterSchedule::DEFAULT_ORDER, Section::ALL] {
                let p = params(4, 1.0, 1.3, 0.5);
                let s = TrotterSchedule::new(0.05, 1)
                    .unwrap()
                    .with_order(order)
                    .with_hopping_style(style)
                    .with_j0(0.8);
                let u = circuit_unitary(&compile_step(&p, &s).unwrap()).unwrap();
                assert!(max_abs_diff(&u, &step_target(&p, &s).unwrap()) < 1e-10);
            }
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(TrotterSchedule::new(-1.0, 1).is_err());
        let s = TrotterSchedule::new(1.0, 1).unwrap();
        assert!(s.with_j0(0.0).validate().is_err());
        assert!(s
            .with_order([Section::Zz, Section::Zz, Section::Local])
            .validate()
            .is_err());
        let p = params(4, 2.0, 1.0, 0.0);
        assert_eq!(s.with_j0(2.0).dt_zz(&p), 0.25);
        assert_eq!(s.with_j0(2.0).dt_hopping(&p), 1.0);
    }

    #[test]
    fn background_field_is_unsupported() {
        let p = params(4, 1.0, 1.0, 0.5).with_background(2);
        let s = TrotterSchedule::new(0.1, 1).unwrap();
        assert!(matches!(compile_step(&p, &s), Err(Error::Unsupported(_))));
    }
}
