//! Hamiltonians of the encoded Schwinger model and the Gauss-law bookkeeping
//! that replaces the gauge fields.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;

use crate::operator::{dim_of, site_bit, spin_z, HermitianOperator, Matrix};
use crate::{Error, Result, MAX_PURE_SITES};

/// Physical couplings of the lattice model.
///
/// `w` is the pair creation rate, `j` the electric field energy and `m` the
/// bare mass, all in units of inverse length. `epsilon0` is the integer
/// background field on the link left of site 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n_sites: usize,
    pub w: f64,
    pub j: f64,
    pub m: f64,
    pub epsilon0: i64,
}

impl ModelParams {
    /// Zero-background-field parameters, validated.
    pub fn new(n_sites: usize, w: f64, j: f64, m: f64) -> Result<Self> {
        let params = Self {
            n_sites,
            w,
            j,
            m,
            epsilon0: 0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_background(mut self, epsilon0: i64) -> Self {
        self.epsilon0 = epsilon0;
        self
    }

    /// Checks the physical invariants: even `N ≥ 2` and non-negative couplings.
    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 || self.n_sites % 2 != 0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "the staggered chain needs an even number of sites >= 2, got {}",
                self.n_sites
            )));
        }
        self.validate_chain()
    }

    /// Like [`validate`](Self::validate) but accepts odd chains.
    ///
    /// The coupling structure and the gate compiler are well defined for any
    /// `N ≥ 2`; only the staggered vacuum needs even `N`.
    pub fn validate_chain(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidParameter(alloc::format!(
                "need at least 2 sites, got {}",
                self.n_sites
            )));
        }
        if self.n_sites > MAX_PURE_SITES {
            return Err(Error::SizeLimit {
                what: "the dense backend",
                max: MAX_PURE_SITES,
                sites: self.n_sites,
            });
        }
        for (name, value) in [("w", self.w), ("J", self.j), ("m", self.m)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidParameter(alloc::format!(
                    "{name} must be finite and non-negative, got {value}"
                )));
            }
        }
        Ok(())
    }

    pub fn vacuum(&self) -> BasisState {
        BasisState::vacuum(self.n_sites)
    }
}

/// Sign `(−1)^n`.
#[inline]
fn stagger(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn z(self) -> i64 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }
}

/// What a site holds under the staggered-fermion reading of a spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Occupation {
    Empty,
    Electron,
    Positron,
}

/// A computational basis state, site 1 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisState {
    spins: Vec<Spin>,
}

impl BasisState {
    pub fn new(spins: Vec<Spin>) -> Self {
        Self { spins }
    }

    /// The bare vacuum `↑↓↑↓…`.
    pub fn vacuum(n_sites: usize) -> Self {
        let spins = (1..=n_sites)
            .map(|n| if n % 2 == 1 { Spin::Up } else { Spin::Down })
            .collect();
        Self { spins }
    }

    pub fn from_index(n_sites: usize, index: usize) -> Self {
        let spins = (1..=n_sites)
            .map(|site| {
                if index & site_bit(n_sites, site) == 0 {
                    Spin::Up
                } else {
                    Spin::Down
                }
            })
            .collect();
        Self { spins }
    }

    pub fn index(&self) -> usize {
        let n = self.spins.len();
        self.spins
            .iter()
            .enumerate()
            .filter(|(_, s)| **s == Spin::Down)
            .fold(0, |acc, (k, _)| acc | site_bit(n, k + 1))
    }

    pub fn n_sites(&self) -> usize {
        self.spins.len()
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    /// Spin on `site` (1-based).
    pub fn spin(&self, site: usize) -> Spin {
        self.spins[site - 1]
    }

    pub fn occupation(&self, site: usize) -> Occupation {
        match (site % 2 == 1, self.spin(site)) {
            (true, Spin::Up) | (false, Spin::Down) => Occupation::Empty,
            (true, Spin::Down) => Occupation::Electron,
            (false, Spin::Up) => Occupation::Positron,
        }
    }

    /// Net charge `½ Σₙ (σᶻₙ + (−1)ⁿ)`.
    pub fn charge(&self) -> i64 {
        let twice: i64 = (1..=self.n_sites())
            .map(|n| self.spin(n).z() + if n % 2 == 0 { 1 } else { -1 })
            .sum();
        twice / 2
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.spins {
            f.write_str(match s {
                Spin::Up => "↑",
                Spin::Down => "↓",
            })?;
        }
        Ok(())
    }
}

impl FromStr for BasisState {
    type Err = Error;

    /// Accepts arrows (`↑↓`) or letters (`u`/`d`).
    fn from_str(s: &str) -> Result<Self> {
        let spins = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '↑' | 'u' | 'U' => Ok(Spin::Up),
                '↓' | 'd' | 'D' => Ok(Spin::Down),
                other => Err(Error::InvalidState(alloc::format!(
                    "unexpected spin character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        if spins.is_empty() {
            return Err(Error::InvalidState(String::from("empty basis state")));
        }
        Ok(Self { spins })
    }
}

/// Electric fields `L₁ … L_N` reconstructed from the Gauss law, starting
/// from `L₀ = ε₀`.
pub fn gauss_fields(state: &BasisState, epsilon0: i64) -> Vec<i64> {
    let mut field = epsilon0;
    (1..=state.n_sites())
        .map(|n| {
            let twice = state.spin(n).z() + if n % 2 == 0 { 1 } else { -1 };
            field += twice / 2;
            field
        })
        .collect()
}

/// Strictly upper-triangular `σᶻσᶻ` couplings left after eliminating the
/// electric field.
///
/// `c(m, n) = (J/2)(N − n)` for `1 ≤ m < n ≤ N − 1`: a spin couples with
/// constant strength to everything on its left, and the coupling to the
/// right decays linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    n_sites: usize,
    entries: Vec<f64>,
}

impl CouplingMatrix {
    pub fn new(n_sites: usize, j: f64) -> Self {
        let mut entries = alloc::vec![0.0; n_sites * n_sites];
        for n in 2..n_sites {
            for m in 1..n {
                entries[(m - 1) * n_sites + (n - 1)] = 0.5 * j * (n_sites - n) as f64;
            }
        }
        Self { n_sites, entries }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Coupling between sites `m` and `n` (1-based, `m < n`).
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.entries[(m - 1) * self.n_sites + (n - 1)]
    }

    /// Overwrites one coupling; used to inject faults in consistency checks.
    pub fn set(&mut self, m: usize, n: usize, value: f64) {
        assert!(m < n && n <= self.n_sites, "coupling ({m}, {n}) is not upper-triangular");
        self.entries[(m - 1) * self.n_sites + (n - 1)] = value;
    }

    /// Nonzero couplings as `(m, n, c)`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n_sites = self.n_sites;
        (1..=n_sites)
            .flat_map(move |m| (m + 1..=n_sites).map(move |n| (m, n)))
            .map(|(m, n)| (m, n, self.get(m, n)))
            .filter(|&(_, _, c)| c != 0.0)
    }

    /// `Σ_{m<n} c(m,n) σᶻₘσᶻₙ`.
    pub fn to_operator(&self) -> HermitianOperator {
        let n = self.n_sites;
        let diag: Vec<f64> = (0..dim_of(n))
            .map(|idx| {
                self.pairs()
                    .map(|(a, b, c)| c * spin_z(n, idx, a) * spin_z(n, idx, b))
                    .sum()
            })
            .collect();
        HermitianOperator::from_diagonal(n, &diag).expect("dimension is consistent")
    }
}

/// The three parts `Ĥ_ZZ + Ĥ_± + Ĥ_Z` of the spin Hamiltonian, without the
/// constant offset.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitHamiltonian {
    pub zz: HermitianOperator,
    pub hopping: HermitianOperator,
    pub local: HermitianOperator,
}

impl SplitHamiltonian {
    pub fn total(&self) -> HermitianOperator {
        &(&self.zz + &self.hopping) + &self.local
    }
}

/// Full spin Hamiltonian including the constants from expanding the
/// electric-field square:
///
/// `Ĥ_S = (m/2) Σ (−1)ⁿ σᶻₙ + w Σ (σ⁺ₙσ⁻ₙ₊₁ + h.c.) + J Σ_{n<N} [ε₀ + ½ Σ_{l≤n} (σᶻ_l + (−1)^l)]²`
pub fn build_spin_hamiltonian(params: &ModelParams) -> Result<HermitianOperator> {
    params.validate()?;
    let n = params.n_sites;
    let mut h = hopping_hamiltonian(n, params.w).into_matrix();
    for idx in 0..dim_of(n) {
        let mass: f64 = (1..=n).map(|s| stagger(s) * spin_z(n, idx, s)).sum();
        let mut field = params.epsilon0 as f64;
        let mut electric = 0.0;
        for l in 1..n {
            field += 0.5 * (spin_z(n, idx, l) + stagger(l));
            electric += field * field;
        }
        h[(idx, idx)] += Complex64::new(0.5 * params.m * mass + params.j * electric, 0.0);
    }
    Ok(HermitianOperator::from_matrix_unchecked(n, h))
}

/// Splits `Ĥ_S` into long-range, hopping and local parts (zero background
/// field only).
pub fn build_split_hamiltonians(params: &ModelParams) -> Result<SplitHamiltonian> {
    params.validate()?;
    split_with_couplings(params, &CouplingMatrix::new(params.n_sites, params.j))
}

/// [`build_split_hamiltonians`] with an explicit coupling matrix.
pub fn split_with_couplings(
    params: &ModelParams,
    couplings: &CouplingMatrix,
) -> Result<SplitHamiltonian> {
    params.validate_chain()?;
    if params.epsilon0 != 0 {
        return Err(Error::Unsupported(alloc::format!(
            "the split form needs zero background field, got epsilon0 = {}",
            params.epsilon0
        )));
    }
    if couplings.n_sites() != params.n_sites {
        return Err(Error::DimensionMismatch {
            expected: params.n_sites,
            found: couplings.n_sites(),
        });
    }
    Ok(SplitHamiltonian {
        zz: couplings.to_operator(),
        hopping: hopping_hamiltonian(params.n_sites, params.w),
        local: local_hamiltonian(params),
    })
}

/// `w Σₙ (σ⁺ₙσ⁻ₙ₊₁ + h.c.)`.
pub fn hopping_hamiltonian(n_sites: usize, w: f64) -> HermitianOperator {
    let dim = dim_of(n_sites);
    let mut h = Matrix::zeros(dim, dim);
    for idx in 0..dim {
        for n in 1..n_sites {
            let pair = site_bit(n_sites, n) | site_bit(n_sites, n + 1);
            let bits = idx & pair;
            if bits != 0 && bits != pair {
                h[(idx ^ pair, idx)] += Complex64::new(w, 0.0);
            }
        }
    }
    HermitianOperator::from_matrix_unchecked(n_sites, h)
}

/// `σᶻ` coefficients of the local part,
/// `Ĥ_Z = (m/2) Σ (−1)ⁿ σᶻₙ − (J/2) Σ_{n<N} (n mod 2) Σ_{l≤n} σᶻ_l`.
pub fn local_field_coefficients(params: &ModelParams) -> Vec<f64> {
    let n_sites = params.n_sites;
    let mut coef: Vec<f64> = (1..=n_sites)
        .map(|n| 0.5 * params.m * stagger(n))
        .collect();
    for n in 1..n_sites {
        let weight = (n % 2) as f64;
        for c in coef.iter_mut().take(n) {
            *c -= 0.5 * params.j * weight;
        }
    }
    coef
}

pub fn local_hamiltonian(params: &ModelParams) -> HermitianOperator {
    z_field_operator(params.n_sites, &local_field_coefficients(params))
}

/// `Σₙ hₙ σᶻₙ` for the given coefficients.
pub fn z_field_operator(n_sites: usize, coefficients: &[f64]) -> HermitianOperator {
    assert_eq!(coefficients.len(), n_sites);
    let diag: Vec<f64> = (0..dim_of(n_sites))
        .map(|idx| {
            coefficients
                .iter()
                .enumerate()
                .map(|(k, c)| c * spin_z(n_sites, idx, k + 1))
                .sum()
        })
        .collect();
    HermitianOperator::from_diagonal(n_sites, &diag).expect("dimension is consistent")
}

/// Total magnetization `Σₙ σᶻₙ`.
pub fn total_magnetization(n_sites: usize) -> HermitianOperator {
    z_field_operator(n_sites, &alloc::vec![1.0; n_sites])
}

/// Diagonal projector onto charge-neutral basis states (`Σₙ σᶻₙ = 0`).
pub fn physical_projector(n_sites: usize) -> Result<HermitianOperator> {
    if n_sites < 2 || n_sites % 2 != 0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "the physical subspace needs an even number of sites >= 2, got {n_sites}"
        )));
    }
    if n_sites > MAX_PURE_SITES {
        return Err(Error::SizeLimit {
            what: "the dense backend",
            max: MAX_PURE_SITES,
            sites: n_sites,
        });
    }
    let diag: Vec<f64> = (0..dim_of(n_sites))
        .map(|idx| {
            if idx.count_ones() as usize * 2 == n_sites {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    HermitianOperator::from_diagonal(n_sites, &diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{pauli_product, Pauli};
    use alloc::vec;

    fn params(n: usize, w: f64, j: f64, m: f64) -> ModelParams {
        ModelParams::new(n, w, j, m).unwrap()
    }

    #[test]
    fn odd_or_tiny_chains_are_rejected() {
        assert!(ModelParams::new(3, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(4, -1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(14, 1.0, 1.0, 1.0).is_err());
        assert!(physical_projector(5).is_err());
    }

    #[test]
    fn all_couplings_off_gives_zero_matrix() {
        let h = build_spin_hamiltonian(&params(2, 0.0, 0.0, 0.0)).unwrap();
        assert!(h.matrix().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn vacuum_diagonal_is_pure_mass_term() {
        // Gauss fields vanish on the vacuum, so only (m/2) Σ (−1)ⁿ σᶻₙ = −N m / 2 remains.
        for n in [2, 4, 6] {
            let p = params(n, 1.0, 1.0, 0.5);
            let h = build_spin_hamiltonian(&p).unwrap();
            let v = BasisState::vacuum(n).index();
            assert_eq!(h.matrix()[(v, v)].re, -(n as f64) * 0.5 / 2.0);
        }
        // N = 4, J = w, m = 0.5w: −2m = −1.
        let h = build_spin_hamiltonian(&params(4, 1.0, 1.0, 0.5)).unwrap();
        let v = BasisState::vacuum(4).index();
        assert_eq!(h.matrix()[(v, v)].re, -1.0);
    }

    #[test]
    fn coupling_matrix_values() {
        let c = CouplingMatrix::new(4, 1.0);
        let pairs: Vec<_> = c.pairs().collect();
        assert_eq!(pairs, vec![(1, 2, 1.0), (1, 3, 0.5), (2, 3, 0.5)]);
        assert_eq!(CouplingMatrix::new(2, 3.0).pairs().count(), 0);
        let split = build_split_hamiltonians(&params(2, 1.0, 3.0, 0.0)).unwrap();
        assert!(split.zz.matrix().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn coupling_matrix_is_row_constant_and_decays_linearly() {
        let c = CouplingMatrix::new(10, 2.0);
        for n in 2..10 {
            for m in 1..n {
                assert_eq!(c.get(m, n), c.get(1, n));
            }
            if n < 9 {
                assert_eq!(c.get(1, n) - c.get(1, n + 1), 1.0);
            }
        }
        for m in 1..10 {
            assert_eq!(c.get(m, 10), 0.0);
        }
    }

    #[test]
    fn local_coefficients_follow_expanded_formula() {
        // N = 4: (−m/2 − J, m/2 − J/2, −m/2 − J/2, m/2).
        let p = params(4, 1.0, 1.0, 0.5);
        assert_eq!(local_field_coefficients(&p), vec![-1.25, -0.25, -0.75, 0.25]);
        let p = params(4, 1.0, 2.0, 1.0);
        assert_eq!(local_field_coefficients(&p), vec![-2.5, -0.5, -1.5, 0.5]);
    }

    #[test]
    fn background_field_is_rejected_by_split() {
        let p = params(4, 1.0, 1.0, 0.5).with_background(1);
        assert!(matches!(build_split_hamiltonians(&p), Err(Error::Unsupported(_))));
        assert!(build_spin_hamiltonian(&p).is_ok());
    }

    #[test]
    fn gauss_field_examples() {
        let vac: BasisState = "↑↓↑↓".parse().unwrap();
        assert_eq!(gauss_fields(&vac, 0), vec![0, 0, 0, 0]);
        assert_eq!(gauss_fields(&vac, 1), vec![1, 1, 1, 1]);
        let pair: BasisState = "↓↑↑↓".parse().unwrap();
        assert_eq!(gauss_fields(&pair, 0), vec![-1, 0, 0, 0]);
        assert_eq!(pair.occupation(1), Occupation::Electron);
        assert_eq!(pair.occupation(2), Occupation::Positron);
        assert_eq!(pair.occupation(3), Occupation::Empty);
    }

    #[test]
    fn gauss_law_sums_to_total_charge() {
        for n in [2usize, 4, 6] {
            for idx in 0..(1 << n) {
                let s = BasisState::from_index(n, idx);
                for eps in [-2i64, 0, 3] {
                    let fields = gauss_fields(&s, eps);
                    assert_eq!(fields[n - 1] - eps, s.charge());
                }
            }
        }
    }

    #[test]
    fn basis_index_round_trip_and_convention() {
        let vac = BasisState::vacuum(4);
        assert_eq!(vac.index(), 0b0101);
        assert_eq!(alloc::format!("{vac}"), "↑↓↑↓");
        for idx in 0..16 {
            assert_eq!(BasisState::from_index(4, idx).index(), idx);
        }
        assert_eq!("udud".parse::<BasisState>().unwrap(), vac);
        assert!("uxd".parse::<BasisState>().is_err());
    }

    #[test]
    fn projector_ranks_and_members() {
        let p4 = physical_projector(4).unwrap();
        let members: Vec<String> = (0..16)
            .filter(|&i| p4.matrix()[(i, i)].re == 1.0)
            .map(|i| alloc::format!("{}", BasisState::from_index(4, i)))
            .collect();
        assert_eq!(
            members,
            vec!["↑↑↓↓", "↑↓↑↓", "↑↓↓↑", "↓↑↑↓", "↓↑↓↑", "↓↓↑↑"]
        );
        let bad: BasisState = "↓↓↑↓".parse().unwrap();
        assert_eq!(p4.matrix()[(bad.index(), bad.index())].re, 0.0);
        let p2 = physical_projector(2).unwrap();
        assert_eq!(p2.diagonal(), vec![0.0, 1.0, 1.0, 0.0]);
        assert!(p4.is_diagonal_projector());
    }

    #[test]
    fn hopping_matches_pauli_construction() {
        let n = 4;
        let h = hopping_hamiltonian(n, 0.7);
        let mut reference = Matrix::zeros(16, 16);
        for s in 1..n {
            reference += pauli_product(n, &[(s, Pauli::Raise), (s + 1, Pauli::Lower)]);
            reference += pauli_product(n, &[(s, Pauli::Lower), (s + 1, Pauli::Raise)]);
        }
        reference *= Complex64::new(0.7, 0.0);
        assert_eq!(h.matrix(), &reference);
    }
}
