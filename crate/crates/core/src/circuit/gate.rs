use core::fmt;
use core::ops::Range;

use alloc::vec::Vec;

use num_complex::Complex64;

use super::angle::Angle;
use super::compile::Section;
use crate::engine::{DensityMatrix, PureState};
use crate::operator::{dim_of, site_bit, Matrix};
use crate::{Error, Result, MAX_DENSITY_SITES};

/// A set of sites `1..=N`, `N ≤ 32`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct QubitMask(u32);

impl QubitMask {
    pub const EMPTY: Self = Self(0);

    pub fn all(n_sites: usize) -> Self {
        Self::range(1, n_sites)
    }

    /// Sites `lo..=hi`.
    pub fn range(lo: usize, hi: usize) -> Self {
        (lo..=hi).fold(Self::EMPTY, |m, s| m.with(s))
    }

    pub fn from_sites(sites: &[usize]) -> Self {
        sites.iter().fold(Self::EMPTY, |m, &s| m.with(s))
    }

    /// Adds a site; sites outside `1..=32` are ignored.
    pub fn with(self, site: usize) -> Self {
        if (1..=32).contains(&site) {
            Self(self.0 | 1 << (site - 1))
        } else {
            self
        }
    }

    pub fn without(self, site: usize) -> Self {
        if (1..=32).contains(&site) {
            Self(self.0 & !(1 << (site - 1)))
        } else {
            self
        }
    }

    pub fn contains(self, site: usize) -> bool {
        (1..=32).contains(&site) && self.0 & (1 << (site - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self, n_sites: usize) -> Self {
        Self(!self.0 & Self::all(n_sites).0)
    }

    pub fn sites(self) -> impl Iterator<Item = usize> {
        (1..=32).filter(move |&s| self.contains(s))
    }

    /// Largest site contained, if any.
    pub fn max_site(self) -> Option<usize> {
        (self.0 != 0).then(|| 32 - self.0.leading_zeros() as usize)
    }
}

impl fmt::Display for QubitMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, s) in self.sites().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

/// Native operations of the trapped-ion gate set.
///
/// Hidden sites are excluded from collective gates; hiding itself is
/// modeled as an ideal mask change with no effect on the qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// `exp(−i(θ/2) Σ_{i∈active} (cosφ σˣᵢ + sinφ σʸᵢ))`.
    CollectiveRotation {
        theta: Angle,
        phi: f64,
        active: QubitMask,
    },
    /// The same rotation on a single addressed ion.
    AddressedRotation { theta: Angle, phi: f64, site: usize },
    /// `exp(−i(θ/2) Σ_{i<j∈active} σᵠᵢσᵠⱼ)`.
    EntanglingMS {
        theta: Angle,
        phi: f64,
        active: QubitMask,
    },
    /// `exp(−i(θ/2) σᶻ)` on one site.
    AddressedZ { theta: Angle, site: usize },
    Hide(usize),
    Unhide(usize),
}

impl Gate {
    /// Sites the gate refers to.
    pub fn sites(&self) -> QubitMask {
        match *self {
            Gate::CollectiveRotation { active, .. } | Gate::EntanglingMS { active, .. } => active,
            Gate::AddressedRotation { site, .. }
            | Gate::AddressedZ { site, .. }
            | Gate::Hide(site)
            | Gate::Unhide(site) => QubitMask::EMPTY.with(site),
        }
    }

    pub fn is_marker(&self) -> bool {
        matches!(self, Gate::Hide(_) | Gate::Unhide(_))
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use super::angle::format_radians;
        match self {
            Gate::CollectiveRotation { theta, phi, active } => {
                write!(f, "R({theta}, {}) on {active}", format_radians(*phi))
            }
            Gate::AddressedRotation { theta, phi, site } => {
                write!(f, "R({theta}, {}) on {site}", format_radians(*phi))
            }
            Gate::EntanglingMS { theta, phi, active } => {
                write!(f, "MS({theta}, {}) on {active}", format_radians(*phi))
            }
            Gate::AddressedZ { theta, site } => write!(f, "Z({theta}) on {site}"),
            Gate::Hide(s) => write!(f, "hide {s}"),
            Gate::Unhide(s) => write!(f, "unhide {s}"),
        }
    }
}

/// A contiguous group of gates implementing one time window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    /// Trotter step, counted from 0.
    pub step: usize,
    pub section: Section,
    /// Window number within its section, counted from 1.
    pub index: usize,
    pub gates: Range<usize>,
}

/// Ordered gate list over `N` sites, with optional window annotations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    n_sites: usize,
    gates: Vec<Gate>,
    windows: Vec<Window>,
}

impl Circuit {
    pub fn new(n_sites: usize) -> Self {
        Self {
            n_sites,
            gates: Vec::new(),
            windows: Vec::new(),
        }
    }

    /// A validated circuit without window annotations.
    pub fn from_gates(n_sites: usize, gates: Vec<Gate>) -> Result<Self> {
        let c = Self {
            n_sites,
            gates,
            windows: Vec::new(),
        };
        c.validate()?;
        Ok(c)
    }

    pub(crate) fn from_parts(n_sites: usize, gates: Vec<Gate>, windows: Vec<Window>) -> Self {
        Self {
            n_sites,
            gates,
            windows,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Windows of one section in one step.
    pub fn section_windows(&self, step: usize, section: Section) -> impl Iterator<Item = &Window> {
        self.windows
            .iter()
            .filter(move |w| w.step == step && w.section == section)
    }

    /// Checks site ranges, hide/unhide alternation and that collective
    /// masks equal the set of unhidden sites.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_sites;
        if n == 0 || n > 32 {
            return Err(Error::Structure(alloc::format!(
                "circuits need 1 to 32 sites, got {n}"
            )));
        }
        let mut hidden = QubitMask::EMPTY;
        for (k, gate) in self.gates.iter().enumerate() {
            let in_range = match *gate {
                Gate::CollectiveRotation { active, .. } | Gate::EntanglingMS { active, .. } => {
                    active.sites().all(|s| s <= n)
                }
                Gate::AddressedRotation { site, .. }
                | Gate::AddressedZ { site, .. }
                | Gate::Hide(site)
                | Gate::Unhide(site) => (1..=n).contains(&site),
            };
            if !in_range {
                return Err(Error::Structure(alloc::format!(
                    "gate {k} ({gate}) refers to a site outside 1..={n}"
                )));
            }
            match *gate {
                Gate::Hide(s) => {
                    if hidden.contains(s) {
                        return Err(Error::Structure(alloc::format!(
                            "gate {k} hides site {s}, which is already hidden"
                        )));
                    }
                    hidden = hidden.with(s);
                }
                Gate::Unhide(s) => {
                    if !hidden.contains(s) {
                        return Err(Error::Structure(alloc::format!(
                            "gate {k} unhides site {s}, which is not hidden"
                        )));
                    }
                    hidden = hidden.without(s);
                }
                Gate::CollectiveRotation { active, .. } | Gate::EntanglingMS { active, .. } => {
                    let expected = hidden.complement(n);
                    if active != expected {
                        return Err(Error::Structure(alloc::format!(
                            "gate {k} ({gate}) acts on {active} but the unhidden sites are {expected}"
                        )));
                    }
                }
                Gate::AddressedRotation { site, .. } | Gate::AddressedZ { site, .. } => {
                    if hidden.contains(site) {
                        return Err(Error::Structure(alloc::format!(
                            "gate {k} ({gate}) addresses hidden site {site}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Sites still hidden after the last gate.
    pub fn hidden_at_end(&self) -> QubitMask {
        self.gates.iter().fold(QubitMask::EMPTY, |h, g| match *g {
            Gate::Hide(s) => h.with(s),
            Gate::Unhide(s) => h.without(s),
            _ => h,
        })
    }

    /// Applies the circuit to a state vector.
    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        self.check_state_dim(state.n_sites())?;
        self.validate()?;
        let mut v = state.amplitudes().clone();
        for g in &self.gates {
            apply_gate(g, self.n_sites, v.as_mut_slice());
        }
        Ok(PureState::from_vector_unchecked(self.n_sites, v))
    }

    /// `ρ → UρU†`.
    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_state_dim(rho.n_sites())?;
        self.validate()?;
        let left = self.apply_columns(rho.matrix().clone());
        let both = self.apply_columns(left.adjoint()).adjoint();
        Ok(DensityMatrix::from_matrix_unchecked(self.n_sites, both))
    }

    fn check_state_dim(&self, n: usize) -> Result<()> {
        if n != self.n_sites {
            return Err(Error::DimensionMismatch {
                expected: dim_of(self.n_sites),
                found: dim_of(n),
            });
        }
        Ok(())
    }

    fn apply_columns(&self, mut m: Matrix) -> Matrix {
        let dim = m.nrows();
        for col in m.as_mut_slice().chunks_mut(dim) {
            for g in &self.gates {
                apply_gate(g, self.n_sites, col);
            }
        }
        m
    }
}

/// Ordered product of the gate matrices, the first gate acting first.
pub fn circuit_unitary(circuit: &Circuit) -> Result<Matrix> {
    let n = circuit.n_sites();
    if n > MAX_DENSITY_SITES {
        return Err(Error::SizeLimit {
            what: "dense circuit unitaries",
            max: MAX_DENSITY_SITES,
            sites: n,
        });
    }
    circuit.validate()?;
    let dim = dim_of(n);
    Ok(circuit.apply_columns(Matrix::identity(dim, dim)))
}

type Single = [[Complex64; 2]; 2];

/// `exp(−i(θ/2)(cosφ σˣ + sinφ σʸ))` in (up, down) order.
pub(crate) fn rotation_matrix(theta: f64, phi: f64) -> Single {
    let c = Complex64::new(libm::cos(theta / 2.0), 0.0);
    let s = libm::sin(theta / 2.0);
    let mi = Complex64::new(0.0, -s);
    [
        [c, mi * Complex64::cis(-phi)],
        [mi * Complex64::cis(phi), c],
    ]
}

/// Single-qubit `V` with `V σᵠ V† = σᶻ`: a Hadamard after `R_z(−φ)`.
fn to_z_basis(phi: f64) -> Single {
    let r = libm::sqrt(0.5);
    let a = Complex64::from_polar(r, phi / 2.0);
    let b = Complex64::from_polar(r, -phi / 2.0);
    [[a, b], [a, -b]]
}

fn adjoint(m: &Single) -> Single {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

fn apply_single(u: &Single, n: usize, site: usize, v: &mut [Complex64]) {
    let bit = site_bit(n, site);
    for i in 0..v.len() {
        if i & bit == 0 {
            let (a, b) = (v[i], v[i | bit]);
            v[i] = u[0][0] * a + u[0][1] * b;
            v[i | bit] = u[1][0] * a + u[1][1] * b;
        }
    }
}

fn apply_gate(gate: &Gate, n: usize, v: &mut [Complex64]) {
    match *gate {
        Gate::CollectiveRotation { theta, phi, active } => {
            let u = rotation_matrix(theta.radians, phi);
            for s in active.sites() {
                apply_single(&u, n, s, v);
            }
        }
        Gate::AddressedRotation { theta, phi, site } => {
            apply_single(&rotation_matrix(theta.radians, phi), n, site, v);
        }
        Gate::EntanglingMS { theta, phi, active } => {
            let w = to_z_basis(phi);
            for s in active.sites() {
                apply_single(&w, n, s, v);
            }
            // Σ_{i<j} zᵢzⱼ = (M² − k)/2 with M the active magnetization.
            let k = active.len() as i64;
            let bits: Vec<usize> = active.sites().map(|s| site_bit(n, s)).collect();
            let phases: Vec<Complex64> = (0..=k)
                .map(|downs| {
                    let mag = k - 2 * downs;
                    let pairs = ((mag * mag - k) / 2) as f64;
                    Complex64::cis(-theta.radians / 2.0 * pairs)
                })
                .collect();
            for (i, amp) in v.iter_mut().enumerate() {
                let downs = bits.iter().filter(|&&b| i & b != 0).count();
                *amp *= phases[downs];
            }
            let wd = adjoint(&w);
            for s in active.sites() {
                apply_single(&wd, n, s, v);
            }
        }
        Gate::AddressedZ { theta, site } => {
            let bit = site_bit(n, site);
            let up = Complex64::cis(-theta.radians / 2.0);
            let down = up.conj();
            for (i, amp) in v.iter_mut().enumerate() {
                *amp *= if i & bit == 0 { up } else { down };
            }
        }
        Gate::Hide(_) | Gate::Unhide(_) => {}
    }
}

/// Dense matrix of a single gate.
pub fn gate_matrix(gate: &Gate, n_sites: usize) -> Matrix {
    let dim = dim_of(n_sites);
    let mut m = Matrix::identity(dim, dim);
    for col in m.as_mut_slice().chunks_mut(dim) {
        apply_gate(gate, n_sites, col);
    }
    m
}
