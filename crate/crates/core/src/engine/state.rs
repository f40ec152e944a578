use alloc::vec::Vec;

use num_complex::Complex64;

use super::spectral::hermitian_eigenvalues;
use crate::model::BasisState;
use crate::operator::{dim_of, hermiticity_residual, Matrix, Vector, ONE};
use crate::{Error, Result, MAX_DENSITY_SITES, MAX_PURE_SITES};

fn check_pure_size(n_sites: usize) -> Result<()> {
    if n_sites > MAX_PURE_SITES {
        return Err(Error::SizeLimit {
            what: "the pure-state backend",
            max: MAX_PURE_SITES,
            sites: n_sites,
        });
    }
    Ok(())
}

fn check_density_size(n_sites: usize) -> Result<()> {
    if n_sites > MAX_DENSITY_SITES {
        return Err(Error::SizeLimit {
            what: "the density-matrix backend",
            max: MAX_DENSITY_SITES,
            sites: n_sites,
        });
    }
    Ok(())
}

/// Normalized state vector of `N` spins.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_sites: usize,
    amplitudes: Vector,
}

impl PureState {
    pub const NORM_TOL: f64 = 1e-10;

    pub fn new(n_sites: usize, amplitudes: Vector) -> Result<Self> {
        check_pure_size(n_sites)?;
        let dim = dim_of(n_sites);
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::InvalidState(alloc::format!(
                "state norm is {norm}, expected 1"
            )));
        }
        Ok(Self {
            n_sites,
            amplitudes,
        })
    }

    pub(crate) fn from_vector_unchecked(n_sites: usize, amplitudes: Vector) -> Self {
        debug_assert_eq!(amplitudes.len(), dim_of(n_sites));
        Self {
            n_sites,
            amplitudes,
        }
    }

    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        check_pure_size(n_sites)?;
        let dim = dim_of(n_sites);
        if index >= dim {
            return Err(Error::InvalidState(alloc::format!(
                "basis index {index} out of range for {n_sites} sites"
            )));
        }
        let mut v = Vector::zeros(dim);
        v[index] = ONE;
        Ok(Self::from_vector_unchecked(n_sites, v))
    }

    pub fn from_basis_state(state: &BasisState) -> Result<Self> {
        Self::basis(state.n_sites(), state.index())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Vector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vector {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `min_φ ‖ψ − e^{iφ}φ‖ = √(2 − 2|⟨ψ|φ⟩|)`.
    pub fn phase_insensitive_distance(&self, other: &PureState) -> f64 {
        // Align the phase of `other` first; forming `2 − 2|⟨a|b⟩|` instead
        // would lose half the significant digits.
        let c = self.inner(other);
        let phase = if c.norm() > 0.0 { c.conj() / c.norm() } else { Complex64::new(1.0, 0.0) };
        (self.amplitudes() - other.amplitudes() * phase).norm()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        check_density_size(self.n_sites)?;
        let m = &self.amplitudes * self.amplitudes.adjoint();
        Ok(DensityMatrix::from_matrix_unchecked(self.n_sites, m))
    }
}

/// Mixed state of `N` spins.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_sites: usize,
    matrix: Matrix,
}

impl DensityMatrix {
    pub const HERMITICITY_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-10;
    /// Most negative eigenvalue tolerated as round-off.
    pub const PSD_TOL: f64 = 1e-9;

    /// Validated density matrix.
    pub fn new(n_sites: usize, matrix: Matrix) -> Result<Self> {
        check_density_size(n_sites)?;
        let dim = dim_of(n_sites);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let rho = Self { n_sites, matrix };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(n_sites: usize, matrix: Matrix) -> Self {
        debug_assert_eq!(matrix.nrows(), dim_of(n_sites));
        Self { n_sites, matrix }
    }

    pub fn pure(state: &PureState) -> Result<Self> {
        state.to_density()
    }

    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        PureState::basis(n_sites, index)?.to_density()
    }

    pub fn maximally_mixed(n_sites: usize) -> Result<Self> {
        check_density_size(n_sites)?;
        let dim = dim_of(n_sites);
        let m = Matrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        Ok(Self::from_matrix_unchecked(n_sites, m))
    }

    /// `Σᵢ wᵢ ρᵢ`; the weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let n_sites = first.1.n_sites;
        let dim = first.1.dim();
        let mut m = Matrix::zeros(dim, dim);
        for (weight, rho) in parts {
            if rho.n_sites != n_sites {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: rho.dim(),
                });
            }
            m += &rho.matrix * Complex64::new(*weight, 0.0);
        }
        Self::new(n_sites, m)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = hermiticity_residual(&self.matrix);
        if herm > Self::HERMITICITY_TOL {
            return Err(Error::InvalidState(alloc::format!(
                "density matrix is not Hermitian (residual {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > Self::TRACE_TOL {
            return Err(Error::InvalidState(alloc::format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        let min = self.min_eigenvalue();
        if min < -Self::PSD_TOL {
            return Err(Error::InvalidState(alloc::format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Diagonal in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// Either representation, as produced by the evolution backends.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl QuantumState {
    pub fn n_sites(&self) -> usize {
        match self {
            QuantumState::Pure(s) => s.n_sites(),
            QuantumState::Mixed(r) => r.n_sites(),
        }
    }

    pub fn populations(&self) -> Vec<f64> {
        match self {
            QuantumState::Pure(s) => s.probabilities(),
            QuantumState::Mixed(r) => r.populations(),
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        match self {
            QuantumState::Pure(s) => s.to_density(),
            QuantumState::Mixed(r) => Ok(r.clone()),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            QuantumState::Pure(s) => Some(s),
            QuantumState::Mixed(_) => None,
        }
    }
}

impl From<PureState> for QuantumState {
    fn from(s: PureState) -> Self {
        QuantumState::Pure(s)
    }
}

impl From<DensityMatrix> for QuantumState {
    fn from(r: DensityMatrix) -> Self {
        QuantumState::Mixed(r)
    }
}
