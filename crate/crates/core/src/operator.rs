//! Dense operators on the `2^N` dimensional spin Hilbert space.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type Matrix = DMatrix<Complex64>;
pub type Vector = DVector<Complex64>;

/// Entrywise tolerance of the Hermiticity check.
pub const HERMITICITY_TOL: f64 = 1e-12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Bit mask of `site` (1-based) inside a basis index of an `n_sites` chain.
#[inline]
pub fn site_bit(n_sites: usize, site: usize) -> usize {
    debug_assert!(site >= 1 && site <= n_sites);
    1 << (n_sites - site)
}

/// `σᶻ` eigenvalue of `site` in basis state `index`.
#[inline]
pub fn spin_z(n_sites: usize, index: usize, site: usize) -> f64 {
    if index & site_bit(n_sites, site) == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn dim_of(n_sites: usize) -> usize {
    1usize << n_sites
}

#[cfg(test)]
pub(crate) fn sites_of_dim(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Largest entrywise modulus of `A − A†`.
pub fn hermiticity_residual(a: &Matrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Largest entrywise modulus of `A − B`.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// A Hermitian matrix acting on `N` spins.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    n_sites: usize,
    matrix: Matrix,
}

impl HermitianOperator {
    pub fn new(n_sites: usize, matrix: Matrix) -> Result<Self> {
        let dim = dim_of(n_sites);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let residual = hermiticity_residual(&matrix);
        if residual > HERMITICITY_TOL {
            return Err(Error::InvalidParameter(alloc::format!(
                "operator is not Hermitian (residual {residual:e})"
            )));
        }
        Ok(Self { n_sites, matrix })
    }

    pub(crate) fn from_matrix_unchecked(n_sites: usize, matrix: Matrix) -> Self {
        debug_assert_eq!(matrix.nrows(), dim_of(n_sites));
        Self { n_sites, matrix }
    }

    pub fn zeros(n_sites: usize) -> Self {
        let dim = dim_of(n_sites);
        Self::from_matrix_unchecked(n_sites, Matrix::zeros(dim, dim))
    }

    pub fn identity(n_sites: usize) -> Self {
        let dim = dim_of(n_sites);
        Self::from_matrix_unchecked(n_sites, Matrix::identity(dim, dim))
    }

    /// Real diagonal operator with the given entries.
    pub fn from_diagonal(n_sites: usize, diagonal: &[f64]) -> Result<Self> {
        let dim = dim_of(n_sites);
        if diagonal.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: diagonal.len(),
            });
        }
        let mut m = Matrix::zeros(dim, dim);
        for (i, &d) in diagonal.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        Ok(Self::from_matrix_unchecked(n_sites, m))
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

    /// Real parts of the diagonal.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)] == ZERO))
    }

    /// True when the operator is diagonal with entries exactly 0 or 1.
    pub fn is_diagonal_projector(&self) -> bool {
        self.is_diagonal()
            && (0..self.dim()).all(|i| {
                let d = self.matrix[(i, i)];
                d == ZERO || d == ONE
            })
    }

    /// Largest entry of `A − c·1`, where `c` is the mean of the diagonal.
    ///
    /// Zero exactly when the operator is a multiple of the identity.
    pub fn identity_residual(&self) -> f64 {
        let n = self.dim();
        let mean = self.matrix.trace() / Complex64::new(n as f64, 0.0);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { mean } else { ZERO };
                worst = worst.max((self.matrix[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// Largest entry of the commutator `[A, B]`.
    pub fn commutator_residual(&self, other: &HermitianOperator) -> f64 {
        let ab = &self.matrix * &other.matrix;
        let ba = &other.matrix * &self.matrix;
        max_abs_diff(&ab, &ba)
    }

    pub fn expectation(&self, state: &Vector) -> f64 {
        state.dotc(&(&self.matrix * state)).re
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_matrix_unchecked(self.n_sites, &self.matrix * Complex64::new(factor, 0.0))
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;

    fn add(self, rhs: Self) -> HermitianOperator {
        assert_eq!(self.n_sites, rhs.n_sites, "operator size mismatch");
        HermitianOperator::from_matrix_unchecked(self.n_sites, &self.matrix + &rhs.matrix)
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;

    fn sub(self, rhs: Self) -> HermitianOperator {
        assert_eq!(self.n_sites, rhs.n_sites, "operator size mismatch");
        HermitianOperator::from_matrix_unchecked(self.n_sites, &self.matrix - &rhs.matrix)
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;

    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scaled(rhs)
    }
}

/// Single-site operators used to assemble Pauli strings.
///
/// `Raise` is `σ⁺ = |↑⟩⟨↓|` and `Lower` is `σ⁻ = |↓⟩⟨↑|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
    Raise,
    Lower,
}

impl Pauli {
    /// 2×2 matrix in the (up, down) ordering.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -i], [i, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
            Pauli::Raise => [[ZERO, ONE], [ZERO, ZERO]],
            Pauli::Lower => [[ZERO, ZERO], [ONE, ZERO]],
        }
    }
}

/// Kronecker product `⊗ₙ Pₙ` with identities on unlisted sites.
///
/// Built by explicit tensor products, independently of the bit-twiddling
/// kernels used for evolution, so it doubles as a reference in tests.
pub fn pauli_product(n_sites: usize, factors: &[(usize, Pauli)]) -> Matrix {
    let mut out = Matrix::from_element(1, 1, ONE);
    for site in 1..=n_sites {
        let mut local = Matrix::identity(2, 2);
        for &(s, p) in factors {
            if s == site {
                let m = p.matrix();
                let f = Matrix::from_fn(2, 2, |r, c| m[r][c]);
                local = &local * &f;
            }
        }
        out = out.kronecker(&local);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_product_matches_bit_convention() {
        // σᶻ on site 1 of a 3-site chain flips sign on indices with the top bit set.
        let z1 = pauli_product(3, &[(1, Pauli::Z)]);
        for idx in 0..8 {
            assert_eq!(z1[(idx, idx)].re, spin_z(3, idx, 1));
        }
        // σ⁺ on site 2 maps ↓ (bit set) to ↑.
        let raise = pauli_product(2, &[(2, Pauli::Raise)]);
        assert_eq!(raise[(0b00, 0b01)], ONE);
        assert_eq!(raise[(0b01, 0b00)], ZERO);
    }

    #[test]
    fn hermiticity_is_enforced() {
        let mut m = Matrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(0.0, 1.0);
        assert!(HermitianOperator::new(1, m.clone()).is_err());
        m[(1, 0)] = Complex64::new(0.0, -1.0);
        assert!(HermitianOperator::new(1, m).is_ok());
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let m = Matrix::identity(3, 3);
        assert!(matches!(
            HermitianOperator::new(2, m),
            Err(Error::DimensionMismatch { expected: 4, .. })
        ));
    }

    #[test]
    fn identity_residual_detects_off_identity_parts() {
        let id = HermitianOperator::identity(2).scaled(3.5);
        assert_eq!(id.identity_residual(), 0.0);
        let z = HermitianOperator::new(2, pauli_product(2, &[(1, Pauli::Z)])).unwrap();
        assert_eq!(z.identity_residual(), 1.0);
    }
}
