//! Exact evolution through a cached Hermitian eigendecomposition.
//!
//! The matrix is first split into the connected components of its sparsity
//! pattern (for the Schwinger Hamiltonians these are the magnetization
//! sectors) and each block is diagonalized on its own. Real blocks go
//! through the real symmetric solver.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::state::{DensityMatrix, PureState};
use crate::operator::{HermitianOperator, Matrix, Vector, ZERO};
use crate::{Error, Result};

#[derive(Debug, Clone)]
struct Block {
    indices: Vec<usize>,
    energies: Vec<f64>,
    /// Columns are eigenvectors in the block-local basis.
    vectors: Matrix,
}

/// Eigendecomposition of a Hermitian operator, reusable for any time.
#[derive(Debug, Clone)]
pub struct Spectral {
    dim: usize,
    blocks: Vec<Block>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn components(m: &Matrix) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    for j in 0..n {
        for i in 0..j {
            if m[(i, j)] != ZERO || m[(j, i)] != ZERO {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut slot = alloc::vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

fn diagonalize_block(m: &Matrix, indices: Vec<usize>) -> Block {
    let k = indices.len();
    let sub = Matrix::from_fn(k, k, |r, c| m[(indices[r], indices[c])]);
    if sub.iter().all(|z| z.im == 0.0) {
        let real = DMatrix::<f64>::from_fn(k, k, |r, c| sub[(r, c)].re);
        let eig = real.symmetric_eigen();
        Block {
            indices,
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
        }
    } else {
        let eig = sub.symmetric_eigen();
        Block {
            indices,
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }
}

impl Spectral {
    pub fn new(operator: &HermitianOperator) -> Self {
        Self::of_matrix(operator.matrix())
    }

    /// Decomposes a matrix assumed Hermitian.
    pub(crate) fn of_matrix(m: &Matrix) -> Self {
        let blocks = components(m)
            .into_iter()
            .map(|idx| diagonalize_block(m, idx))
            .collect();
        Self {
            dim: m.nrows(),
            blocks,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .blocks
            .iter()
            .flat_map(|b| b.energies.iter().copied())
            .collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// Eigenpairs `(E, v)` with `v` expanded to the full space.
    pub fn eigenpairs(&self) -> impl Iterator<Item = (f64, Vector)> + '_ {
        self.blocks.iter().flat_map(move |b| {
            (0..b.energies.len()).map(move |k| {
                let mut v = Vector::zeros(self.dim);
                for (r, &i) in b.indices.iter().enumerate() {
                    v[i] = b.vectors[(r, k)];
                }
                (b.energies[k], v)
            })
        })
    }

    /// `f(H)` for a real function of the eigenvalues, as a dense matrix.
    pub fn apply_function(&self, f: impl Fn(f64) -> Complex64) -> Matrix {
        let mut out = Matrix::zeros(self.dim, self.dim);
        for b in &self.blocks {
            let phases: Vec<Complex64> = b.energies.iter().map(|&e| f(e)).collect();
            let scaled = Matrix::from_fn(b.vectors.nrows(), b.vectors.ncols(), |r, c| {
                b.vectors[(r, c)] * phases[c]
            });
            let local = &scaled * b.vectors.adjoint();
            for (r, &i) in b.indices.iter().enumerate() {
                for (c, &j) in b.indices.iter().enumerate() {
                    out[(i, j)] = local[(r, c)];
                }
            }
        }
        out
    }

    /// `e^{−iHt}`.
    pub fn unitary(&self, t: f64) -> Matrix {
        self.apply_function(|e| Complex64::cis(-e * t))
    }

    pub fn evolve_vector(&self, v: &Vector, t: f64) -> Vector {
        let mut out = Vector::zeros(self.dim);
        for b in &self.blocks {
            let local = Vector::from_iterator(b.indices.len(), b.indices.iter().map(|&i| v[i]));
            let mut coeffs = b.vectors.ad_mul(&local);
            for (c, &e) in coeffs.iter_mut().zip(&b.energies) {
                *c *= Complex64::cis(-e * t);
            }
            let back = &b.vectors * coeffs;
            for (r, &i) in b.indices.iter().enumerate() {
                out[i] = back[r];
            }
        }
        out
    }

    pub fn evolve(&self, state: &PureState, t: f64) -> Result<PureState> {
        self.check_dim(state.dim())?;
        Ok(PureState::from_vector_unchecked(
            state.n_sites(),
            self.evolve_vector(state.amplitudes(), t),
        ))
    }

    pub fn evolve_density(&self, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        self.check_dim(rho.dim())?;
        let u = self.unitary(t);
        let m = &u * rho.matrix() * u.adjoint();
        Ok(DensityMatrix::from_matrix_unchecked(rho.n_sites(), m))
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &Matrix) -> Vec<f64> {
    Spectral::of_matrix(m).eigenvalues()
}

/// `e^{−iHt}|ψ⟩`.
pub fn evolve_exact(h: &HermitianOperator, state: &PureState, t: f64) -> Result<PureState> {
    Spectral::new(h).evolve(state, t)
}

/// `e^{−iHt} ρ e^{iHt}`.
pub fn evolve_exact_density(
    h: &HermitianOperator,
    rho: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    Spectral::new(h).evolve_density(rho, t)
}
