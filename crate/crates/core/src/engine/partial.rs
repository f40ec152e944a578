use super::spectral::hermitian_eigenvalues;
use super::state::DensityMatrix;
use crate::operator::Matrix;
use crate::{Error, Result};

fn check_cut(n_sites: usize, cut: usize) -> Result<()> {
    if cut == 0 || cut >= n_sites {
        return Err(Error::CutOutOfRange {
            cut,
            sites: n_sites,
        });
    }
    Ok(())
}

fn transpose_block(rho: &DensityMatrix, cut: usize, left: bool) -> Result<Matrix> {
    let n = rho.n_sites();
    check_cut(n, cut)?;
    let right_bits = n - cut;
    let mask = if left {
        !((1usize << right_bits) - 1)
    } else {
        (1usize << right_bits) - 1
    };
    let m = rho.matrix();
    let dim = m.nrows();
    Ok(Matrix::from_fn(dim, dim, |a, b| {
        // Exchange the transposed block's indices between row and column.
        let swap = (a ^ b) & mask;
        m[(a ^ swap, b ^ swap)]
    }))
}

/// Partial transpose over sites `1..=cut`.
pub fn partial_transpose(rho: &DensityMatrix, cut: usize) -> Result<Matrix> {
    transpose_block(rho, cut, true)
}

/// Partial transpose over sites `cut+1..=N`.
pub fn partial_transpose_right(rho: &DensityMatrix, cut: usize) -> Result<Matrix> {
    transpose_block(rho, cut, false)
}

/// `‖A‖₁ = Σ |λᵢ|` for Hermitian `A`.
pub fn trace_norm_hermitian(a: &Matrix) -> f64 {
    hermitian_eigenvalues(a).iter().map(|e| e.abs()).sum()
}
