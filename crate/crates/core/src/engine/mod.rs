//! State representations and the exact backends: unitary evolution,
//! dephasing, post-selection, partial transposition, shot sampling and seeded random states.

mod channel;
mod partial;
mod random;
mod sampling;
mod spectral;
mod state;

pub use channel::{
    apply_dephasing, apply_phase_flip, postselect, postselect_pure, DephasingModel, MIN_RETENTION,
};
pub use partial::{partial_transpose, partial_transpose_right, trace_norm_hermitian};
pub use random::{random_density_matrix, random_pure_state};
pub use sampling::{sample_populations, sample_shots};
pub use spectral::{evolve_exact, evolve_exact_density, hermitian_eigenvalues, Spectral};
pub use state::{DensityMatrix, PureState, QuantumState};
