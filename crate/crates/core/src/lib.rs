//! Classical simulator and gate compiler for the lattice Schwinger model in
//! its encoded spin form.
//!
//! The gauge fields are eliminated through the Gauss law, leaving `N` spins
//! with long-range `σᶻσᶻ` couplings. This crate builds the resulting
//! Hamiltonians, evolves states exactly or through a compiled trapped-ion
//! gate sequence (collective rotations, Mølmer–Sørensen gates, addressed
//! `Z` rotations and hiding), applies a per-qubit dephasing channel, and
//! evaluates the observables of pair creation: particle number density,
//! vacuum persistence, rate function and negativities.
//!
//! The crate is `no_std` and only needs `alloc`. The `std` feature makes
//! dependencies use std float math, so results are bit-identical however
//! the build graph is composed.
//!
//! # Conventions
//!
//! - Sites are numbered `1..=N`. Site 1 is the most significant bit of a
//!   basis index.
//! - A zero bit is spin up (`σᶻ = +1`), a one bit is spin down.
//! - Odd sites are empty when up, even sites are empty when down. The bare
//!   vacuum is `↑↓↑↓…`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod circuit;
pub mod engine;
mod error;
pub mod model;
pub mod observables;
pub mod operator;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Largest chain supported by the pure-state backend.
pub const MAX_PURE_SITES: usize = 12;
/// Largest chain supported by the density-matrix backend.
pub const MAX_DENSITY_SITES: usize = 8;
