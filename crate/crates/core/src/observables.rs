//! Quantities reported for pair creation: particle number density, vacuum
//! persistence, rate function, negativities and physical-subspace
//! retention.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::engine::{
    partial_transpose, partial_transpose_right, postselect, postselect_pure, trace_norm_hermitian,
    DensityMatrix, PureState, QuantumState, Spectral,
};
use crate::model::{physical_projector, ModelParams};
use crate::operator::{dim_of, spin_z, HermitianOperator};
use crate::{Error, Result, MAX_PURE_SITES};

/// Floor applied to `|G|²` before taking the logarithm.
pub const G2_FLOOR: f64 = 1e-300;

/// Diagonal operator `(1/2N) Σₗ ((−1)ˡ σᶻₗ + 1)` whose expectation is `ν`.
pub fn particle_number_operator(n_sites: usize) -> HermitianOperator {
    let diag: Vec<f64> = (0..dim_of(n_sites))
        .map(|idx| basis_particle_density(n_sites, idx))
        .collect();
    HermitianOperator::from_diagonal(n_sites, &diag).expect("dimension is consistent")
}

fn basis_particle_density(n_sites: usize, index: usize) -> f64 {
    let sum: f64 = (1..=n_sites)
        .map(|l| {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            sign * spin_z(n_sites, index, l) + 1.0
        })
        .sum();
    sum / (2.0 * n_sites as f64)
}

/// `ν = (1/2N) Σₗ ⟨(−1)ˡ σᶻₗ + 1⟩` from computational-basis populations.
pub fn particle_number_density_from_populations(n_sites: usize, populations: &[f64]) -> f64 {
    populations
        .iter()
        .enumerate()
        .map(|(idx, p)| p * basis_particle_density(n_sites, idx))
        .sum()
}

pub fn particle_number_density(state: &QuantumState) -> f64 {
    particle_number_density_from_populations(state.n_sites(), &state.populations())
}

/// Overlap with the bare vacuum. The amplitude is only available for
/// pure states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumPersistence {
    pub amplitude: Option<Complex64>,
    pub g2: f64,
}

pub fn vacuum_persistence(state: &QuantumState, vacuum_index: usize) -> VacuumPersistence {
    match state {
        QuantumState::Pure(psi) => {
            let g = psi.amplitudes()[vacuum_index];
            VacuumPersistence {
                amplitude: Some(g),
                g2: g.norm_sqr(),
            }
        }
        QuantumState::Mixed(rho) => VacuumPersistence {
            amplitude: None,
            g2: rho.matrix()[(vacuum_index, vacuum_index)].re,
        },
    }
}

/// `λ = −(1/N) ln |G|²`.
pub fn rate_function(g2: f64, n_sites: usize) -> Result<f64> {
    if !(g2 > 0.0) {
        return Err(Error::Domain(g2));
    }
    // Adding zero turns the −0 at g2 = 1 into +0.
    Ok(-libm::log(g2) / n_sites as f64 + 0.0)
}

/// [`rate_function`] with `|G|²` clipped at [`G2_FLOOR`]. Returns the rate
/// and whether clipping happened.
pub fn rate_function_clipped(g2: f64, n_sites: usize) -> (f64, bool) {
    let clipped = !(g2 >= G2_FLOOR);
    let value = if clipped { G2_FLOOR } else { g2 };
    let rate = rate_function(value, n_sites).expect("clipped value is positive");
    (rate, clipped)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Negativities {
    /// `𝒩 = Σ |min(λᵢ, 0)|` over the partial-transpose spectrum.
    pub negativity: f64,
    /// `E = log₂(2𝒩 + 1) = log₂ ‖ρ^{T_A}‖₁`.
    pub log_negativity: f64,
}

impl Negativities {
    /// From the trace norm `‖ρ^{T_A}‖₁ ≥ 1`.
    pub fn from_trace_norm(norm: f64) -> Self {
        let negativity = ((norm - 1.0) / 2.0).max(0.0);
        Self {
            negativity,
            log_negativity: libm::log2(2.0 * negativity + 1.0),
        }
    }
}

/// Negativities across the cut after sites `1..=cut`, transposing the left
/// block.
pub fn negativities(rho: &DensityMatrix, cut: usize) -> Result<Negativities> {
    Ok(Negativities::from_trace_norm(trace_norm_hermitian(
        &partial_transpose(rho, cut)?,
    )))
}

/// Same quantity computed by transposing the right block instead.
pub fn negativities_right(rho: &DensityMatrix, cut: usize) -> Result<Negativities> {
    Ok(Negativities::from_trace_norm(trace_norm_hermitian(
        &partial_transpose_right(rho, cut)?,
    )))
}

/// Pure-state negativities from the Schmidt coefficients:
/// `‖ρ^{T_A}‖₁ = (Σᵢ sᵢ)²`.
pub fn negativities_pure(psi: &PureState, cut: usize) -> Result<Negativities> {
    let n = psi.n_sites();
    if cut == 0 || cut >= n {
        return Err(Error::CutOutOfRange { cut, sites: n });
    }
    let (rows, cols) = (dim_of(cut), dim_of(n - cut));
    // Site 1 is the most significant bit, so the left block indexes rows.
    let m = DMatrix::from_fn(rows, cols, |a, b| psi.amplitudes()[a * cols + b]);
    let s: f64 = m.singular_values().iter().sum();
    Ok(Negativities::from_trace_norm(s * s))
}

pub fn state_negativities(state: &QuantumState, cut: usize) -> Result<Negativities> {
    match state {
        QuantumState::Pure(psi) => negativities_pure(psi, cut),
        QuantumState::Mixed(rho) => negativities(rho, cut),
    }
}

/// One row of a time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRecord {
    pub step: usize,
    /// Dimensionless time `w·t`.
    pub wt: f64,
    pub nu: f64,
    pub g2: f64,
    pub lambda: f64,
    /// `g2` was below [`G2_FLOOR`] and `lambda` uses the floor.
    pub lambda_clipped: bool,
    pub negativity: f64,
    pub log_negativity: f64,
    /// Present only when post-selection is active.
    pub retention: Option<f64>,
}

/// How [`time_series`] samples and processes states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    /// Time between consecutive states.
    pub step_time: f64,
    /// Bipartition after this site.
    pub cut: usize,
    /// Project onto the charge-zero subspace before measuring.
    pub postselect: bool,
}

impl SeriesOptions {
    /// Middle cut, no post-selection.
    pub fn new(params: &ModelParams, step_time: f64) -> Self {
        Self {
            step_time,
            cut: params.n_sites / 2,
            postselect: false,
        }
    }
}

/// Observables of a single state.
pub fn record(
    state: &QuantumState,
    params: &ModelParams,
    step: usize,
    options: &SeriesOptions,
) -> Result<ObservableRecord> {
    let n = params.n_sites;
    if state.n_sites() != n {
        return Err(Error::DimensionMismatch {
            expected: dim_of(n),
            found: dim_of(state.n_sites()),
        });
    }
    let (state, retention) = if options.postselect {
        let p = physical_projector(n)?;
        match state {
            QuantumState::Pure(psi) => {
                let (kept, r) = postselect_pure(psi, &p)?;
                (QuantumState::Pure(kept), Some(r))
            }
            QuantumState::Mixed(rho) => {
                let (kept, r) = postselect(rho, &p)?;
                (QuantumState::Mixed(kept), Some(r))
            }
        }
    } else {
        (state.clone(), None)
    };
    let g2 = vacuum_persistence(&state, params.vacuum().index()).g2;
    let (lambda, lambda_clipped) = rate_function_clipped(g2, n);
    let neg = state_negativities(&state, options.cut)?;
    Ok(ObservableRecord {
        step,
        wt: params.w * step as f64 * options.step_time,
        nu: particle_number_density(&state),
        g2,
        lambda,
        lambda_clipped,
        negativity: neg.negativity,
        log_negativity: neg.log_negativity,
        retention,
    })
}

/// One record per state; state `k` is taken to be at time `k·T`.
pub fn time_series(
    states: &[QuantumState],
    params: &ModelParams,
    options: &SeriesOptions,
) -> Result<Vec<ObservableRecord>> {
    states
        .iter()
        .enumerate()
        .map(|(k, s)| record(s, params, k, options))
        .collect()
}

/// One frequency component of an expectation value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    /// Angular frequency `|Eₖ − Eₗ|`.
    pub frequency: f64,
    /// Amplitude of the `cos`-like oscillation at that frequency.
    pub amplitude: f64,
}

/// Decomposes `⟨ψ(t)|O|ψ(t)⟩` under `H` into oscillating components,
/// merging frequencies closer than `1e-9`. Lines are sorted by frequency;
/// the static part is omitted.
pub fn spectral_lines(
    h: &HermitianOperator,
    state: &PureState,
    observable: &HermitianOperator,
) -> Result<Vec<SpectralLine>> {
    let n = state.n_sites();
    if n > MAX_PURE_SITES || h.dim() != state.dim() || observable.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            found: h.dim().max(observable.dim()),
        });
    }
    // Only eigenvectors overlapping the state contribute.
    let pairs: Vec<(f64, Complex64, crate::operator::Vector)> = Spectral::new(h)
        .eigenpairs()
        .filter_map(|(e, v)| {
            let c = v.dotc(state.amplitudes());
            (c.norm() > 1e-12).then(|| (e, c, v))
        })
        .collect();
    let mut terms: Vec<(f64, Complex64)> = Vec::new();
    for (a, (ea, ca, va)) in pairs.iter().enumerate() {
        let ova = observable.matrix() * va;
        for (eb, cb, vb) in &pairs[a + 1..] {
            let amp = ca.conj() * vb.dotc(&ova).conj() * cb;
            let (freq, amp) = if ea >= eb {
                (ea - eb, amp)
            } else {
                (eb - ea, amp.conj())
            };
            terms.push((freq, amp));
        }
    }
    terms.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut lines: Vec<(f64, Complex64)> = Vec::new();
    for (f, a) in terms {
        match lines.last_mut() {
            Some((lf, la)) if (f - *lf).abs() < 1e-9 => *la += a,
            _ => lines.push((f, a)),
        }
    }
    Ok(lines
        .into_iter()
        .filter(|(f, _)| *f > 1e-9)
        .map(|(frequency, a)| SpectralLine {
            frequency,
            amplitude: 2.0 * a.norm(),
        })
        .collect())
}

/// Frequency of the strongest line.
pub fn dominant_frequency(lines: &[SpectralLine]) -> Option<f64> {
    lines
        .iter()
        .max_by(|a, b| a.amplitude.total_cmp(&b.amplitude))
        .map(|l| l.frequency)
}
