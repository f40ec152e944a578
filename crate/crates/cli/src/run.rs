//! Time-evolution pipelines behind `evolve` and `sweep`.

use anyhow::{bail, Result};
use rayon::prelude::*;

use schwinger_core::circuit::{exact_series, trotter_evolve};
use schwinger_core::engine::{sample_populations, DensityMatrix, PureState, QuantumState};
use schwinger_core::model::BasisState;
use schwinger_core::observables::{
    particle_number_density_from_populations, rate_function_clipped, time_series,
    ObservableRecord, SeriesOptions,
};

use crate::config::{Backend, Resolved, RunConfig};

/// Evolves the vacuum with the configured backend and returns one record
/// per step boundary, the initial state included.
pub fn simulate(run: &Resolved) -> Result<Vec<ObservableRecord>> {
    let params = &run.params;
    let n = params.n_sites;
    let vacuum = params.vacuum().index();
    let states = match run.backend {
        Backend::ExactPure => exact_series(
            params,
            run.schedule.step_time,
            run.schedule.n_steps,
            &PureState::basis(n, vacuum)?.into(),
        )?,
        Backend::TrotterPure => {
            trotter_evolve(params, &run.schedule, &PureState::basis(n, vacuum)?.into(), None)?
        }
        Backend::TrotterNoisy => trotter_evolve(
            params,
            &run.schedule,
            &DensityMatrix::basis(n, vacuum)?.into(),
            run.noise,
        )?,
    };
    let options = SeriesOptions {
        step_time: run.schedule.step_time,
        cut: run.cut,
        postselect: run.postselect,
    };
    let mut records = time_series(&states, params, &options)?;
    if let Some(shots) = run.shots {
        for (k, (rec, state)) in records.iter_mut().zip(&states).enumerate() {
            apply_shot_noise(rec, state, run, shots, k)?;
        }
    }
    Ok(records)
}

/// Replaces the population-based columns by finite-shot estimates. Each
/// step draws from its own stream, `seed + step`.
fn apply_shot_noise(
    rec: &mut ObservableRecord,
    state: &QuantumState,
    run: &Resolved,
    shots: usize,
    step: usize,
) -> Result<()> {
    let n = run.params.n_sites;
    let mut pops = state.populations();
    if run.postselect {
        for (i, p) in pops.iter_mut().enumerate() {
            if BasisState::from_index(n, i).charge() != 0 {
                *p = 0.0;
            }
        }
    }
    let draws = sample_populations(&pops, shots, run.seed.wrapping_add(step as u64))?;
    let mut counts = vec![0usize; pops.len()];
    for i in draws {
        counts[i] += 1;
    }
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / shots as f64).collect();
    rec.nu = particle_number_density_from_populations(n, &freq);
    rec.g2 = freq[run.params.vacuum().index()];
    (rec.lambda, rec.lambda_clipped) = rate_function_clipped(rec.g2, n);
    Ok(())
}

/// Sweepable configuration fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepAxis {
    #[value(name = "m")]
    M,
    #[value(name = "J", alias = "j")]
    J,
    #[value(name = "w")]
    W,
    #[value(name = "N", alias = "n")]
    N,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::M => "m",
            SweepAxis::J => "J",
            SweepAxis::W => "w",
            SweepAxis::N => "N",
        }
    }

    /// Copy of `base` with this field set to `value`. A default step time
    /// is re-derived per point, so a `w` sweep keeps `w·n_steps·T` fixed.
    pub fn apply(self, base: &RunConfig, value: f64) -> Result<RunConfig> {
        let mut c = base.clone();
        match self {
            SweepAxis::M => c.params.m = value,
            SweepAxis::J => c.params.j = value,
            SweepAxis::W => c.params.w = value,
            SweepAxis::N => {
                if value.fract() != 0.0 || value < 0.0 {
                    bail!("N must be a non-negative integer, got {value}");
                }
                c.params.n_sites = value as usize;
                // A fixed cut may not fit every size; fall back to N/2.
                c.cut = None;
            }
        }
        Ok(c)
    }
}

/// Runs every sweep point on at most `jobs` threads. Results keep the
/// order of `values` whatever the completion order.
pub fn sweep(
    base: &RunConfig,
    axis: SweepAxis,
    values: &[f64],
    jobs: usize,
) -> Result<Vec<(f64, Vec<ObservableRecord>)>> {
    if values.is_empty() {
        bail!("sweep needs at least one value");
    }
    if base.cut.is_some() && axis == SweepAxis::N {
        bail!("a fixed cut cannot be combined with an N sweep");
    }
    // Validate every point before starting any work.
    let runs = values
        .iter()
        .map(|&v| axis.apply(base, v)?.resolve())
        .collect::<Result<Vec<_>>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()?;
    let results = pool.install(|| runs.par_iter().map(simulate).collect::<Vec<_>>());
    values
        .iter()
        .zip(results)
        .map(|(&v, r)| Ok((v, r?)))
        .collect()
}
