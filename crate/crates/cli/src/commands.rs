//! Subcommand implementations. Each returns the exit status; errors that
//! stem from bad input are wrapped in [`UsageError`].

use std::fmt::{self, Write as _};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use schwinger_core::circuit::{
    circuit_to_pulses, circuit_unitary, compile_step, compile_trotter, format_pulse_program,
    step_target, Angle, Circuit, Gate,
};
use schwinger_core::operator::{max_abs_diff, Matrix};

use crate::checks::{self, CheckOutcome};
use crate::config::RunConfig;
use crate::output::{
    write_records, write_sweep, EvolveSummary, SeriesSummary, SweepPointSummary, SweepSummary,
    CSV_HEADER,
};
use crate::run::{self, SweepAxis};

/// Success, a failed check or verification, and invalid input.
pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Residual accepted by `compile --verify`.
pub const VERIFY_TOLERANCE: f64 = 1e-10;

/// Marks errors caused by the invocation rather than by the run.
#[derive(Debug)]
pub struct UsageError(pub anyhow::Error);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| UsageError(e).into())
}

/// Exit status for an error returned by a command.
pub fn exit_code_for(error: &anyhow::Error) -> u8 {
    if error.is::<UsageError>() {
        EXIT_USAGE
    } else {
        EXIT_CHECK_FAILED
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

/// The summary goes next to the CSV as `<output>.json`, or to stderr.
fn write_summary<T: serde::Serialize>(output: Option<&Path>, summary: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(summary)? + "\n";
    match output {
        Some(p) => {
            let path = summary_path(p);
            std::fs::write(&path, text)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => eprint!("{text}"),
    }
    Ok(())
}

pub fn summary_path(output: &Path) -> PathBuf {
    output.with_extension("json")
}

pub fn evolve(config: &RunConfig) -> Result<u8> {
    let config = usage(config.with_resolved_step_time())?;
    let run = usage(config.resolve())?;
    let records = run::simulate(&run)?;
    let output = config.output.as_deref();
    write_records(open_output(output)?, &records)?;
    write_summary(
        output,
        &EvolveSummary {
            command: "evolve",
            config: &config,
            csv_columns: CSV_HEADER,
            series: SeriesSummary::of(&records),
        },
    )?;
    Ok(EXIT_OK)
}

pub fn sweep(config: &RunConfig, axis: SweepAxis, values: &[f64], jobs: usize) -> Result<u8> {
    let points = match run::sweep(config, axis, values, jobs) {
        Ok(p) => p,
        // Every point is validated before any work starts, so a failure
        // here is almost always bad input; recheck to classify it.
        Err(e) => {
            let bad_input = values.is_empty()
                || values
                    .iter()
                    .any(|&v| axis.apply(config, v).and_then(|c| c.resolve()).is_err());
            return Err(if bad_input { UsageError(e).into() } else { e });
        }
    };
    let output = config.output.as_deref();
    write_sweep(open_output(output)?, &points)?;
    write_summary(
        output,
        &SweepSummary {
            command: "sweep",
            config,
            axis: axis.name(),
            values: values.to_vec(),
            points: points
                .iter()
                .map(|(v, r)| SweepPointSummary {
                    axis_value: *v,
                    series: SeriesSummary::of(r),
                })
                .collect(),
        },
    )?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Emit {
    Gates,
    Pulses,
}

fn numeric(angle: Angle) -> Angle {
    Angle::numeric(angle.radians)
}

/// Drops symbolic annotations so that listings show evaluated angles.
fn strip_symbols(gate: Gate) -> Gate {
    match gate {
        Gate::CollectiveRotation { theta, phi, active } => Gate::CollectiveRotation {
            theta: numeric(theta),
            phi,
            active,
        },
        Gate::AddressedRotation { theta, phi, site } => Gate::AddressedRotation {
            theta: numeric(theta),
            phi,
            site,
        },
        Gate::EntanglingMS { theta, phi, active } => Gate::EntanglingMS {
            theta: numeric(theta),
            phi,
            active,
        },
        Gate::AddressedZ { theta, site } => Gate::AddressedZ {
            theta: numeric(theta),
            site,
        },
        g => g,
    }
}

/// One gate per line, each window introduced by a `#` header.
pub fn gate_listing(circuit: &Circuit, symbolic: bool) -> String {
    let mut out = String::new();
    for (k, gate) in circuit.gates().iter().enumerate() {
        for w in circuit.windows().iter().filter(|w| w.gates.start == k) {
            let _ = writeln!(
                out,
                "# step {} section {} ({}) window {}",
                w.step + 1,
                w.section.label(),
                w.section.name(),
                w.index
            );
        }
        let gate = if symbolic { *gate } else { strip_symbols(*gate) };
        let _ = writeln!(out, "{gate}");
    }
    out
}

/// The compiled circuit as text, plus the circuit itself.
pub fn compile_text(
    config: &RunConfig,
    emit: Emit,
    symbolic: bool,
    full: bool,
) -> Result<(String, Circuit)> {
    let params = usage(config.model_params(false))?;
    let schedule = usage(config.trotter_schedule())?;
    let circuit = if full {
        compile_trotter(&params, &schedule)
    } else {
        compile_step(&params, &schedule)
    };
    let circuit = usage(circuit.map_err(Into::into))?;
    let text = match emit {
        Emit::Gates => gate_listing(&circuit, symbolic),
        Emit::Pulses => format_pulse_program(&circuit_to_pulses(&circuit, symbolic)),
    };
    Ok((text, circuit))
}

/// Residual between the circuit unitary and the section-exact target
/// raised to the number of steps the circuit contains.
pub fn verify_residual(config: &RunConfig, circuit: &Circuit, steps: usize) -> Result<f64> {
    let params = config.model_params(false)?;
    let schedule = config.trotter_schedule()?;
    let u = circuit_unitary(circuit)?;
    let step = step_target(&params, &schedule)?;
    let dim = step.nrows();
    let target = (0..steps).fold(Matrix::identity(dim, dim), |acc, _| &step * acc);
    Ok(max_abs_diff(&u, &target))
}

pub fn compile(config: &RunConfig, emit: Emit, symbolic: bool, full: bool, verify: bool) -> Result<u8> {
    let (text, circuit) = compile_text(config, emit, symbolic, full)?;
    let mut out = open_output(config.output.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    if !verify {
        return Ok(EXIT_OK);
    }
    let steps = if full { config.schedule.n_steps } else { 1 };
    let residual = usage(verify_residual(config, &circuit, steps))?;
    let passed = residual < VERIFY_TOLERANCE;
    eprintln!(
        "verify: residual {residual:.3e} against the section-exact target (tolerance {VERIFY_TOLERANCE:e}) {}",
        if passed { "PASS" } else { "FAIL" }
    );
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn format_outcome(c: &CheckOutcome) -> String {
    format!(
        "{} {}: {}",
        if c.passed { "PASS" } else { "FAIL" },
        c.name,
        c.detail
    )
}

pub fn check(fixture: Option<&Path>) -> Result<u8> {
    let text = match fixture {
        Some(p) => usage(
            std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display())),
        )?,
        None => checks::TABLE1_FIXTURE.to_string(),
    };
    let outcomes = checks::run_all(&text);
    for c in &outcomes {
        println!("{}", format_outcome(c));
    }
    let failed = outcomes.iter().filter(|c| !c.passed).count();
    println!("{} of {} checks passed", outcomes.len() - failed, outcomes.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
}
