use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use schwinger_cli::commands::{self, exit_code_for, usage, Emit};
use schwinger_cli::config::{Backend, RunConfig};
use schwinger_cli::run::SweepAxis;

/// Simulate pair creation in the lattice Schwinger model, exactly or
/// through a compiled trapped-ion gate sequence.
#[derive(Parser)]
#[command(name = "schwinger", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the vacuum and write one CSV row per step boundary.
    Evolve(RunArgs),
    /// Repeat `evolve` over values of one parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        axis: SweepAxis,
        /// Comma-separated parameter values.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        values: Vec<f64>,
        /// Maximum number of sweep points computed concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print the compiled gate sequence or pulse program.
    Compile {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value = "gates")]
        emit: Emit,
        /// Write angles in terms of m, J, w and Delta_t where possible.
        #[arg(long)]
        symbolic: bool,
        /// Compile all n_steps steps instead of a single one.
        #[arg(long)]
        full: bool,
        /// Compare the circuit unitary with the section-exact target.
        #[arg(long)]
        verify: bool,
    },
    /// Run the fast invariant suite.
    Check {
        /// Pulse program to use instead of the built-in Table I fixture.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
}

/// Run configuration; flags override values from `--config`.
#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short = 'N')]
    n_sites: Option<usize>,
    #[arg(long)]
    w: Option<f64>,
    #[arg(long = "J", alias = "j")]
    j: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon0: Option<i64>,
    /// Time T per step; defaults to 4 / (w n_steps).
    #[arg(long)]
    step_time: Option<f64>,
    #[arg(long)]
    n_steps: Option<usize>,
    #[arg(long)]
    j0: Option<f64>,
    /// Comma-separated section order, e.g. PM,Z,ZZ.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    section_order: Option<Vec<String>>,
    /// Keep the unshifted local fields (a Z rotation on every site).
    #[arg(long)]
    no_z_shift: bool,
    /// conjugated or phase-shifted.
    #[arg(long)]
    hopping_style: Option<String>,
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    #[arg(long)]
    noise_p: Option<f64>,
    /// Project onto the charge-zero subspace before measuring.
    #[arg(long)]
    postselect: bool,
    #[arg(long)]
    cut: Option<usize>,
    /// Estimate populations from this many shots per step.
    #[arg(long)]
    shots: Option<usize>,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($field:expr, $value:expr) => {
                if let Some(v) = $value {
                    $field = v;
                }
            };
        }
        set!(c.params.n_sites, self.n_sites);
        set!(c.params.w, self.w);
        set!(c.params.j, self.j);
        set!(c.params.m, self.m);
        set!(c.params.epsilon0, self.epsilon0);
        set!(c.schedule.n_steps, self.n_steps);
        set!(c.schedule.j0, self.j0);
        set!(c.schedule.hopping_style, self.hopping_style);
        set!(c.backend, self.backend);
        set!(c.noise_p, self.noise_p);
        set!(c.seed, self.seed);
        if let Some(t) = self.step_time {
            c.schedule.step_time = Some(t);
        }
        if let Some(order) = self.section_order {
            c.schedule.section_order = [order[0].clone(), order[1].clone(), order[2].clone()];
        }
        if self.no_z_shift {
            c.schedule.z_shift = false;
        }
        if self.postselect {
            c.postselect = true;
        }
        if self.cut.is_some() {
            c.cut = self.cut;
        }
        if self.shots.is_some() {
            c.shots = self.shots;
        }
        if self.output.is_some() {
            c.output = self.output;
        }
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Evolve(args) => commands::evolve(&usage(args.into_config())?),
        Command::Sweep {
            run,
            axis,
            values,
            jobs,
        } => commands::sweep(&usage(run.into_config())?, axis, &values, jobs),
        Command::Compile {
            run,
            emit,
            symbolic,
            full,
            verify,
        } => commands::compile(&usage(run.into_config())?, emit, symbolic, full, verify),
        Command::Check { fixture } => commands::check(fixture.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
