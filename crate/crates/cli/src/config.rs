//! Run configuration: a JSON document whose field names mirror the core
//! parameter types. Command-line flags override values read from a file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use schwinger_core::circuit::{HoppingStyle, Section, TrotterSchedule};
use schwinger_core::engine::DephasingModel;
use schwinger_core::model::ModelParams;
use schwinger_core::MAX_DENSITY_SITES;

/// Simulated time `w·n_steps·T` when no step time is given.
pub const DEFAULT_TOTAL_WT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Exact evolution of a state vector under the full Hamiltonian.
    ExactPure,
    /// Compiled gate sequence applied to a state vector.
    TrotterPure,
    /// Compiled steps on a density matrix with dephasing after each step.
    TrotterNoisy,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::ExactPure => "exact-pure",
            Backend::TrotterPure => "trotter-pure",
            Backend::TrotterNoisy => "trotter-noisy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub n_sites: usize,
    pub w: f64,
    pub j: f64,
    pub m: f64,
    pub epsilon0: i64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            n_sites: 4,
            w: 1.0,
            j: 1.0,
            m: 0.5,
            epsilon0: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    /// `T`; defaults to `4 / (w·n_steps)`.
    pub step_time: Option<f64>,
    pub n_steps: usize,
    pub j0: f64,
    /// Section names `ZZ`, `PM` and `Z` in application order.
    pub section_order: [String; 3],
    pub z_shift: bool,
    /// `conjugated` or `phase-shifted`.
    pub hopping_style: String,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            step_time: None,
            n_steps: 16,
            j0: 1.0,
            section_order: TrotterSchedule::DEFAULT_ORDER.map(|s| s.name().to_string()),
            z_shift: true,
            hopping_style: "conjugated".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsConfig,
    pub schedule: ScheduleConfig,
    pub backend: Backend,
    /// Phase-flip probability per site and step (`trotter-noisy` only).
    pub noise_p: f64,
    /// Project onto the charge-zero subspace before measuring.
    pub postselect: bool,
    /// Bipartition after this site; defaults to `N/2`.
    pub cut: Option<usize>,
    pub output: Option<PathBuf>,
    pub seed: u64,
    /// Estimate `nu`, `g2` and `lambda` from this many sampled shots per
    /// step instead of exact populations.
    pub shots: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ParamsConfig::default(),
            schedule: ScheduleConfig::default(),
            backend: Backend::ExactPure,
            noise_p: 0.0,
            postselect: false,
            cut: None,
            output: None,
            seed: 0,
            shots: None,
        }
    }
}

/// A configuration checked against the core invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub params: ModelParams,
    pub schedule: TrotterSchedule,
    pub backend: Backend,
    pub noise: Option<DephasingModel>,
    pub postselect: bool,
    pub cut: usize,
    pub seed: u64,
    pub shots: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    /// Step time after applying the default `w·n_steps·T = 4`.
    pub fn step_time(&self) -> Result<f64> {
        if let Some(t) = self.schedule.step_time {
            return Ok(t);
        }
        let n = self.schedule.n_steps;
        if n == 0 {
            return Ok(0.0);
        }
        if self.params.w <= 0.0 {
            bail!("step_time must be given explicitly when w = 0");
        }
        Ok(DEFAULT_TOTAL_WT / (self.params.w * n as f64))
    }

    /// Copy with the default step time written out, as echoed in summaries.
    pub fn with_resolved_step_time(&self) -> Result<Self> {
        let mut c = self.clone();
        c.schedule.step_time = Some(self.step_time()?);
        Ok(c)
    }

    /// Model parameters; odd chains are accepted when `even` is false.
    pub fn model_params(&self, even: bool) -> Result<ModelParams> {
        let p = &self.params;
        let params = ModelParams {
            n_sites: p.n_sites,
            w: p.w,
            j: p.j,
            m: p.m,
            epsilon0: p.epsilon0,
        };
        if even {
            params.validate()?;
        } else {
            params.validate_chain()?;
        }
        Ok(params)
    }

    pub fn trotter_schedule(&self) -> Result<TrotterSchedule> {
        let s = &self.schedule;
        let mut order = [Section::Zz; 3];
        for (slot, name) in order.iter_mut().zip(&s.section_order) {
            *slot = name.parse()?;
        }
        let schedule = TrotterSchedule::new(self.step_time()?, s.n_steps)?
            .with_j0(s.j0)
            .with_order(order)
            .with_z_shift(s.z_shift)
            .with_hopping_style(s.hopping_style.parse::<HoppingStyle>()?);
        schedule.validate()?;
        Ok(schedule)
    }

    /// Validates the whole configuration for a time-evolution run.
    pub fn resolve(&self) -> Result<Resolved> {
        let params = self.model_params(true)?;
        let schedule = self.trotter_schedule()?;
        let n = params.n_sites;
        let noise = match self.backend {
            Backend::TrotterNoisy => {
                if n > MAX_DENSITY_SITES {
                    bail!(
                        "size limit: trotter-noisy uses density matrices, which support at most {MAX_DENSITY_SITES} sites (got {n})"
                    );
                }
                Some(DephasingModel::new(self.noise_p)?)
            }
            _ => {
                if self.noise_p != 0.0 {
                    bail!(
                        "noise_p = {} needs the trotter-noisy backend, not {}",
                        self.noise_p,
                        self.backend.as_str()
                    );
                }
                None
            }
        };
        let cut = self.cut.unwrap_or(n / 2);
        if cut == 0 || cut >= n {
            bail!("cut must lie in 1..{n}, got {cut}");
        }
        if self.shots == Some(0) {
            bail!("shots must be positive");
        }
        Ok(Resolved {
            params,
            schedule,
            backend: self.backend,
            noise,
            postselect: self.postselect,
            cut,
            seed: self.seed,
            shots: self.shots,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_documented_grid() {
        let c = RunConfig::default();
        let r = c.resolve().unwrap();
        assert_eq!(r.params.n_sites, 4);
        assert_eq!(r.schedule.n_steps, 16);
        assert!((r.params.w * 16.0 * r.schedule.step_time - 4.0).abs() < 1e-15);
        assert_eq!(r.cut, 2);
        assert_eq!(r.schedule.section_order, TrotterSchedule::DEFAULT_ORDER);
    }

    #[test]
    fn json_round_trip_and_partial_documents() {
        let c = RunConfig::default().with_resolved_step_time().unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), c);
        let partial: RunConfig =
            serde_json::from_str(r#"{"params": {"m": 2.0}, "backend": "trotter-noisy"}"#).unwrap();
        assert_eq!(partial.params.m, 2.0);
        assert_eq!(partial.params.n_sites, 4);
        assert_eq!(partial.backend, Backend::TrotterNoisy);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = RunConfig::default();
        c.noise_p = 0.03;
        assert!(c.resolve().is_err());
        c.backend = Backend::TrotterNoisy;
        assert!(c.resolve().is_ok());
        c.params.n_sites = 10;
        let err = c.resolve().unwrap_err().to_string();
        assert!(err.contains("size limit"), "{err}");
        let mut c = RunConfig::default();
        c.params.n_sites = 5;
        assert!(c.resolve().is_err());
        assert!(c.model_params(false).is_ok());
        let mut c = RunConfig::default();
        c.cut = Some(4);
        assert!(c.resolve().is_err());
        let mut c = RunConfig::default();
        c.schedule.section_order[0] = "ZZ".into();
        assert!(c.resolve().is_err());
    }

    #[test]
    fn zero_steps_need_no_step_time() {
        let mut c = RunConfig::default();
        c.schedule.n_steps = 0;
        assert_eq!(c.step_time().unwrap(), 0.0);
        c.params.w = 0.0;
        c.schedule.n_steps = 4;
        assert!(c.step_time().is_err());
    }
}
