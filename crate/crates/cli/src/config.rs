//! Run configuration: a TOML document with one section per subsystem.
//!
//! ```toml
//! seed = 1
//! horizon = 60.0
//! t_settle = 5.0
//! integrator = "semi_implicit_euler"
//!
//! [plant]
//! a1 = 3.0
//! a2 = 2.0
//! b = 1.0
//!
//! [reference]
//! kind = "sinusoid"
//! amplitude = 1.0
//! angular_frequency = 1.0
//!
//! [base]
//! kind = "noise"
//! lo = -500.0
//! hi = 500.0
//!
//! [stabilizer]
//! variant = "v1"
//! k = 150.0
//! dt = 0.01
//! ```
//!
//! Every key outside this schema is rejected.

use lyapunov_clamp::{
    BaseLaw, Integrator, PlantModel, ReferenceKind, SimulationSetup, StabilizerConfig, State,
    Variant,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use lyapunov_clamp::stabilizer::DEFAULT_SURFACE_GAIN;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

impl ConfigError {
    fn invalid(field: &str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.to_owned(),
            reason: reason.into(),
        }
    }

    /// Dotted path of the offending field, when known.
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Invalid { field, .. } => Some(field),
            ConfigError::Parse(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    #[serde(default = "defaults::horizon")]
    pub horizon: f64,
    #[serde(default = "defaults::t_settle")]
    pub t_settle: f64,
    #[serde(default)]
    pub integrator: Integrator,
    pub plant: PlantSection,
    pub reference: ReferenceKind,
    pub base: BaseSpec,
    pub stabilizer: StabilizerSection,
    #[serde(default)]
    pub x0: InitialState,
    #[serde(default)]
    pub criteria: Criteria,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSection {
    pub a1: f64,
    pub a2: f64,
    pub b: f64,
}

/// Base law selection. The noise generator is seeded with the top-level
/// `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseSpec {
    Noise { lo: f64, hi: f64 },
    Constant { value: f64 },
    Zero,
    Pid { kp: f64, ki: f64, kd: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilizerSection {
    pub variant: Variant,
    #[serde(default = "defaults::k")]
    pub k: f64,
    /// Also the simulation step.
    #[serde(default = "defaults::dt")]
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    #[serde(default)]
    pub x1: f64,
    #[serde(default)]
    pub x2: f64,
}

/// Optional pass/fail bounds applied on top of "completed with no decrease
/// violations".
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Criteria {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_abs_e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_max_abs_u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_max_abs_u: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "defaults::trace")]
    pub trace: String,
    #[serde(default = "defaults::summary")]
    pub summary: String,
    #[serde(default = "defaults::plot")]
    pub plot: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            trace: defaults::trace(),
            summary: defaults::summary(),
            plot: defaults::plot(),
        }
    }
}

mod defaults {
    pub fn seed() -> u64 {
        1
    }
    pub fn horizon() -> f64 {
        60.0
    }
    pub fn t_settle() -> f64 {
        5.0
    }
    pub fn k() -> f64 {
        super::DEFAULT_SURFACE_GAIN
    }
    pub fn dt() -> f64 {
        0.01
    }
    pub fn trace() -> String {
        "trace.csv".into()
    }
    pub fn summary() -> String {
        "summary.json".into()
    }
    pub fn plot() -> String {
        "plot.svg".into()
    }
}

/// Parses and validates a TOML run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn finite(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::invalid(
            field,
            format!("must be finite, got {v}"),
        ))
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::invalid(
            field,
            format!("must be positive, got {v}"),
        ))
    }
}

fn file_name(field: &str, name: &str) -> Result<(), ConfigError> {
    let plain = !name.is_empty()
        && !name.contains(['/', '\\'])
        && name != "."
        && name != ".."
        && !name.contains('\0');
    if plain {
        Ok(())
    } else {
        Err(ConfigError::invalid(
            field,
            format!("must be a plain file name inside the output directory, got {name:?}"),
        ))
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        finite("plant.a1", self.plant.a1)?;
        finite("plant.a2", self.plant.a2)?;
        finite("plant.b", self.plant.b)?;
        if self.plant.b == 0.0 {
            return Err(ConfigError::invalid("plant.b", "must be non-zero"));
        }

        match self.reference {
            ReferenceKind::Sinusoid {
                amplitude,
                angular_frequency,
            } => {
                finite("reference.amplitude", amplitude)?;
                finite("reference.angular_frequency", angular_frequency)?;
            }
            ReferenceKind::Step { level } => finite("reference.level", level)?,
        }

        match self.base {
            BaseSpec::Noise { lo, hi } => {
                finite("base.lo", lo)?;
                finite("base.hi", hi)?;
                if lo >= hi {
                    return Err(ConfigError::invalid(
                        "base.lo",
                        format!("must be below base.hi ({lo} >= {hi})"),
                    ));
                }
                if !(hi - lo).is_finite() {
                    return Err(ConfigError::invalid("base.hi", "noise span overflows"));
                }
            }
            BaseSpec::Constant { value } => finite("base.value", value)?,
            BaseSpec::Zero => {}
            BaseSpec::Pid { kp, ki, kd } => {
                finite("base.kp", kp)?;
                finite("base.ki", ki)?;
                finite("base.kd", kd)?;
            }
        }

        positive("stabilizer.dt", self.stabilizer.dt)?;
        finite("stabilizer.k", self.stabilizer.k)?;
        if self.stabilizer.variant == Variant::V2 {
            positive("stabilizer.k", self.stabilizer.k)?;
        }

        finite("horizon", self.horizon)?;
        if self.horizon < self.stabilizer.dt {
            return Err(ConfigError::invalid(
                "horizon",
                format!("must be at least stabilizer.dt ({})", self.stabilizer.dt),
            ));
        }
        finite("t_settle", self.t_settle)?;
        if !(self.t_settle >= 0.0 && self.t_settle < self.horizon) {
            return Err(ConfigError::invalid(
                "t_settle",
                format!("must lie in [0, horizon), got {}", self.t_settle),
            ));
        }
        finite("x0.x1", self.x0.x1)?;
        finite("x0.x2", self.x0.x2)?;

        if let Some(v) = self.criteria.max_abs_e {
            finite("criteria.max_abs_e", v)?;
        }
        if let Some(v) = self.criteria.min_max_abs_u {
            finite("criteria.min_max_abs_u", v)?;
        }
        if let Some(v) = self.criteria.max_max_abs_u {
            finite("criteria.max_max_abs_u", v)?;
        }

        file_name("output.trace", &self.output.trace)?;
        file_name("output.summary", &self.output.summary)?;
        file_name("output.plot", &self.output.plot)?;
        Ok(())
    }

    /// Builds the simulation inputs. The config must already be valid.
    pub fn build(&self) -> Result<(SimulationSetup, BaseLaw), ConfigError> {
        self.validate()?;
        let core = |field: &str| {
            let field = field.to_owned();
            move |e: lyapunov_clamp::Error| ConfigError::Invalid {
                field: field.clone(),
                reason: e.to_string(),
            }
        };

        let plant = PlantModel::linear(self.plant.a1, self.plant.a2, self.plant.b)
            .map_err(core("plant"))?;
        let stabilizer = StabilizerConfig::new(
            self.stabilizer.variant,
            self.stabilizer.k,
            self.stabilizer.dt,
            plant.clone(),
        )
        .map_err(core("stabilizer"))?;
        let base = match self.base {
            BaseSpec::Noise { lo, hi } => BaseLaw::noise(lo, hi, self.seed),
            BaseSpec::Constant { value } => BaseLaw::constant(value),
            BaseSpec::Zero => Ok(BaseLaw::Zero),
            BaseSpec::Pid { kp, ki, kd } => BaseLaw::pid(kp, ki, kd, self.stabilizer.dt),
        }
        .map_err(core("base"))?;

        let setup = SimulationSetup {
            plant,
            reference: self.reference,
            stabilizer,
            integrator: self.integrator,
            dt: self.stabilizer.dt,
            horizon: self.horizon,
            x0: State::new(self.x0.x1, self.x0.x2),
        };
        setup.validate().map_err(core("config"))?;
        Ok((setup, base))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config always serializes")
    }
}
