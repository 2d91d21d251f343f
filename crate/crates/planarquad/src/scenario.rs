//! Declarative scenario files.
//!
//! A scenario is a TOML document with a few top-level keys and one level of
//! tables for the signal, simulation grid, gains and setpoint:
//!
//! ```toml
//! name = "closed_x_linear"
//! plant = "linear"
//! outputs = ["csv", "metrics"]
//!
//! [sim]
//! dt = 1e-4
//! t_end = 3.0
//!
//! [signal]
//! kind = "closed_loop"
//!
//! [setpoint]
//! x_des = 1.0
//! ```

use std::path::{Path, PathBuf};

use planarquad_core::{
    CascadedPd, Channel, GainMapping, InputLimits, InputSignal, OuterSign, PdGains, Plant,
    QuadParams, RateReference, Setpoint, SimConfig, State, StepChannel,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCENARIO_DIR_ENV: &str = "PLANARQUAD_SCENARIO_DIR";
pub const DEFAULT_DT: f64 = planarquad_core::sim::DEFAULT_DT;
pub const DEFAULT_T_END: f64 = 2.0;
/// Sinusoid defaults: 1 N at 1 Hz.
pub const DEFAULT_SINE_AMPLITUDE: f64 = 1.0;
pub const DEFAULT_SINE_FREQUENCY_HZ: f64 = 1.0;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse scenario {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Csv,
    Metrics,
    Comparison,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalSpec {
    Step {
        #[serde(default)]
        u1_amp: f64,
        #[serde(default)]
        u2_amp: f64,
        #[serde(default)]
        hover_offset: bool,
    },
    Sinusoid {
        channel: StepChannel,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default = "default_frequency")]
        frequency_hz: f64,
        /// Defaults to hover thrust on `u1` and 0 on `u2`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<f64>,
    },
    Constant {
        /// Defaults to hover thrust.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u1: Option<f64>,
        #[serde(default)]
        u2: f64,
    },
    ClosedLoop,
}

fn default_amplitude() -> f64 {
    DEFAULT_SINE_AMPLITUDE
}

fn default_frequency() -> f64 {
    DEFAULT_SINE_FREQUENCY_HZ
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<State>,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_t_end() -> f64 {
    DEFAULT_T_END
}

impl Default for SimSpec {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            t_end: DEFAULT_T_END,
            initial_state: None,
        }
    }
}

/// Controller settings. Unset gains fall back to the tuned values of `mapping`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainSpec {
    #[serde(default)]
    pub mapping: GainMapping,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kp_y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kd_y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kp_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kd_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kp_phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kd_phi: Option<f64>,
    #[serde(default)]
    pub outer_sign: OuterSign,
    #[serde(default)]
    pub rate_reference: RateReference,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u1_limits: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u2_limits: Option<[f64; 2]>,
}

impl GainSpec {
    pub fn controller(&self) -> Result<CascadedPd, ScenarioError> {
        let base = PdGains::tuned(self.mapping);
        let gains = PdGains {
            kp_y: self.kp_y.unwrap_or(base.kp_y),
            kd_y: self.kd_y.unwrap_or(base.kd_y),
            kp_x: self.kp_x.unwrap_or(base.kp_x),
            kd_x: self.kd_x.unwrap_or(base.kd_x),
            kp_phi: self.kp_phi.unwrap_or(base.kp_phi),
            kd_phi: self.kd_phi.unwrap_or(base.kd_phi),
        };
        if !gains.is_finite() {
            return Err(ScenarioError::Invalid("gains must be finite".into()));
        }
        let limits = match (self.u1_limits, self.u2_limits) {
            (None, None) => None,
            (a, b) => Some(
                InputLimits::new(a.map(|[l, h]| (l, h)), b.map(|[l, h]| (l, h)))
                    .map_err(|e| ScenarioError::Invalid(e.to_string()))?,
            ),
        };
        Ok(CascadedPd {
            gains,
            outer_sign: self.outer_sign,
            rate_reference: self.rate_reference,
            limits,
        })
    }
}

/// Channel and threshold used for the linear-vs-nonlinear divergence time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonSpec {
    pub channel: Channel,
    pub threshold: f64,
}

impl Default for ComparisonSpec {
    fn default() -> Self {
        Self {
            channel: Channel::X,
            threshold: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub plant: Plant,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<OutputKind>,
    #[serde(default)]
    pub sim: SimSpec,
    pub signal: SignalSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<GainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setpoint: Option<Setpoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<QuadParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonSpec>,
}

fn default_outputs() -> Vec<OutputKind> {
    vec![OutputKind::Csv, OutputKind::Metrics]
}

impl Scenario {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self, ScenarioError> {
        let sc: Scenario = toml::from_str(text).map_err(|e| ScenarioError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario fields are all representable in TOML")
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: &str| Err(ScenarioError::Invalid(m.into()));
        if self.name.is_empty() {
            return bad("name must be nonempty");
        }
        let safe = |c: char| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.';
        if !self.name.chars().all(safe) || self.name.starts_with('.') {
            return bad("name may only contain ASCII letters, digits, '_', '-' and '.'");
        }
        let closed = matches!(self.signal, SignalSpec::ClosedLoop);
        if closed && self.setpoint.is_none() {
            return bad("closed_loop signal requires a [setpoint] table");
        }
        if !closed && (self.gains.is_some() || self.setpoint.is_some()) {
            return bad("[gains] and [setpoint] only apply to closed_loop signals");
        }
        if let SignalSpec::Sinusoid { frequency_hz, .. } = self.signal {
            if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
                return bad("sinusoid frequency_hz must be positive");
            }
        }
        if let Some(g) = &self.gains {
            g.controller()?;
        }
        if let Some(p) = &self.params {
            p.validate()
                .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        }
        if let Some(c) = &self.comparison {
            if !(c.threshold.is_finite() && c.threshold > 0.0) {
                return bad("comparison threshold must be positive");
            }
        }
        self.sim_config(None, None)
            .validate()
            .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        Ok(())
    }

    pub fn params(&self) -> QuadParams {
        self.params.unwrap_or_default()
    }

    /// Grid for this scenario, optionally overriding `dt` and `t_end`.
    pub fn sim_config(&self, dt: Option<f64>, t_end: Option<f64>) -> SimConfig {
        SimConfig::new(
            self.plant,
            dt.unwrap_or(self.sim.dt),
            t_end.unwrap_or(self.sim.t_end),
            self.sim.initial_state.unwrap_or(State::ZERO),
        )
    }

    pub fn signal(&self) -> Result<InputSignal, ScenarioError> {
        let hover = self.params().hover_thrust();
        Ok(match self.signal {
            SignalSpec::Step {
                u1_amp,
                u2_amp,
                hover_offset,
            } => InputSignal::Step {
                u1_amp,
                u2_amp,
                hover_offset,
            },
            SignalSpec::Sinusoid {
                channel,
                amplitude,
                frequency_hz,
                offset,
            } => InputSignal::Sinusoid {
                channel,
                amplitude,
                frequency_hz,
                offset: offset.unwrap_or(match channel {
                    StepChannel::U1 => hover,
                    StepChannel::U2 => 0.0,
                }),
            },
            SignalSpec::Constant { u1, u2 } => InputSignal::Constant {
                u1: u1.unwrap_or(hover),
                u2,
            },
            SignalSpec::ClosedLoop => InputSignal::ClosedLoop {
                controller: self.gains.unwrap_or_default().controller()?,
                setpoint: self
                    .setpoint
                    .ok_or_else(|| ScenarioError::Invalid("missing setpoint".into()))?,
            },
        })
    }

    pub fn comparison(&self) -> ComparisonSpec {
        self.comparison.unwrap_or_default()
    }
}

/// Directory searched for scenario names that are not existing paths.
pub fn scenario_dir() -> PathBuf {
    std::env::var_os(SCENARIO_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("scenarios"))
}

/// Resolves `arg` as a path, then as `<dir>/<arg>` and `<dir>/<arg>.toml`.
pub fn resolve(arg: &str) -> PathBuf {
    let direct = PathBuf::from(arg);
    if direct.is_file() {
        return direct;
    }
    let dir = scenario_dir();
    let candidates = [dir.join(arg), dir.join(format!("{arg}.toml"))];
    candidates
        .into_iter()
        .find(|p| p.is_file())
        .unwrap_or(direct)
}
