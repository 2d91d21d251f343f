//! Fixed-step classical RK4 simulation of either plant.
//!
//! Scripted signals are evaluated at each RK4 stage time. A feedback
//! controller is evaluated once per step at the step's start state and held
//! across the stages (zero-order hold).

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::{ceil, round, sin};
use thiserror::Error;

use crate::control::{control_law, CascadedPd, Setpoint};
use crate::dynamics::{deriv_nonlinear, Input, QuadParams, State};
use crate::linear_model::{deriv_linear, linearize, StateSpace};

pub const DEFAULT_DT: f64 = 1e-4;
pub const OPEN_LOOP_T_END: f64 = 2.0;
/// Largest state norm accepted before a run is declared divergent.
pub const DIVERGENCE_CEILING: f64 = 1e9;
pub const MAX_STEPS: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Plant {
    Linear,
    #[default]
    Nonlinear,
}

/// Input channel of a scripted signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StepChannel {
    U1,
    U2,
}

/// A component of the state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Channel {
    X,
    Y,
    Phi,
    Vx,
    Vy,
    Omega,
}

impl Channel {
    pub const ALL: [Channel; 6] = [
        Channel::X,
        Channel::Y,
        Channel::Phi,
        Channel::Vx,
        Channel::Vy,
        Channel::Omega,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["x", "y", "phi", "vx", "vy", "omega"][self.index()]
    }

    pub fn of(self, s: &State) -> f64 {
        s.to_array()[self.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum InputSignal {
    /// Constant from `t = 0`; `hover_offset` adds `m g` to `u1`.
    Step {
        u1_amp: f64,
        u2_amp: f64,
        hover_offset: bool,
    },
    /// `offset + amplitude * sin(2 pi f t)` on one channel, the other held at 0.
    Sinusoid {
        channel: StepChannel,
        amplitude: f64,
        frequency_hz: f64,
        offset: f64,
    },
    Constant {
        u1: f64,
        u2: f64,
    },
    ClosedLoop {
        controller: CascadedPd,
        setpoint: Setpoint,
    },
}

impl InputSignal {
    fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: &str| Err(SimError::InvalidConfig(msg.into()));
        match *self {
            InputSignal::Step { u1_amp, u2_amp, .. } => {
                if !(u1_amp.is_finite() && u2_amp.is_finite()) {
                    return bad("step amplitudes must be finite");
                }
            }
            InputSignal::Sinusoid {
                amplitude,
                frequency_hz,
                offset,
                ..
            } => {
                if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
                    return bad("sinusoid frequency must be positive");
                }
                if !(amplitude.is_finite() && offset.is_finite()) {
                    return bad("sinusoid amplitude and offset must be finite");
                }
            }
            InputSignal::Constant { u1, u2 } => {
                if !(u1.is_finite() && u2.is_finite()) {
                    return bad("constant input must be finite");
                }
            }
            InputSignal::ClosedLoop {
                controller,
                setpoint,
            } => {
                if !controller.gains.is_finite() {
                    return bad("controller gains must be finite");
                }
                if !setpoint.is_finite() {
                    return bad("setpoint must be finite");
                }
            }
        }
        Ok(())
    }

    /// Scripted input at time `t`; `None` for feedback signals.
    fn scripted(&self, t: f64, params: &QuadParams) -> Option<Input> {
        match *self {
            InputSignal::Step {
                u1_amp,
                u2_amp,
                hover_offset,
            } => {
                let base = if hover_offset {
                    params.hover_thrust()
                } else {
                    0.0
                };
                Some(Input::new(base + u1_amp, u2_amp))
            }
            InputSignal::Sinusoid {
                channel,
                amplitude,
                frequency_hz,
                offset,
            } => {
                let v = offset + amplitude * sin(2.0 * PI * frequency_hz * t);
                Some(match channel {
                    StepChannel::U1 => Input::new(v, 0.0),
                    StepChannel::U2 => Input::new(0.0, v),
                })
            }
            InputSignal::Constant { u1, u2 } => Some(Input::new(u1, u2)),
            InputSignal::ClosedLoop { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub plant: Plant,
    pub dt: f64,
    pub t_end: f64,
    pub initial_state: State,
}

impl SimConfig {
    pub fn new(plant: Plant, dt: f64, t_end: f64, initial_state: State) -> Self {
        Self {
            plant,
            dt,
            t_end,
            initial_state,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidConfig(msg));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return bad(format!("t_end must be at least dt, got {}", self.t_end));
        }
        if self.t_end / self.dt > MAX_STEPS {
            return bad(format!("t_end/dt exceeds {MAX_STEPS:e}"));
        }
        if !self.initial_state.is_finite() {
            return bad("initial state must be finite".into());
        }
        Ok(())
    }

    /// Number of integration steps, `ceil(t_end / dt)` with a tolerance for
    /// ratios that are integers up to rounding.
    pub fn steps(&self) -> usize {
        let ratio = self.t_end / self.dt;
        let nearest = round(ratio);
        if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest as usize
        } else {
            ceil(ratio) as usize
        }
    }
}

/// Sampled run. All vectors have equal length; `t[k] = k * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub t: Vec<f64>,
    pub states: Vec<State>,
    pub inputs: Vec<Input>,
    /// Inner-loop reference angle; 0 for scripted runs.
    pub phi_des: Vec<f64>,
}

impl Trajectory {
    fn with_capacity(dt: f64, n: usize) -> Self {
        Self {
            dt,
            t: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            inputs: Vec::with_capacity(n),
            phi_des: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, t: f64, s: State, u: Input, phi_des: f64) {
        self.t.push(t);
        self.states.push(s);
        self.inputs.push(u);
        self.phi_des.push(phi_des);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn channel(&self, ch: Channel) -> Vec<f64> {
        self.states.iter().map(|s| ch.of(s)).collect()
    }

    pub fn last_state(&self) -> Option<&State> {
        self.states.last()
    }

    /// First `n` samples.
    pub fn truncated(&self, n: usize) -> Trajectory {
        let n = n.min(self.len());
        Trajectory {
            dt: self.dt,
            t: self.t[..n].to_vec(),
            states: self.states[..n].to_vec(),
            inputs: self.inputs[..n].to_vec(),
            phi_des: self.phi_des[..n].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("simulation diverged at t = {time} s")]
    Divergence { time: f64, partial: Box<Trajectory> },
    #[error("time grids differ: {0}")]
    GridMismatch(String),
}

impl SimError {
    pub fn partial(&self) -> Option<&Trajectory> {
        match self {
            SimError::Divergence { partial, .. } => Some(partial),
            _ => None,
        }
    }
}

enum Model {
    Nonlinear,
    Linear(StateSpace),
}

impl Model {
    fn deriv(&self, s: &[f64; 6], u: Input, params: &QuadParams) -> [f64; 6] {
        let state = State::from_array(*s);
        match self {
            Model::Nonlinear => deriv_nonlinear(&state, u, params).to_array(),
            Model::Linear(ss) => deriv_linear(&state, [u.u1, u.u2, params.g], ss).to_array(),
        }
    }
}

fn axpy(y: &[f64; 6], a: f64, x: &[f64; 6]) -> [f64; 6] {
    let mut out = *y;
    for (o, v) in out.iter_mut().zip(x) {
        *o += a * v;
    }
    out
}

/// Runs `signal` on the configured plant. Returns `ceil(t_end/dt) + 1` samples
/// or a [`SimError::Divergence`] holding every sample before the failure.
pub fn integrate(
    config: &SimConfig,
    signal: &InputSignal,
    params: &QuadParams,
) -> Result<Trajectory, SimError> {
    config.validate()?;
    signal.validate()?;
    params
        .validate()
        .map_err(|e| SimError::InvalidConfig(format!("{e}")))?;

    let model = match config.plant {
        Plant::Nonlinear => Model::Nonlinear,
        Plant::Linear => Model::Linear(linearize(params)),
    };
    let h = config.dt;
    let steps = config.steps();
    let mut traj = Trajectory::with_capacity(h, steps + 1);

    let command = |t: f64, s: &State| -> (Input, f64) {
        match signal {
            InputSignal::ClosedLoop {
                controller,
                setpoint,
            } => {
                let (u, diag) = control_law(s, setpoint, controller, params);
                (u, diag.phi_des)
            }
            _ => (signal.scripted(t, params).unwrap_or_default(), 0.0),
        }
    };

    let mut x = config.initial_state.to_array();
    for k in 0..steps {
        let t = k as f64 * h;
        let state = State::from_array(x);
        let (u0, phi_des) = command(t, &state);
        traj.push(t, state, u0, phi_des);

        let held = matches!(signal, InputSignal::ClosedLoop { .. });
        let at = |c: f64| {
            if held {
                u0
            } else {
                signal.scripted(t + c * h, params).unwrap_or_default()
            }
        };
        let u_mid = at(0.5);
        let k1 = model.deriv(&x, u0, params);
        let k2 = model.deriv(&axpy(&x, 0.5 * h, &k1), u_mid, params);
        let k3 = model.deriv(&axpy(&x, 0.5 * h, &k2), u_mid, params);
        let k4 = model.deriv(&axpy(&x, h, &k3), at(1.0), params);
        let mut next = x;
        for i in 0..6 {
            next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        let ns = State::from_array(next);
        if !ns.is_finite() || ns.norm() > DIVERGENCE_CEILING {
            return Err(SimError::Divergence {
                time: (k + 1) as f64 * h,
                partial: Box::new(traj),
            });
        }
        x = next;
    }
    let t = steps as f64 * h;
    let state = State::from_array(x);
    let (u, phi_des) = command(t, &state);
    traj.push(t, state, u, phi_des);
    Ok(traj)
}

/// Unit step on one channel with gravity acting, `dt = 1e-4`, 2 s horizon.
/// A `u2` step holds `u1` at hover thrust.
pub fn open_loop_step(
    plant: Plant,
    channel: StepChannel,
    params: &QuadParams,
) -> Result<Trajectory, SimError> {
    open_loop_step_with(plant, channel, params, DEFAULT_DT, OPEN_LOOP_T_END)
}

pub fn open_loop_step_with(
    plant: Plant,
    channel: StepChannel,
    params: &QuadParams,
    dt: f64,
    t_end: f64,
) -> Result<Trajectory, SimError> {
    let config = SimConfig::new(plant, dt, t_end, State::ZERO);
    integrate(&config, &open_loop_signal(channel), params)
}

pub fn open_loop_signal(channel: StepChannel) -> InputSignal {
    match channel {
        StepChannel::U1 => InputSignal::Step {
            u1_amp: 1.0,
            u2_amp: 0.0,
            hover_offset: false,
        },
        StepChannel::U2 => InputSignal::Step {
            u1_amp: 0.0,
            u2_amp: 1.0,
            hover_offset: true,
        },
    }
}

/// Checks that two trajectories share exactly the same sample times.
pub fn check_same_grid(a: &Trajectory, b: &Trajectory) -> Result<(), SimError> {
    if a.len() != b.len() {
        return Err(SimError::GridMismatch(format!(
            "{} vs {} samples",
            a.len(),
            b.len()
        )));
    }
    if a.t != b.t {
        return Err(SimError::GridMismatch("sample times differ".into()));
    }
    Ok(())
}

/// First sample time where `|a - b| > threshold` on `channel`.
pub fn divergence_time(
    a: &Trajectory,
    b: &Trajectory,
    channel: Channel,
    threshold: f64,
) -> Result<Option<f64>, SimError> {
    check_same_grid(a, b)?;
    Ok(a.states
        .iter()
        .zip(&b.states)
        .zip(&a.t)
        .find(|((sa, sb), _)| (channel.of(sa) - channel.of(sb)).abs() > threshold)
        .map(|(_, &t)| t))
}
