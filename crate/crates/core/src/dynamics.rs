//! Physical parameters, rigid-body equations of motion and rotor mixing.

use libm::{cos, sin, sqrt};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ParamError {
    #[error("mass must be positive and finite, got {0}")]
    Mass(f64),
    #[error("gravity must be non-negative and finite, got {0}")]
    Gravity(f64),
    #[error("span must be positive and finite, got {0}")]
    Span(f64),
    #[error("moment of inertia must be positive and finite, got {0}")]
    Inertia(f64),
}

/// Physical constants of the vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct QuadParams {
    /// Mass (kg).
    pub m: f64,
    /// Gravitational acceleration (m/s²).
    pub g: f64,
    /// Rotor-to-rotor span (m).
    pub l: f64,
    /// Moment of inertia about the out-of-plane axis (kg·m²).
    pub j: f64,
}

impl Default for QuadParams {
    fn default() -> Self {
        Self {
            m: 0.18,
            g: 9.8,
            l: 0.086,
            j: 2.5e-4,
        }
    }
}

impl QuadParams {
    pub fn new(m: f64, g: f64, l: f64, j: f64) -> Result<Self, ParamError> {
        let p = Self { m, g, l, j };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(ParamError::Mass(self.m));
        }
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(ParamError::Gravity(self.g));
        }
        if !(self.l.is_finite() && self.l > 0.0) {
            return Err(ParamError::Span(self.l));
        }
        if !(self.j.is_finite() && self.j > 0.0) {
            return Err(ParamError::Inertia(self.j));
        }
        Ok(())
    }

    /// Thrust that exactly cancels gravity, `m * g`.
    pub fn hover_thrust(&self) -> f64 {
        self.m * self.g
    }
}

/// Vehicle state `(x, y, phi, vx, vy, omega)`.
///
/// `phi` is never wrapped; it accumulates so that full rotations stay visible.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub phi: f64,
    pub vx: f64,
    pub vy: f64,
    pub omega: f64,
}

impl State {
    pub const ZERO: State = State {
        x: 0.0,
        y: 0.0,
        phi: 0.0,
        vx: 0.0,
        vy: 0.0,
        omega: 0.0,
    };

    pub fn from_array(a: [f64; 6]) -> Self {
        Self {
            x: a[0],
            y: a[1],
            phi: a[2],
            vx: a[3],
            vy: a[4],
            omega: a[5],
        }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.x, self.y, self.phi, self.vx, self.vy, self.omega]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Euclidean norm of the raw 6-vector (mixed units).
    pub fn norm(&self) -> f64 {
        sqrt(self.to_array().iter().map(|v| v * v).sum())
    }

    pub fn translated(self, dx: f64, dy: f64) -> Self {
        Self {
            x: self.x + dx,
            y: self.y + dy,
            ..self
        }
    }
}

/// Net thrust `u1` (N) and net moment `u2` (N·m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Input {
    pub u1: f64,
    pub u2: f64,
}

impl Input {
    pub fn new(u1: f64, u2: f64) -> Self {
        Self { u1, u2 }
    }

    pub fn is_finite(&self) -> bool {
        self.u1.is_finite() && self.u2.is_finite()
    }
}

/// Individual rotor thrusts (N). Not clamped to be non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MotorForces {
    pub f1: f64,
    pub f2: f64,
}

/// Time derivative of a [`State`], slot for slot.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateDeriv {
    pub x_dot: f64,
    pub y_dot: f64,
    pub phi_dot: f64,
    pub vx_dot: f64,
    pub vy_dot: f64,
    pub omega_dot: f64,
}

impl StateDeriv {
    pub fn from_array(a: [f64; 6]) -> Self {
        Self {
            x_dot: a[0],
            y_dot: a[1],
            phi_dot: a[2],
            vx_dot: a[3],
            vy_dot: a[4],
            omega_dot: a[5],
        }
    }

    pub fn to_array(self) -> [f64; 6] {
        [
            self.x_dot,
            self.y_dot,
            self.phi_dot,
            self.vx_dot,
            self.vy_dot,
            self.omega_dot,
        ]
    }
}

/// Rotor thrusts to net thrust and moment: `u1 = f1 + f2`, `u2 = (L/2)(f1 - f2)`.
pub fn mix(forces: MotorForces, params: &QuadParams) -> Input {
    Input {
        u1: forces.f1 + forces.f2,
        u2: 0.5 * params.l * (forces.f1 - forces.f2),
    }
}

/// Inverse of [`mix`].
pub fn unmix(input: Input, params: &QuadParams) -> MotorForces {
    let half = 0.5 * input.u1;
    let diff = input.u2 / params.l;
    MotorForces {
        f1: half + diff,
        f2: half - diff,
    }
}

/// Nonlinear equations of motion.
pub fn deriv_nonlinear(state: &State, input: Input, params: &QuadParams) -> StateDeriv {
    let thrust_acc = input.u1 / params.m;
    StateDeriv {
        x_dot: state.vx,
        y_dot: state.vy,
        phi_dot: state.omega,
        vx_dot: -thrust_acc * sin(state.phi),
        vy_dot: -params.g + thrust_acc * cos(state.phi),
        omega_dot: input.u2 / params.j,
    }
}

/// Hover equilibrium at the origin: zero state, `u1 = m g`, `u2 = 0`.
pub fn equilibrium(params: &QuadParams) -> (State, Input) {
    (State::ZERO, Input::new(params.hover_thrust(), 0.0))
}
