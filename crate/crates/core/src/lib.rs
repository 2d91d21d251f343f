//! Planar quadrotor model: nonlinear dynamics, hover equilibrium, exact
//! linearization to state-space and transfer-function form, a cascaded PD
//! controller, a fixed-step RK4 simulator and step-response analysis.
//!
//! The crate is `no_std` and only needs `alloc`. Enable the `std` feature to
//! get `std::error::Error` impls on the error types, and `serde` to derive
//! serialization for the report types.
//!
//! The state vector is always ordered `(x, y, phi, vx, vy, omega)`.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(rustdoc::broken_intra_doc_links)]

extern crate alloc;

pub mod analysis;
pub mod control;
pub mod dynamics;
pub mod linear_model;
pub mod matrix;
pub mod poly;
pub mod sim;

pub use analysis::{
    compare_models, linear_failure_time, stability_probe, step_metrics, ComparisonReport,
    ModelComparison, StabilityVerdict, StepMetrics,
};
pub use control::{
    clamp_policy, control_law, CascadedPd, ControlDiagnostics, GainMapping, InputLimits, OuterSign,
    PdGains, RateReference, Setpoint,
};
pub use dynamics::{
    deriv_nonlinear, equilibrium, mix, unmix, Input, MotorForces, ParamError, QuadParams, State,
    StateDeriv,
};
pub use linear_model::{
    analytic_step_response, deriv_linear, linearize, pole_report, tf_from_ss, LinearModelError,
    PoleReport, StateSpace, SymbolicGain, TfMatrix,
};
pub use poly::{Polynomial, RationalTF};
pub use sim::{
    divergence_time, integrate, open_loop_step, Channel, InputSignal, Plant, SimConfig, SimError,
    StepChannel, Trajectory,
};
