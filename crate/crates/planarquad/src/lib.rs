//! Scenario files, trajectory export and the command-line front end for the
//! planar quadrotor model in `planarquad-core`.

pub mod cli;
pub mod export;
pub mod scenario;

pub use scenario::{Scenario, ScenarioError};
