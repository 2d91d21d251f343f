//! Trajectory CSV and JSON report rendering.
//!
//! CSV columns are fixed: `t,x,y,phi,vx,vy,omega,u1,u2,phi_des`, one row per
//! sample, every number in `{:.16e}` form (17 significant digits, enough
//! to round-trip every `f64`).

use std::io::{self, Write};

use planarquad_core::analysis::{
    AxisMetrics, ComparisonReport, StabilityVerdict, RISE_HIGH, RISE_LOW, SETTLING_BAND,
};
use planarquad_core::{Channel, Plant, StepMetrics, Trajectory};
use serde::Serialize;

pub const CSV_HEADER: &str = "t,x,y,phi,vx,vy,omega,u1,u2,phi_des";

pub fn write_csv<W: Write>(traj: &Trajectory, out: W) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    writeln!(out, "{CSV_HEADER}")?;
    for k in 0..traj.len() {
        let s = &traj.states[k];
        let u = &traj.inputs[k];
        let row = [
            traj.t[k],
            s.x,
            s.y,
            s.phi,
            s.vx,
            s.vy,
            s.omega,
            u.u1,
            u.u2,
            traj.phi_des[k],
        ];
        // adding 0.0 turns -0.0 into 0.0
        let cells: Vec<String> = row.iter().map(|v| format!("{:.16e}", v + 0.0)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()
}

pub fn csv_string(traj: &Trajectory) -> String {
    let mut buf = Vec::new();
    write_csv(traj, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

pub fn plant_name(p: Plant) -> &'static str {
    match p {
        Plant::Linear => "linear",
        Plant::Nonlinear => "nonlinear",
    }
}

/// Step metrics for one channel, flat with the conventions spelled out.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsRecord {
    pub scenario: String,
    pub plant: &'static str,
    pub channel: &'static str,
    pub target: f64,
    pub overshoot_pct: f64,
    pub rise_time_s: Option<f64>,
    pub rise_time_full_s: Option<f64>,
    pub settling_time_s: Option<f64>,
    pub steady_state_error: f64,
    pub peak_time_s: f64,
    pub rise_time_convention: String,
    pub rise_time_full_convention: &'static str,
    pub settling_band_pct: f64,
    pub dt: f64,
}

impl MetricsRecord {
    pub fn new(
        scenario: &str,
        plant: Plant,
        channel: Channel,
        target: f64,
        m: &StepMetrics,
        dt: f64,
    ) -> Self {
        Self {
            scenario: scenario.into(),
            plant: plant_name(plant),
            channel: channel.name(),
            target,
            overshoot_pct: m.overshoot_pct,
            rise_time_s: m.rise_time_s,
            rise_time_full_s: m.rise_time_full_s,
            settling_time_s: m.settling_time_s,
            steady_state_error: m.steady_state_error,
            peak_time_s: m.peak_time_s,
            rise_time_convention: format!("{:.0}-{:.0}%", RISE_LOW * 100.0, RISE_HIGH * 100.0),
            rise_time_full_convention: "0-100% first crossing",
            settling_band_pct: SETTLING_BAND * 100.0,
            dt,
        }
    }
}

/// Summary of a run without a setpoint.
#[derive(Debug, Clone, Serialize)]
pub struct OpenLoopRecord {
    pub scenario: String,
    pub plant: &'static str,
    pub dt: f64,
    pub t_end: f64,
    pub samples: usize,
    pub final_x: f64,
    pub final_y: f64,
    pub final_phi: f64,
    pub max_abs_x: f64,
    pub max_abs_y: f64,
    pub max_abs_phi: f64,
    pub diverged_at_s: Option<f64>,
}

impl OpenLoopRecord {
    pub fn new(scenario: &str, plant: Plant, traj: &Trajectory, diverged_at: Option<f64>) -> Self {
        let max_abs = |ch: Channel| {
            traj.states
                .iter()
                .map(|s| ch.of(s).abs())
                .fold(0.0, f64::max)
        };
        let last = traj.last_state().copied().unwrap_or_default();
        Self {
            scenario: scenario.into(),
            plant: plant_name(plant),
            dt: traj.dt,
            t_end: traj.t.last().copied().unwrap_or(0.0),
            samples: traj.len(),
            final_x: last.x,
            final_y: last.y,
            final_phi: last.phi,
            max_abs_x: max_abs(Channel::X),
            max_abs_y: max_abs(Channel::Y),
            max_abs_phi: max_abs(Channel::Phi),
            diverged_at_s: diverged_at,
        }
    }
}

/// Flat linear-vs-nonlinear comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRecord {
    pub scenario: String,
    pub samples: usize,
    pub t_compared_s: f64,
    pub max_dev_x: f64,
    pub max_dev_y: f64,
    pub max_dev_phi: f64,
    pub max_dev_vx: f64,
    pub max_dev_vy: f64,
    pub max_dev_omega: f64,
    pub divergence_channel: &'static str,
    pub divergence_threshold: f64,
    pub divergence_time_s: Option<f64>,
    pub linear_diverged_at_s: Option<f64>,
    pub nonlinear_diverged_at_s: Option<f64>,
    pub linear_x_overshoot_pct: Option<f64>,
    pub nonlinear_x_overshoot_pct: Option<f64>,
    pub linear_x_rise_time_s: Option<f64>,
    pub nonlinear_x_rise_time_s: Option<f64>,
    pub linear_y_overshoot_pct: Option<f64>,
    pub nonlinear_y_overshoot_pct: Option<f64>,
    pub linear_y_rise_time_s: Option<f64>,
    pub nonlinear_y_rise_time_s: Option<f64>,
    pub rise_time_convention: &'static str,
}

impl ComparisonRecord {
    pub fn new(scenario: &str, r: &ComparisonReport) -> Self {
        let d = r.max_deviation;
        let os = |a: &AxisMetrics, ch: Channel| axis(a, ch).map(|m| m.overshoot_pct);
        let rt = |a: &AxisMetrics, ch: Channel| axis(a, ch).and_then(|m| m.rise_time_s);
        Self {
            scenario: scenario.into(),
            samples: r.samples,
            t_compared_s: r.t_compared,
            max_dev_x: d[0],
            max_dev_y: d[1],
            max_dev_phi: d[2],
            max_dev_vx: d[3],
            max_dev_vy: d[4],
            max_dev_omega: d[5],
            divergence_channel: r.divergence_channel.name(),
            divergence_threshold: r.divergence_threshold,
            divergence_time_s: r.divergence_time,
            linear_diverged_at_s: r.linear_diverged_at,
            nonlinear_diverged_at_s: r.nonlinear_diverged_at,
            linear_x_overshoot_pct: os(&r.linear, Channel::X),
            nonlinear_x_overshoot_pct: os(&r.nonlinear, Channel::X),
            linear_x_rise_time_s: rt(&r.linear, Channel::X),
            nonlinear_x_rise_time_s: rt(&r.nonlinear, Channel::X),
            linear_y_overshoot_pct: os(&r.linear, Channel::Y),
            nonlinear_y_overshoot_pct: os(&r.nonlinear, Channel::Y),
            linear_y_rise_time_s: rt(&r.linear, Channel::Y),
            nonlinear_y_rise_time_s: rt(&r.nonlinear, Channel::Y),
            rise_time_convention: "10-90%",
        }
    }
}

fn axis(a: &AxisMetrics, ch: Channel) -> Option<&StepMetrics> {
    match ch {
        Channel::X => a.x.as_ref(),
        Channel::Y => a.y.as_ref(),
        _ => None,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeRecord {
    pub phi0: f64,
    pub plant: &'static str,
    pub converged: bool,
    pub final_state_norm: f64,
    pub time_to_converge_s: Option<f64>,
    pub diverged_at_s: Option<f64>,
    pub tolerance: f64,
    pub t_end: f64,
}

impl ProbeRecord {
    pub fn new(phi0: f64, plant: Plant, v: &StabilityVerdict, tolerance: f64, t_end: f64) -> Self {
        Self {
            phi0,
            plant: plant_name(plant),
            converged: v.converged,
            final_state_norm: v.final_state_norm,
            time_to_converge_s: v.time_to_converge,
            diverged_at_s: v.diverged_at,
            tolerance,
            t_end,
        }
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize to JSON")
}

#[cfg(test)]
mod tests {
    use super::*;
    use planarquad_core::sim::open_loop_step_with;
    use planarquad_core::{QuadParams, StepChannel};

    #[test]
    fn csv_has_fixed_header_and_one_row_per_sample() {
        let p = QuadParams::default();
        let tr = open_loop_step_with(Plant::Linear, StepChannel::U2, &p, 1e-3, 0.01).unwrap();
        let text = csv_string(&tr);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), tr.len() + 1);
        for (line, s) in lines[1..].iter().zip(&tr.states) {
            let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cells.len(), 10);
            // 17 significant digits round-trip exactly
            assert_eq!(cells[1], s.x);
            assert_eq!(cells[3], s.phi);
        }
    }

    #[test]
    fn metrics_json_uses_flat_snake_case_keys() {
        let m = StepMetrics {
            overshoot_pct: 4.5,
            rise_time_s: Some(0.4),
            rise_time_full_s: None,
            settling_time_s: Some(1.0),
            steady_state_error: 0.0,
            peak_time_s: 0.8,
        };
        let rec = MetricsRecord::new("s", Plant::Linear, Channel::X, 1.0, &m, 1e-4);
        let v: serde_json::Value = serde_json::from_str(&to_json(&rec)).unwrap();
        for key in [
            "overshoot_pct",
            "rise_time_s",
            "settling_time_s",
            "steady_state_error",
            "rise_time_convention",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["rise_time_convention"], "10-90%");
        assert!(v["rise_time_full_s"].is_null());
        assert!(v.as_object().unwrap().values().all(|x| !x.is_object()));
    }
}
