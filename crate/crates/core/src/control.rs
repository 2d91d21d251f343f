//! Three-loop cascaded PD controller.
//!
//! * thrust loop: `u1 = m g + kp_y (y_des - y) + kd_y (0 - vy)`
//! * position loop: `phi_des = sign * [kp_x (x_des - x) + kd_x (0 - vx)]`
//! * moment loop: `u2 = kp_phi (phi_des - phi) + kd_phi (phi_des_dot - omega)`
//!
//! The law is stateless. Each call is a pure function of the measured state.

use thiserror::Error;

use crate::dynamics::{Input, QuadParams, State};

/// Which loop receives which of the two tuned gain pairs `(2.5, 0.56)` and
/// `(0.04, 0.008)`. The thrust loop always gets `(7.0, 1.42)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum GainMapping {
    /// `(2.5, 0.56)` on the position-to-angle loop, `(0.04, 0.008)` on the
    /// moment loop.
    #[default]
    PositionOuter,
    /// `(0.04, 0.008)` on the position-to-angle loop, `(2.5, 0.56)` on the
    /// moment loop. With a zero rate reference this leaves the x loop with a
    /// lightly damped, slowly growing oscillation.
    AttitudeInner,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PdGains {
    pub kp_y: f64,
    pub kd_y: f64,
    pub kp_x: f64,
    pub kd_x: f64,
    pub kp_phi: f64,
    pub kd_phi: f64,
}

impl PdGains {
    pub fn tuned(mapping: GainMapping) -> Self {
        let (kp_y, kd_y) = (7.0, 1.42);
        let (outer, inner) = match mapping {
            GainMapping::PositionOuter => ((2.5, 0.56), (0.04, 0.008)),
            GainMapping::AttitudeInner => ((0.04, 0.008), (2.5, 0.56)),
        };
        Self {
            kp_y,
            kd_y,
            kp_x: outer.0,
            kd_x: outer.1,
            kp_phi: inner.0,
            kd_phi: inner.1,
        }
    }

    pub fn is_finite(&self) -> bool {
        [
            self.kp_y,
            self.kd_y,
            self.kp_x,
            self.kd_x,
            self.kp_phi,
            self.kd_phi,
        ]
        .iter()
        .all(|g| g.is_finite())
    }
}

impl Default for PdGains {
    fn default() -> Self {
        Self::tuned(GainMapping::default())
    }
}

/// Sign applied to the position loop output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum OuterSign {
    /// `phi_des = -(...)`. Positive x error needs negative `phi` because
    /// `x'' = -u1 sin(phi) / m`.
    #[default]
    Corrected,
    /// `phi_des = +(...)`; unstable on both plants.
    AsPrinted,
}

impl OuterSign {
    fn factor(self) -> f64 {
        match self {
            OuterSign::Corrected => -1.0,
            OuterSign::AsPrinted => 1.0,
        }
    }
}

/// How the reference rate `phi_des_dot` in the moment loop is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RateReference {
    /// Time derivative of `phi_des` for a fixed setpoint, with the horizontal
    /// acceleration taken from the hover linearization (`x'' = -g phi`).
    #[default]
    LinearModel,
    /// `phi_des_dot = 0`.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("{channel} limits are not ordered: [{lo}, {hi}]")]
pub struct LimitError {
    pub channel: &'static str,
    pub lo: f64,
    pub hi: f64,
}

/// Optional per-channel saturation. Thresholds are user-chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InputLimits {
    u1: Option<(f64, f64)>,
    u2: Option<(f64, f64)>,
}

impl InputLimits {
    pub fn new(u1: Option<(f64, f64)>, u2: Option<(f64, f64)>) -> Result<Self, LimitError> {
        for (channel, lim) in [("u1", u1), ("u2", u2)] {
            if let Some((lo, hi)) = lim {
                if lo.is_nan() || hi.is_nan() || lo > hi {
                    return Err(LimitError { channel, lo, hi });
                }
            }
        }
        Ok(Self { u1, u2 })
    }

    pub fn u1(&self) -> Option<(f64, f64)> {
        self.u1
    }

    pub fn u2(&self) -> Option<(f64, f64)> {
        self.u2
    }
}

/// Channelwise clamp; identity when `limits` is `None`.
pub fn clamp_policy(input: Input, limits: Option<&InputLimits>) -> Input {
    let Some(lim) = limits else {
        return input;
    };
    let clamp = |v: f64, l: Option<(f64, f64)>| match l {
        Some((lo, hi)) => v.clamp(lo, hi),
        None => v,
    };
    Input {
        u1: clamp(input.u1, lim.u1),
        u2: clamp(input.u2, lim.u2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct Setpoint {
    pub x_des: f64,
    pub y_des: f64,
}

impl Setpoint {
    pub fn new(x_des: f64, y_des: f64) -> Self {
        Self { x_des, y_des }
    }

    pub fn is_finite(&self) -> bool {
        self.x_des.is_finite() && self.y_des.is_finite()
    }
}

/// Gains plus the convention switches of the cascaded law.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct CascadedPd {
    pub gains: PdGains,
    pub outer_sign: OuterSign,
    pub rate_reference: RateReference,
    pub limits: Option<InputLimits>,
}

impl CascadedPd {
    pub fn new(gains: PdGains) -> Self {
        Self {
            gains,
            ..Self::default()
        }
    }

    pub fn with_mapping(mapping: GainMapping) -> Self {
        Self::new(PdGains::tuned(mapping))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlDiagnostics {
    pub phi_des: f64,
    pub phi_des_dot: f64,
    /// Command before clamping.
    pub u_raw: Input,
}

pub fn control_law(
    state: &State,
    setpoint: &Setpoint,
    controller: &CascadedPd,
    params: &QuadParams,
) -> (Input, ControlDiagnostics) {
    let k = &controller.gains;
    let sign = controller.outer_sign.factor();

    let u1 =
        params.hover_thrust() + k.kp_y * (setpoint.y_des - state.y) + k.kd_y * (0.0 - state.vy);

    let phi_des = sign * (k.kp_x * (setpoint.x_des - state.x) + k.kd_x * (0.0 - state.vx));
    let phi_des_dot = match controller.rate_reference {
        RateReference::Zero => 0.0,
        RateReference::LinearModel => {
            let ax = -params.g * state.phi;
            sign * (k.kp_x * (0.0 - state.vx) + k.kd_x * (0.0 - ax))
        }
    };

    let u2 = k.kp_phi * (phi_des - state.phi) + k.kd_phi * (phi_des_dot - state.omega);

    let u_raw = Input::new(u1, u2);
    let u = clamp_policy(u_raw, controller.limits.as_ref());
    (
        u,
        ControlDiagnostics {
            phi_des,
            phi_des_dot,
            u_raw,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tuned_gain_tables() {
        let g = PdGains::default();
        assert_eq!((g.kp_y, g.kd_y), (7.0, 1.42));
        assert_eq!((g.kp_x, g.kd_x), (2.5, 0.56));
        assert_eq!((g.kp_phi, g.kd_phi), (0.04, 0.008));
        let g = PdGains::tuned(GainMapping::AttitudeInner);
        assert_eq!((g.kp_x, g.kd_x), (0.04, 0.008));
        assert_eq!((g.kp_phi, g.kd_phi), (2.5, 0.56));
    }

    #[test]
    fn at_setpoint_hovers() {
        let p = QuadParams::default();
        let c = CascadedPd::default();
        let sp = Setpoint::new(3.0, -2.0);
        let s = State {
            x: 3.0,
            y: -2.0,
            ..State::ZERO
        };
        let (u, d) = control_law(&s, &sp, &c, &p);
        assert!((u.u1 - 1.764).abs() < 1e-15);
        assert_eq!(u.u2, 0.0);
        assert_eq!(d.phi_des, 0.0);
    }

    #[test]
    fn altitude_error_adds_thrust() {
        let p = QuadParams::default();
        let (u, _) = control_law(
            &State::ZERO,
            &Setpoint::new(0.0, 1.0),
            &CascadedPd::default(),
            &p,
        );
        assert!((u.u1 - 8.764).abs() < 1e-12);
    }

    #[test]
    fn position_error_commands_negative_angle() {
        let p = QuadParams::default();
        let sp = Setpoint::new(1.0, 0.0);
        for mapping in [GainMapping::AttitudeInner, GainMapping::PositionOuter] {
            let c = CascadedPd::with_mapping(mapping);
            let (u, d) = control_law(&State::ZERO, &sp, &c, &p);
            let g = c.gains;
            assert_eq!(d.phi_des, -g.kp_x);
            // at rest the rate reference is zero under both conventions
            assert_eq!(d.phi_des_dot, 0.0);
            assert!((u.u2 - g.kp_phi * -g.kp_x).abs() < 1e-15);
        }
        let c = CascadedPd::with_mapping(GainMapping::AttitudeInner);
        let (u, d) = control_law(&State::ZERO, &sp, &c, &p);
        assert_eq!(d.phi_des, -0.04);
        assert!((u.u2 - 2.5 * -0.04).abs() < 1e-15);

        let literal = CascadedPd {
            outer_sign: OuterSign::AsPrinted,
            ..c
        };
        let (_, d) = control_law(&State::ZERO, &sp, &literal, &p);
        assert_eq!(d.phi_des, 0.04);
    }

    #[test]
    fn rate_reference_variants() {
        let p = QuadParams::default();
        let s = State {
            phi: 0.1,
            vx: 0.5,
            ..State::ZERO
        };
        let sp = Setpoint::default();
        let lin = CascadedPd::default();
        let zero = CascadedPd {
            rate_reference: RateReference::Zero,
            ..lin
        };
        let (_, d) = control_law(&s, &sp, &zero, &p);
        assert_eq!(d.phi_des_dot, 0.0);
        let (_, d) = control_law(&s, &sp, &lin, &p);
        // -(2.5 * (-0.5) + 0.56 * (9.8 * 0.1))
        let expected = -(2.5 * -0.5 + 0.56 * (9.8 * 0.1));
        assert!((d.phi_des_dot - expected).abs() < 1e-12);
    }

    #[test]
    fn clamp_examples() {
        let u = Input::new(8.764, 0.1);
        assert_eq!(clamp_policy(u, None), u);
        let l = InputLimits::new(Some((0.0, 5.0)), None).unwrap();
        assert_eq!(
            clamp_policy(Input::new(8.764, 0.0), Some(&l)),
            Input::new(5.0, 0.0)
        );
        let l = InputLimits::new(None, Some((-0.01, 0.01))).unwrap();
        assert_eq!(
            clamp_policy(Input::new(2.0, 0.02), Some(&l)),
            Input::new(2.0, 0.01)
        );
        assert!(InputLimits::new(Some((1.0, 0.0)), None).is_err());
        assert!(InputLimits::new(None, Some((f64::NAN, 0.0))).is_err());
    }

    #[test]
    fn diagnostics_keep_raw_command() {
        let p = QuadParams::default();
        let c = CascadedPd {
            limits: Some(InputLimits::new(Some((0.0, 5.0)), None).unwrap()),
            ..CascadedPd::default()
        };
        let (u, d) = control_law(&State::ZERO, &Setpoint::new(0.0, 1.0), &c, &p);
        assert_eq!(u.u1, 5.0);
        assert!((d.u_raw.u1 - 8.764).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn law_is_linear_in_position_error(ex in -5.0f64..5.0, ey in -5.0f64..5.0) {
            let p = QuadParams::default();
            let c = CascadedPd::default();
            let sp = Setpoint::default();
            let one = State { x: -ex, y: -ey, ..State::ZERO };
            let two = State { x: -2.0 * ex, y: -2.0 * ey, ..State::ZERO };
            let (u_a, d_a) = control_law(&one, &sp, &c, &p);
            let (u_b, d_b) = control_law(&two, &sp, &c, &p);
            let hover = p.hover_thrust();
            prop_assert!(((u_b.u1 - hover) - 2.0 * (u_a.u1 - hover)).abs() <= 1e-12 * (1.0 + ey.abs()));
            prop_assert!((d_b.phi_des - 2.0 * d_a.phi_des).abs() <= 1e-12 * (1.0 + ex.abs()));
            prop_assert!((u_b.u2 - 2.0 * u_a.u2).abs() <= 1e-12 * (1.0 + ex.abs()));
        }
    }
}
