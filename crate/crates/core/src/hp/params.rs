use std::fmt;

use serde::{Deserialize, Serialize};

use super::names;
use super::State;

/// Symbolic constants of the longitudinal RSS models.
///
/// All accelerations are magnitudes in m/s², `rho` is the reaction time in s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RssParams {
    #[serde(rename = "aMinBrake")]
    pub a_min_brake: f64,
    #[serde(rename = "aMaxBrake")]
    pub a_max_brake: f64,
    #[serde(rename = "aMaxAccel")]
    pub a_max_accel: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamViolation {
    MinBrakePositive,
    MinBrakeBelowMaxBrake,
    MaxAccelPositive,
    RhoPositive,
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParamViolation::MinBrakePositive => "0 < aMinBrake",
            ParamViolation::MinBrakeBelowMaxBrake => "aMinBrake < aMaxBrake",
            ParamViolation::MaxAccelPositive => "0 < aMaxAccel",
            ParamViolation::RhoPositive => "rho > 0",
        })
    }
}

impl RssParams {
    pub fn new(a_min_brake: f64, a_max_brake: f64, a_max_accel: f64, rho: f64) -> Self {
        RssParams {
            a_min_brake,
            a_max_brake,
            a_max_accel,
            rho,
        }
    }

    /// Violated invariants, in declaration order. Empty means valid.
    pub fn validate(&self) -> Vec<ParamViolation> {
        let mut out = Vec::new();
        // written as negated positive checks so NaN counts as a violation
        if !(0.0 < self.a_min_brake) {
            out.push(ParamViolation::MinBrakePositive);
        }
        if !(self.a_min_brake < self.a_max_brake) {
            out.push(ParamViolation::MinBrakeBelowMaxBrake);
        }
        if !(0.0 < self.a_max_accel) {
            out.push(ParamViolation::MaxAccelPositive);
        }
        if !(self.rho > 0.0) {
            out.push(ParamViolation::RhoPositive);
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn bind(&self, state: &mut State) {
        state.set(names::A_MIN_BRAKE, self.a_min_brake);
        state.set(names::A_MAX_BRAKE, self.a_max_brake);
        state.set(names::A_MAX_ACCEL, self.a_max_accel);
        state.set(names::RHO, self.rho);
    }

    pub fn to_state(&self) -> State {
        let mut s = State::new();
        self.bind(&mut s);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!(RssParams::new(4.0, 8.0, 2.0, 1.0).validate().is_empty());
        assert_eq!(
            RssParams::new(8.0, 4.0, 2.0, 1.0).validate(),
            vec![ParamViolation::MinBrakeBelowMaxBrake]
        );
        assert_eq!(
            RssParams::new(4.0, 8.0, 2.0, 0.0).validate(),
            vec![ParamViolation::RhoPositive]
        );
    }

    #[test]
    fn exhaustive_sign_and_order_grid() {
        let vals = [-1.0, 0.0, 1.0, 2.0];
        for &b in &vals {
            for &bb in &vals {
                for &acc in &vals {
                    for &rho in &vals {
                        let p = RssParams::new(b, bb, acc, rho);
                        let expect_ok = 0.0 < b && b < bb && 0.0 < acc && rho > 0.0;
                        assert_eq!(p.is_valid(), expect_ok, "{p:?}");
                        let v = p.validate();
                        assert_eq!(v.contains(&ParamViolation::MinBrakePositive), !(0.0 < b));
                        assert_eq!(v.contains(&ParamViolation::MinBrakeBelowMaxBrake), !(b < bb));
                        assert_eq!(v.contains(&ParamViolation::MaxAccelPositive), !(0.0 < acc));
                        assert_eq!(v.contains(&ParamViolation::RhoPositive), !(rho > 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn nan_is_a_violation() {
        assert!(!RssParams::new(f64::NAN, 8.0, 2.0, 1.0).is_valid());
    }
}
