//! Longitudinal RSS: safe distances, the Model 1 / Model 2 programs, the
//! controller monitor and the worst-case trajectory oracle.

pub(crate) mod formulas;
mod model;
mod monitor;
mod oracle;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hp::{names, ParamViolation, RssParams, State};
use crate::interp::EvalError;

pub use formulas::{
    cut_lemma_same, edc, loop_invariant, safe_dist, safe_dist_opp, safe_dist_opp_term, safe_dist_same,
    safe_dist_same_term, safe_dist_same_term_with, safe_dist_term,
};
pub use model::{build_model, build_optimality_model, free_driving_det, OptimalityModel, RssModel};
pub use monitor::{check_ctrl, ctrl_monitor, Branch, Clause, CtrlMonitor, MonitorVerdict};
pub use oracle::{run_model2, worst_case_gap, Model2Run};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DirectionMode {
    #[serde(rename = "same")]
    SameDirection,
    #[serde(rename = "opposite")]
    OppositeDirection,
}

impl DirectionMode {
    pub const ALL: [DirectionMode; 2] = [DirectionMode::SameDirection, DirectionMode::OppositeDirection];

    pub fn as_str(self) -> &'static str {
        match self {
            DirectionMode::SameDirection => "same",
            DirectionMode::OppositeDirection => "opposite",
        }
    }

    /// Sign that car 2's velocity must keep: `+1` same direction, `-1` opposite.
    pub fn lead_sign(self) -> f64 {
        match self {
            DirectionMode::SameDirection => 1.0,
            DirectionMode::OppositeDirection => -1.0,
        }
    }

    /// Velocity signs required by the evolution domain.
    pub fn velocities_ok(self, v1: f64, v2: f64) -> bool {
        v1 >= 0.0 && self.lead_sign() * v2 >= 0.0
    }
}

impl fmt::Display for DirectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DirectionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "same" => Ok(DirectionMode::SameDirection),
            "opposite" => Ok(DirectionMode::OppositeDirection),
            other => Err(format!("unknown mode `{other}` (expected `same` or `opposite`)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RssError {
    #[error("invalid parameters: {}", list(.0))]
    Params(Vec<ParamViolation>),
    #[error("velocities v1 = {v1}, v2 = {v2} violate the {mode} direction domain")]
    VelocitySign { mode: DirectionMode, v1: f64, v2: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn list(v: &[ParamViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

pub(crate) fn check_pre(mode: DirectionMode, v1: f64, v2: f64, p: &RssParams) -> Result<(), RssError> {
    let violations = p.validate();
    if !violations.is_empty() {
        return Err(RssError::Params(violations));
    }
    if !mode.velocities_ok(v1, v2) {
        return Err(RssError::VelocitySign { mode, v1, v2 });
    }
    Ok(())
}

/// Positions, velocities, accelerations and clock of the two cars.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CarPairState {
    pub x1: f64,
    pub v1: f64,
    pub a1: f64,
    pub x2: f64,
    pub v2: f64,
    pub a2: f64,
    pub t: f64,
}

impl CarPairState {
    pub fn new(x1: f64, v1: f64, x2: f64, v2: f64) -> Self {
        CarPairState {
            x1,
            v1,
            x2,
            v2,
            ..CarPairState::default()
        }
    }

    pub fn gap(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn collided(&self) -> bool {
        self.x1 > self.x2
    }

    pub fn bind(&self, s: &mut State) {
        s.set(names::X1, self.x1);
        s.set(names::V1, self.v1);
        s.set(names::A1, self.a1);
        s.set(names::X2, self.x2);
        s.set(names::V2, self.v2);
        s.set(names::A2, self.a2);
        s.set(names::T, self.t);
    }

    pub fn to_state(&self) -> State {
        let mut s = State::new();
        self.bind(&mut s);
        s
    }

    pub fn from_state(s: &State) -> Result<Self, EvalError> {
        Ok(CarPairState {
            x1: s.get(names::X1)?,
            v1: s.get(names::V1)?,
            a1: s.get(names::A1)?,
            x2: s.get(names::X2)?,
            v2: s.get(names::V2)?,
            a2: s.get(names::A2)?,
            t: s.get(names::T)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_round_trip() {
        let c = CarPairState {
            x1: 1.0,
            v1: 2.0,
            a1: 3.0,
            x2: 4.0,
            v2: 5.0,
            a2: 6.0,
            t: 7.0,
        };
        assert_eq!(CarPairState::from_state(&c.to_state()).unwrap(), c);
        assert!(CarPairState::from_state(&State::new()).is_err());
    }

    #[test]
    fn mode_names() {
        for m in DirectionMode::ALL {
            assert_eq!(m.as_str().parse::<DirectionMode>().unwrap(), m);
        }
        assert!(DirectionMode::OppositeDirection.velocities_ok(1.0, -1.0));
        assert!(!DirectionMode::SameDirection.velocities_ok(1.0, -1.0));
    }
}
