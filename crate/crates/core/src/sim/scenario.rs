use thiserror::Error;

use crate::hp::{ParamViolation, RssParams};
use crate::interp::{eval_formula, EvalError};
use crate::rss::formulas::safe_dist_unchecked;
use crate::rss::{check_ctrl, loop_invariant, CarPairState, DirectionMode};

use super::controller::{Controller, ControllerRun};
use super::kinematics::kin_step;
use super::trace::{Trace, TraceRecord};

/// Everything needed to reproduce one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub mode: DirectionMode,
    pub params: RssParams,
    /// Positions and velocities at `t = 0`; accelerations are ignored.
    pub initial: CarPairState,
    pub controller: Controller,
    /// Control period, `0 < delta ≤ rho`.
    pub delta: f64,
    pub horizon: f64,
    pub seed: u64,
    /// Accept an initial state that is already too close or out of order.
    pub allow_unsafe_start: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid parameters: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))]
    Params(Vec<ParamViolation>),
    #[error("control period {delta} must satisfy 0 < delta <= rho = {rho}")]
    Step { delta: f64, rho: f64 },
    #[error("horizon {0} must be positive and finite")]
    Horizon(f64),
    #[error("initial velocities v1 = {v1}, v2 = {v2} violate the {mode} direction domain")]
    VelocitySign { mode: DirectionMode, v1: f64, v2: f64 },
    #[error("initial state is unsafe ({0}); set allow_unsafe_start to run it anyway")]
    UnsafeStart(String),
    #[error("initial state is not finite")]
    NonFinite,
    #[error("controller failed at t = {t}: {source}")]
    Controller { t: f64, source: EvalError },
    #[error("controller chose a non-finite acceleration at t = {t}")]
    NonFiniteAccel { t: f64 },
}

/// Conditions on the initial state that the safety proof assumes, as text.
pub fn unsafe_start_reasons(mode: DirectionMode, s: &CarPairState, p: &RssParams) -> Vec<String> {
    let mut out = Vec::new();
    if s.x1 > s.x2 {
        out.push(format!("x1 = {} > x2 = {}", s.x1, s.x2));
    }
    let sd = safe_dist_unchecked(mode, s.v1, s.v2, p);
    if sd > s.gap() {
        out.push(format!("safe distance {sd} exceeds gap {}", s.gap()));
    }
    out
}

impl Scenario {
    pub fn validate(&self) -> Result<(), SimError> {
        let violations = self.params.validate();
        if !violations.is_empty() {
            return Err(SimError::Params(violations));
        }
        if !(self.delta > 0.0 && self.delta <= self.params.rho) {
            return Err(SimError::Step {
                delta: self.delta,
                rho: self.params.rho,
            });
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(SimError::Horizon(self.horizon));
        }
        let s = &self.initial;
        if ![s.x1, s.v1, s.x2, s.v2].iter().all(|v| v.is_finite()) {
            return Err(SimError::NonFinite);
        }
        if !self.mode.velocities_ok(s.v1, s.v2) {
            return Err(SimError::VelocitySign {
                mode: self.mode,
                v1: s.v1,
                v2: s.v2,
            });
        }
        let reasons = unsafe_start_reasons(self.mode, s, &self.params);
        if !reasons.is_empty() && !self.allow_unsafe_start {
            return Err(SimError::UnsafeStart(reasons.join("; ")));
        }
        Ok(())
    }

    /// Number of control decisions: one at every `k * delta ≤ horizon`.
    pub fn steps(&self) -> usize {
        // tolerate horizons that are a multiple of delta up to rounding
        (self.horizon / self.delta * (1.0 + 1e-12)).floor() as usize + 1
    }
}

/// Runs the scenario, stopping early at the first collision.
pub fn run_scenario(sc: &Scenario) -> Result<Trace, SimError> {
    sc.validate()?;
    let p = sc.params;
    let j = loop_invariant(sc.mode);
    let mut ctrl = ControllerRun::new(&sc.controller, sc.mode, p, sc.seed);
    let mut s = CarPairState {
        a1: 0.0,
        a2: 0.0,
        t: 0.0,
        ..sc.initial
    };
    let mut records = Vec::with_capacity(sc.steps());
    for k in 0..sc.steps() {
        let t = k as f64 * sc.delta;
        s.t = t;
        let (a1, a2) = ctrl.decide(&s).map_err(|source| SimError::Controller { t, source })?;
        if !(a1.is_finite() && a2.is_finite()) {
            return Err(SimError::NonFiniteAccel { t });
        }
        s.a1 = a1;
        s.a2 = a2;
        let post = CarPairState { t: 0.0, ..s };
        let eval_err = |source| SimError::Controller { t, source };
        let verdict = check_ctrl(sc.mode, &s, &post, &p).map_err(eval_err)?;
        let mut env = p.to_state();
        s.bind(&mut env);
        let invariant_j = eval_formula(&j, &env).map_err(eval_err)?;
        let collided = s.collided();
        records.push(TraceRecord {
            t,
            x1: s.x1,
            v1: s.v1,
            a1,
            x2: s.x2,
            v2: s.v2,
            a2,
            mode: verdict.branch,
            monitor_ok: verdict.satisfied,
            monitor_id: verdict.failed_clause,
            invariant_j,
            collided,
        });
        if collided {
            break;
        }
        s = kin_step(&s, sc.delta, sc.mode);
    }
    Ok(Trace { records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Builtin;

    fn p0() -> RssParams {
        RssParams::new(4.0, 8.0, 2.0, 1.0)
    }

    fn follower(controller: Builtin) -> Scenario {
        Scenario {
            mode: DirectionMode::SameDirection,
            params: p0(),
            initial: CarPairState::new(0.0, 10.0, 60.0, 10.0),
            controller: Controller::Builtin(controller),
            delta: 1.0,
            horizon: 20.0,
            seed: 0,
            allow_unsafe_start: false,
        }
    }

    #[test]
    fn stale_guard_fails_monitor_before_collision() {
        let tr = run_scenario(&follower(Builtin::FaultyStaleGuard)).unwrap();
        assert_eq!(tr.first_monitor_failure(), Some(2));
        assert_eq!(tr.records[2].monitor_id.as_deref(), Some("proper.a1"));
        assert_eq!(tr.first_invariant_failure(), Some(3));
        assert_eq!(tr.first_collision(), Some(6));
        assert_eq!(tr.len(), 7);
    }

    #[test]
    fn conservative_stays_safe() {
        let tr = run_scenario(&follower(Builtin::RssConservative)).unwrap();
        assert_eq!(tr.len(), 21);
        assert!(tr.records.iter().all(|r| r.monitor_ok && r.invariant_j && !r.collided));
    }

    #[test]
    fn validation() {
        let mut sc = follower(Builtin::RssConservative);
        sc.delta = 1.5;
        assert!(matches!(sc.validate(), Err(SimError::Step { .. })));
        sc.delta = 1.0;
        sc.initial.x2 = 10.0;
        assert!(matches!(sc.validate(), Err(SimError::UnsafeStart(_))));
        sc.allow_unsafe_start = true;
        assert!(sc.validate().is_ok());
        sc.initial.v2 = -1.0;
        assert!(matches!(sc.validate(), Err(SimError::VelocitySign { .. })));
    }

    #[test]
    fn step_count() {
        let mut sc = follower(Builtin::RssConservative);
        sc.delta = 0.1;
        sc.horizon = 0.3;
        assert_eq!(sc.steps(), 4);
    }

    #[test]
    fn envelope_is_seeded() {
        let mut sc = follower(Builtin::RssConservative);
        sc.controller = Controller::Envelope;
        sc.seed = 7;
        let a = run_scenario(&sc).unwrap();
        let b = run_scenario(&sc).unwrap();
        assert_eq!(a, b);
        assert!(a.records.iter().all(|r| r.monitor_ok && !r.collided));
    }
}
