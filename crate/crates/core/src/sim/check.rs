use serde::Serialize;

use crate::hp::RssParams;
use crate::interp::eval_formula;
use crate::rss::{check_ctrl, loop_invariant, CarPairState, DirectionMode, MonitorVerdict};

use super::kinematics::kin_step;
use super::scenario::SimError;
use super::trace::Trace;

/// Relative tolerance when comparing recorded motion with the kinematics.
const MOTION_TOLERANCE: f64 = 1e-9;

/// Independent re-check of a recorded trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceReport {
    pub records: usize,
    /// Recomputed controller verdict per record.
    pub verdicts: Vec<MonitorVerdict>,
    /// Recomputed `J` per record.
    pub invariant: Vec<bool>,
    /// First record whose control decision or arrival violates the model,
    /// with the clause id (`motion.*` for an impossible transition).
    pub first_monitor_failure: Option<(usize, String)>,
    pub first_invariant_failure: Option<usize>,
    pub first_collision: Option<usize>,
    /// First record whose stored monitor, `J` or collision columns disagree
    /// with the recomputation.
    pub first_column_mismatch: Option<usize>,
    /// Every monitor passed, yet `J` failed or the cars collided.
    pub modeling_flaw: bool,
}

impl TraceReport {
    pub fn monitors_pass(&self) -> bool {
        self.first_monitor_failure.is_none()
    }
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= MOTION_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Name of the first variable in which `got` departs from `want`.
fn motion_mismatch(want: &CarPairState, got: &CarPairState) -> Option<&'static str> {
    [
        ("x1", want.x1, got.x1),
        ("v1", want.v1, got.v1),
        ("x2", want.x2, got.x2),
        ("v2", want.v2, got.v2),
    ]
    .into_iter()
    .find(|(_, w, g)| !close(*w, *g))
    .map(|(name, ..)| name)
}

/// Replays the monitor and invariant on every record and checks that each
/// record follows from its predecessor under the recorded accelerations.
pub fn check_trace(trace: &Trace, mode: DirectionMode, p: &RssParams) -> Result<TraceReport, SimError> {
    let violations = p.validate();
    if !violations.is_empty() {
        return Err(SimError::Params(violations));
    }
    let j = loop_invariant(mode);
    let mut verdicts = Vec::with_capacity(trace.len());
    let mut invariant = Vec::with_capacity(trace.len());
    let mut first_monitor_failure = None;
    let mut first_column_mismatch = None;
    for (i, r) in trace.records.iter().enumerate() {
        let s = r.state();
        let err = |source| SimError::Controller { t: r.t, source };
        if i > 0 && first_monitor_failure.is_none() {
            let prev = trace.records[i - 1].state();
            let dt = r.t - prev.t;
            if !(dt > 0.0 && dt <= p.rho) {
                first_monitor_failure = Some((i, "motion.t".to_string()));
            } else if let Some(var) = motion_mismatch(&kin_step(&prev, dt, mode), &s) {
                first_monitor_failure = Some((i, format!("motion.{var}")));
            }
        }
        let verdict = check_ctrl(mode, &s, &CarPairState { t: 0.0, ..s }, p).map_err(err)?;
        let mut env = p.to_state();
        s.bind(&mut env);
        let holds = eval_formula(&j, &env).map_err(err)?;
        if first_monitor_failure.is_none() && !verdict.satisfied {
            let id = verdict.failed_clause.clone().unwrap_or_default();
            first_monitor_failure = Some((i, id));
        }
        if first_column_mismatch.is_none()
            && (r.verdict() != verdict || r.invariant_j != holds || r.collided != s.collided())
        {
            first_column_mismatch = Some(i);
        }
        verdicts.push(verdict);
        invariant.push(holds);
    }
    let first_invariant_failure = invariant.iter().position(|&b| !b);
    let first_collision = trace.records.iter().position(|r| r.x1 > r.x2);
    let modeling_flaw =
        first_monitor_failure.is_none() && (first_invariant_failure.is_some() || first_collision.is_some());
    Ok(TraceReport {
        records: trace.len(),
        verdicts,
        invariant,
        first_monitor_failure,
        first_invariant_failure,
        first_collision,
        first_column_mismatch,
        modeling_flaw,
    })
}
