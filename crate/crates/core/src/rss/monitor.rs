use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::formulas::{edc, safe_dist_term};
use super::{CarPairState, DirectionMode};
use crate::hp::{names, Formula, RssParams, State, Term};
use crate::interp::{eval_formula, EvalError};

fn v(name: &str) -> Term {
    Term::var(name)
}

fn post(name: &str) -> Term {
    Term::var(&names::post(name))
}

fn n(x: f64) -> Term {
    Term::num(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Free,
    Proper,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Free => "free",
            Branch::Proper => "proper",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "free" => Ok(Branch::Free),
            "proper" => Ok(Branch::Proper),
            other => Err(format!("unknown mode label `{other}`")),
        }
    }
}

/// One named conjunct of a monitor branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub id: String,
    pub formula: Formula,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonitorVerdict {
    pub satisfied: bool,
    /// `<branch>.<conjunct>`, present exactly when the verdict fails.
    pub failed_clause: Option<String>,
    /// Branch that accepted, or the branch the failed clause belongs to.
    pub branch: Branch,
}

impl MonitorVerdict {
    pub fn pass(branch: Branch) -> Self {
        MonitorVerdict {
            satisfied: true,
            failed_clause: None,
            branch,
        }
    }

    pub fn fail(branch: Branch, clause: impl Into<String>) -> Self {
        MonitorVerdict {
            satisfied: false,
            failed_clause: Some(clause.into()),
            branch,
        }
    }
}

/// Controller monitor over pre-state variables and `a1_post`, `a2_post`,
/// `t_post`.
///
/// Each branch is `gap ∧ a1 ∧ a2 ∧ t ∧ edc`.
#[derive(Debug, Clone, PartialEq)]
pub struct CtrlMonitor {
    pub mode: DirectionMode,
    branches: Vec<(Branch, Vec<Clause>)>,
}

impl CtrlMonitor {
    pub fn new(mode: DirectionMode) -> Self {
        let sd = safe_dist_term(mode);
        let gap = || v(names::X2) - v(names::X1);
        let a1 = || post(names::A1);
        let a2 = || post(names::A2);
        let within = |x: Term, lo: Term, hi: Term| lo.le(x.clone()).and(x.le(hi));
        let or_stopped =
            |bound: Formula, speed: &str, accel: Term| bound.or(v(speed).eq_to(n(0.0)).and(accel.eq_to(n(0.0))));
        let clock = || post(names::T).eq_to(n(0.0));

        let free_a2 = match mode {
            DirectionMode::SameDirection => within(a2(), -v(names::A_MAX_BRAKE), v(names::A_MAX_ACCEL)),
            DirectionMode::OppositeDirection => within(a2(), -v(names::A_MAX_ACCEL), v(names::A_MAX_BRAKE)),
        };
        let proper_a2 = match mode {
            DirectionMode::SameDirection => a2().ge(-v(names::A_MAX_BRAKE)),
            DirectionMode::OppositeDirection => a2().ge(v(names::A_MIN_BRAKE)),
        };
        let clause = |branch: Branch, name: &str, formula: Formula| Clause {
            id: format!("{branch}.{name}"),
            formula,
        };
        let free = vec![
            clause(Branch::Free, "gap", sd.clone().le(gap())),
            clause(
                Branch::Free,
                "a1",
                within(a1(), -v(names::A_MAX_BRAKE), v(names::A_MAX_ACCEL)),
            ),
            clause(Branch::Free, "a2", free_a2),
            clause(Branch::Free, "t", clock()),
            clause(Branch::Free, "edc", edc(mode)),
        ];
        let proper = vec![
            clause(Branch::Proper, "gap", sd.ge(gap())),
            clause(
                Branch::Proper,
                "a1",
                or_stopped(a1().le(-v(names::A_MIN_BRAKE)), names::V1, a1()),
            ),
            clause(Branch::Proper, "a2", or_stopped(proper_a2, names::V2, a2())),
            clause(Branch::Proper, "t", clock()),
            clause(Branch::Proper, "edc", edc(mode)),
        ];
        CtrlMonitor {
            mode,
            branches: vec![(Branch::Free, free), (Branch::Proper, proper)],
        }
    }

    /// Shared instance per mode.
    pub fn cached(mode: DirectionMode) -> &'static CtrlMonitor {
        static SAME: OnceLock<CtrlMonitor> = OnceLock::new();
        static OPP: OnceLock<CtrlMonitor> = OnceLock::new();
        match mode {
            DirectionMode::SameDirection => SAME.get_or_init(|| CtrlMonitor::new(mode)),
            DirectionMode::OppositeDirection => OPP.get_or_init(|| CtrlMonitor::new(mode)),
        }
    }

    pub fn branches(&self) -> impl Iterator<Item = (Branch, &[Clause])> {
        self.branches.iter().map(|(b, c)| (*b, c.as_slice()))
    }

    pub fn formula(&self) -> Formula {
        Formula::disj(
            self.branches
                .iter()
                .map(|(_, clauses)| Formula::conj(clauses.iter().map(|c| c.formula.clone()))),
        )
    }

    /// Verdict over a merged valuation.
    ///
    /// Passes if some branch holds. Otherwise the reported clause is the first
    /// failing conjunct of the first branch whose gap condition holds (of the
    /// first branch if none does), so a follower that is too close and not
    /// braking fails with `proper.a1` rather than `free.gap`.
    pub fn evaluate(&self, s: &State) -> Result<MonitorVerdict, EvalError> {
        let mut results = Vec::with_capacity(self.branches.len());
        for (branch, clauses) in &self.branches {
            let mut values = Vec::with_capacity(clauses.len());
            for c in clauses {
                values.push(eval_formula(&c.formula, s)?);
            }
            if values.iter().all(|&b| b) {
                return Ok(MonitorVerdict::pass(*branch));
            }
            results.push((*branch, clauses, values));
        }
        let pick = results.iter().position(|(_, _, vals)| vals[0]).unwrap_or(0);
        let (branch, clauses, values) = &results[pick];
        let first = values.iter().position(|&b| !b).expect("branch failed");
        Ok(MonitorVerdict::fail(*branch, clauses[first].id.clone()))
    }

    pub fn check(&self, pre: &CarPairState, post: &CarPairState, p: &RssParams) -> Result<MonitorVerdict, EvalError> {
        self.evaluate(&monitor_state(pre, post, p))
    }
}

/// Pre-state positions and velocities, post-state accelerations and clock.
pub(crate) fn monitor_state(pre: &CarPairState, post: &CarPairState, p: &RssParams) -> State {
    let mut s = p.to_state();
    s.set(names::X1, pre.x1);
    s.set(names::V1, pre.v1);
    s.set(names::X2, pre.x2);
    s.set(names::V2, pre.v2);
    s.set(names::T, pre.t);
    s.set(&names::post(names::A1), post.a1);
    s.set(&names::post(names::A2), post.a2);
    s.set(&names::post(names::T), post.t);
    s
}

pub fn ctrl_monitor(mode: DirectionMode) -> Formula {
    CtrlMonitor::cached(mode).formula()
}

pub fn check_ctrl(
    mode: DirectionMode,
    pre: &CarPairState,
    post: &CarPairState,
    p: &RssParams,
) -> Result<MonitorVerdict, EvalError> {
    CtrlMonitor::cached(mode).check(pre, post, p)
}
