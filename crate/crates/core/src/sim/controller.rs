use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hp::{is_det_hp, names, HybridProgram, RssParams};
use crate::interp::{exec_det, sample_run, EvalError, ExecLimit, SampleOutcome};
use crate::rss::formulas::safe_dist_unchecked;
use crate::rss::{build_model, CarPairState, DirectionMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// Proper response whenever `gap ≤ safeDist`.
    RssConservative,
    /// Proper response only when `gap < safeDist`.
    RssAggressive,
    /// Conservative, but the follower decides on the previous step's state.
    FaultyStaleGuard,
    /// Both cars drive toward each other at full acceleration, then brake at
    /// `aMinBrake` and stay in proper response once it has started.
    OppSymmetric,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [
        Builtin::RssConservative,
        Builtin::RssAggressive,
        Builtin::FaultyStaleGuard,
        Builtin::OppSymmetric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Builtin::RssConservative => "rss-conservative",
            Builtin::RssAggressive => "rss-aggressive",
            Builtin::FaultyStaleGuard => "faulty-stale-guard",
            Builtin::OppSymmetric => "opp-symmetric",
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Builtin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| format!("unknown builtin controller `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Controller {
    Builtin(Builtin),
    /// Deterministic program assigning `a1` and `a2`.
    Program(HybridProgram),
    /// Samples the control envelope of the model at every step.
    Envelope,
}

pub const ENVELOPE: &str = "envelope";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ControllerError {
    #[error("controller program is not deterministic")]
    NotDeterministic,
    #[error("controller program assigns `{0}`; only a1 and a2 may be assigned")]
    AssignsOther(String),
    #[error("controller program does not assign `{0}` on every path")]
    MissingAssignment(String),
    #[error("controller program reads unknown variable `{0}`")]
    UnknownVariable(String),
}

const READABLE: [&str; 11] = [
    names::X1,
    names::V1,
    names::A1,
    names::X2,
    names::V2,
    names::A2,
    names::T,
    names::A_MIN_BRAKE,
    names::A_MAX_BRAKE,
    names::A_MAX_ACCEL,
    names::RHO,
];

impl Controller {
    /// Checks the shape of a user controller program.
    pub fn program(p: HybridProgram) -> Result<Controller, ControllerError> {
        if !is_det_hp(&p) {
            return Err(ControllerError::NotDeterministic);
        }
        if let Some(x) = p.bound_vars().into_iter().find(|x| x != names::A1 && x != names::A2) {
            return Err(ControllerError::AssignsOther(x));
        }
        let must = p.must_bound_vars();
        for a in [names::A1, names::A2] {
            if !must.contains(a) {
                return Err(ControllerError::MissingAssignment(a.to_string()));
            }
        }
        if let Some(x) = p.free_vars().into_iter().find(|x| !READABLE.contains(&x.as_str())) {
            return Err(ControllerError::UnknownVariable(x));
        }
        Ok(Controller::Program(p))
    }

    pub fn name(&self) -> String {
        match self {
            Controller::Builtin(b) => b.as_str().to_string(),
            Controller::Program(_) => "program".to_string(),
            Controller::Envelope => ENVELOPE.to_string(),
        }
    }
}

/// A controller together with the memory it keeps across steps.
pub(crate) struct ControllerRun<'a> {
    controller: &'a Controller,
    mode: DirectionMode,
    params: RssParams,
    previous: Option<CarPairState>,
    latched: bool,
    rng: ChaCha8Rng,
    envelope: Option<HybridProgram>,
}

impl<'a> ControllerRun<'a> {
    pub fn new(controller: &'a Controller, mode: DirectionMode, params: RssParams, seed: u64) -> Self {
        let envelope = matches!(controller, Controller::Envelope).then(|| build_model(mode).ctrl);
        ControllerRun {
            controller,
            mode,
            params,
            previous: None,
            latched: false,
            rng: ChaCha8Rng::seed_from_u64(seed),
            envelope,
        }
    }

    /// Accelerations `(a1, a2)` for the state `s`.
    pub fn decide(&mut self, s: &CarPairState) -> Result<(f64, f64), EvalError> {
        let out = match self.controller {
            Controller::Builtin(b) => Ok(self.builtin(*b, s)),
            Controller::Program(p) => {
                let mut state = self.params.to_state();
                s.bind(&mut state);
                let post = exec_det(p, &state, ExecLimit::default())?;
                Ok((post.get(names::A1)?, post.get(names::A2)?))
            }
            Controller::Envelope => {
                let mut state = self.params.to_state();
                s.bind(&mut state);
                let ctrl = self.envelope.as_ref().expect("envelope program built");
                match sample_run(ctrl, &state, ExecLimit::new(1, self.rng.next_u64()))? {
                    SampleOutcome::Ran(tr) => Ok((tr.post.get(names::A1)?, tr.post.get(names::A2)?)),
                    SampleOutcome::Blocked => Err(EvalError::NoInterval("a1".into())),
                }
            }
        };
        self.previous = Some(*s);
        out
    }

    fn needs_proper(&self, s: &CarPairState, strict: bool) -> bool {
        let sd = safe_dist_unchecked(self.mode, s.v1, s.v2, &self.params);
        if strict {
            sd > s.gap()
        } else {
            sd >= s.gap()
        }
    }

    fn builtin(&mut self, b: Builtin, s: &CarPairState) -> (f64, f64) {
        let proper = match b {
            Builtin::RssConservative => self.needs_proper(s, false),
            Builtin::RssAggressive => self.needs_proper(s, true),
            Builtin::FaultyStaleGuard => self.needs_proper(&self.previous.unwrap_or(*s), false),
            Builtin::OppSymmetric => {
                self.latched = self.latched || self.needs_proper(s, false);
                self.latched
            }
        };
        let p = &self.params;
        let brake1 = if s.v1 > 0.0 { -p.a_min_brake } else { 0.0 };
        match (self.mode, proper) {
            (DirectionMode::SameDirection, false) => (p.a_max_accel, -p.a_max_brake),
            (DirectionMode::SameDirection, true) => (brake1, 0.0),
            (DirectionMode::OppositeDirection, false) => (p.a_max_accel, -p.a_max_accel),
            (DirectionMode::OppositeDirection, true) => (brake1, if s.v2 < 0.0 { p.a_min_brake } else { 0.0 }),
        }
    }
}
