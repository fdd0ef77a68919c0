use super::formulas::{edc, safe_dist_term};
use super::DirectionMode;
use crate::hp::{names, Formula, HybridProgram, OdeSystem, Term};

fn v(name: &str) -> Term {
    Term::var(name)
}

fn n(x: f64) -> Term {
    Term::num(x)
}

/// Model 1 instantiated for one direction mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RssModel {
    pub mode: DirectionMode,
    pub safe_dist: Term,
    pub edc: Formula,
    pub free_driving: HybridProgram,
    pub proper_response: HybridProgram,
    /// Guarded choice between the two regimes, then `t := 0`.
    pub ctrl: HybridProgram,
    pub motion: HybridProgram,
    /// `ctrl; motion`
    pub body: HybridProgram,
    /// `{ctrl; motion}*`
    pub program: HybridProgram,
    pub init: Formula,
    pub safety: Formula,
}

/// The optimality model: worst case for one reaction time, then any number of
/// proper-response phases.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityModel {
    pub mode: DirectionMode,
    pub worst_case_motion: HybridProgram,
    pub evade_motion: HybridProgram,
    pub program: HybridProgram,
    /// Parameter bounds, domain, `eps > 0` and a gap of `safeDist − eps`.
    pub init: Formula,
    pub unsafe_goal: Formula,
}

pub const EPSILON: &str = "eps";

fn bounded(x: &str, lo: Term, hi: Term) -> HybridProgram {
    HybridProgram::nondet(x).then(HybridProgram::test(lo.le(v(x)).and(v(x).le(hi))))
}

fn at_least(x: &str, lo: Term) -> HybridProgram {
    HybridProgram::nondet(x).then(HybridProgram::test(v(x).ge(lo)))
}

fn at_most(x: &str, hi: Term) -> HybridProgram {
    HybridProgram::nondet(x).then(HybridProgram::test(v(x).le(hi)))
}

fn stopped(speed: &str, accel: &str) -> HybridProgram {
    HybridProgram::test(v(speed).eq_to(n(0.0))).then(HybridProgram::assign(accel, n(0.0)))
}

fn free_driving(mode: DirectionMode) -> HybridProgram {
    let a1 = bounded(names::A1, -v(names::A_MAX_BRAKE), v(names::A_MAX_ACCEL));
    let a2 = match mode {
        DirectionMode::SameDirection => bounded(names::A2, -v(names::A_MAX_BRAKE), v(names::A_MAX_ACCEL)),
        DirectionMode::OppositeDirection => bounded(names::A2, -v(names::A_MAX_ACCEL), v(names::A_MAX_BRAKE)),
    };
    HybridProgram::seq(
        a1.flatten_seq()
            .into_iter()
            .chain(a2.flatten_seq())
            .cloned()
            .collect::<Vec<_>>(),
    )
}

fn proper_response(mode: DirectionMode) -> HybridProgram {
    let a1 = at_most(names::A1, -v(names::A_MIN_BRAKE)).or_else(stopped(names::V1, names::A1));
    let lead = match mode {
        DirectionMode::SameDirection => at_least(names::A2, -v(names::A_MAX_BRAKE)),
        DirectionMode::OppositeDirection => at_least(names::A2, v(names::A_MIN_BRAKE)),
    };
    a1.then(lead.or_else(stopped(names::V2, names::A2)))
}

fn kinematics(domain: Formula) -> HybridProgram {
    let eqs = vec![
        (names::X1.to_string(), v(names::V1)),
        (names::X2.to_string(), v(names::V2)),
        (names::V1.to_string(), v(names::A1)),
        (names::V2.to_string(), v(names::A2)),
        (names::T.to_string(), n(1.0)),
    ];
    HybridProgram::Ode(OdeSystem::new(eqs, domain).expect("fixed kinematic system is well formed"))
}

fn params_ok() -> Formula {
    n(0.0)
        .lt(v(names::A_MIN_BRAKE))
        .and(v(names::A_MIN_BRAKE).lt(v(names::A_MAX_BRAKE)))
        .and(n(0.0).lt(v(names::A_MAX_ACCEL)))
        .and(v(names::RHO).gt(n(0.0)))
}

fn gap() -> Term {
    v(names::X2) - v(names::X1)
}

pub fn build_model(mode: DirectionMode) -> RssModel {
    let safe_dist = safe_dist_term(mode);
    let edc = edc(mode);
    let free_driving = free_driving(mode);
    let proper_response = proper_response(mode);
    let ctrl = HybridProgram::test(safe_dist.clone().le(gap()))
        .then(free_driving.clone())
        .or_else(HybridProgram::test(safe_dist.clone().ge(gap())).then(proper_response.clone()))
        .then(HybridProgram::assign(names::T, n(0.0)));
    let motion = kinematics(edc.clone().and(v(names::T).le(v(names::RHO))));
    let body = ctrl.clone().then(motion.clone());
    let program = body.clone().repeat();
    let init = Formula::conj([
        v(names::X1).le(v(names::X2)),
        safe_dist.clone().le(gap()),
        params_ok(),
        edc.clone(),
    ]);
    RssModel {
        mode,
        safe_dist,
        edc,
        free_driving,
        proper_response,
        ctrl,
        motion,
        body,
        program,
        init,
        safety: v(names::X1).le(v(names::X2)),
    }
}

pub fn build_optimality_model(mode: DirectionMode) -> OptimalityModel {
    let m = build_model(mode);
    let worst_case_motion = kinematics(v(names::T).le(v(names::RHO)).and(m.edc.clone()));
    let evade_motion = kinematics(m.edc.clone());
    let program = HybridProgram::seq([
        m.free_driving.clone(),
        HybridProgram::assign(names::T, n(0.0)),
        worst_case_motion.clone(),
        m.proper_response.clone().then(evade_motion.clone()).repeat(),
    ]);
    let init = Formula::conj([
        v(names::X1).le(v(names::X2)),
        params_ok(),
        m.edc.clone(),
        v(EPSILON).gt(n(0.0)),
        (m.safe_dist.clone() - v(EPSILON)).eq_to(gap()),
    ]);
    OptimalityModel {
        mode,
        worst_case_motion,
        evade_motion,
        program,
        init,
        unsafe_goal: v(names::X1).gt(v(names::X2)),
    }
}

/// `a1 := aMaxAccel; a2 := -aMaxBrake`
pub fn free_driving_det() -> HybridProgram {
    HybridProgram::assign(names::A1, v(names::A_MAX_ACCEL))
        .then(HybridProgram::assign(names::A2, -v(names::A_MAX_BRAKE)))
}
