use super::{check_pre, DirectionMode, RssError};
use crate::hp::{names, Formula, RssParams, Term};
use crate::interp::py_pow;

fn v(name: &str) -> Term {
    Term::var(name)
}

fn n(x: f64) -> Term {
    Term::num(x)
}

fn sq(x: f64) -> f64 {
    py_pow(x, 2).unwrap_or(f64::INFINITY)
}

fn clamp0(inner: f64) -> f64 {
    // same tie rule as `max(inner, 0)` in the evaluator
    if 0.0 > inner {
        0.0
    } else {
        inner
    }
}

/// Same-direction safe distance with `reaction` in place of `rho`:
///
/// `max(v1·ρ + ½·aMaxAccel·ρ² + (v1 + ρ·aMaxAccel)²/(2·aMinBrake) − v2²/(2·aMaxBrake), 0)`
pub fn safe_dist_same_term_with(reaction: Term) -> Term {
    let rho = || reaction.clone();
    let inner = v(names::V1) * rho()
        + n(0.5) * v(names::A_MAX_ACCEL) * rho().pow(2)
        + (v(names::V1) + rho() * v(names::A_MAX_ACCEL)).pow(2) / (n(2.0) * v(names::A_MIN_BRAKE))
        - v(names::V2).pow(2) / (n(2.0) * v(names::A_MAX_BRAKE));
    inner.max(n(0.0))
}

pub fn safe_dist_same_term() -> Term {
    safe_dist_same_term_with(v(names::RHO))
}

/// Opposite-direction safe distance, with `|v2|` for the backward car.
pub fn safe_dist_opp_term() -> Term {
    let rho = || v(names::RHO);
    let v1rho = || v(names::V1) + rho() * v(names::A_MAX_ACCEL);
    let speed2 = || v(names::V2).abs();
    let v2rho = || speed2() + rho() * v(names::A_MAX_ACCEL);
    (v(names::V1) + v1rho()) / n(2.0) * rho()
        + v1rho().pow(2) / (n(2.0) * v(names::A_MIN_BRAKE))
        + (speed2() + v2rho()) / n(2.0) * rho()
        + v2rho().pow(2) / (n(2.0) * v(names::A_MIN_BRAKE))
}

pub fn safe_dist_term(mode: DirectionMode) -> Term {
    match mode {
        DirectionMode::SameDirection => safe_dist_same_term(),
        DirectionMode::OppositeDirection => safe_dist_opp_term(),
    }
}

/// Closed form of [`safe_dist_same_term`], bit-identical to evaluating it.
pub fn safe_dist_same(v1: f64, v2: f64, p: &RssParams) -> Result<f64, RssError> {
    check_pre(DirectionMode::SameDirection, v1, v2, p)?;
    Ok(safe_dist_same_unchecked(v1, v2, p))
}

pub(crate) fn safe_dist_same_unchecked(v1: f64, v2: f64, p: &RssParams) -> f64 {
    let inner = v1 * p.rho + 0.5 * p.a_max_accel * sq(p.rho) + sq(v1 + p.rho * p.a_max_accel) / (2.0 * p.a_min_brake)
        - sq(v2) / (2.0 * p.a_max_brake);
    clamp0(inner)
}

/// Closed form of [`safe_dist_opp_term`], bit-identical to evaluating it.
pub fn safe_dist_opp(v1: f64, v2: f64, p: &RssParams) -> Result<f64, RssError> {
    check_pre(DirectionMode::OppositeDirection, v1, v2, p)?;
    Ok(safe_dist_opp_unchecked(v1, v2, p))
}

pub(crate) fn safe_dist_opp_unchecked(v1: f64, v2: f64, p: &RssParams) -> f64 {
    let v1rho = v1 + p.rho * p.a_max_accel;
    let speed2 = v2.abs();
    let v2rho = speed2 + p.rho * p.a_max_accel;
    (v1 + v1rho) / 2.0 * p.rho
        + sq(v1rho) / (2.0 * p.a_min_brake)
        + (speed2 + v2rho) / 2.0 * p.rho
        + sq(v2rho) / (2.0 * p.a_min_brake)
}

pub fn safe_dist(mode: DirectionMode, v1: f64, v2: f64, p: &RssParams) -> Result<f64, RssError> {
    match mode {
        DirectionMode::SameDirection => safe_dist_same(v1, v2, p),
        DirectionMode::OppositeDirection => safe_dist_opp(v1, v2, p),
    }
}

pub(crate) fn safe_dist_unchecked(mode: DirectionMode, v1: f64, v2: f64, p: &RssParams) -> f64 {
    match mode {
        DirectionMode::SameDirection => safe_dist_same_unchecked(v1, v2, p),
        DirectionMode::OppositeDirection => safe_dist_opp_unchecked(v1, v2, p),
    }
}

/// Evolution domain: `v1 ≥ 0 ∧ v2 ≥ 0` or `v1 ≥ 0 ∧ v2 ≤ 0`.
pub fn edc(mode: DirectionMode) -> Formula {
    let first = v(names::V1).ge(n(0.0));
    match mode {
        DirectionMode::SameDirection => first.and(v(names::V2).ge(n(0.0))),
        DirectionMode::OppositeDirection => first.and(v(names::V2).le(n(0.0))),
    }
}

/// Loop invariant: the latest stopping point of car 1 stays behind the
/// earliest stopping point of car 2.
pub fn loop_invariant(mode: DirectionMode) -> Formula {
    let order = v(names::X1).le(v(names::X2));
    let stop1 = v(names::X1) + v(names::V1).pow(2) / (n(2.0) * v(names::A_MIN_BRAKE));
    match mode {
        DirectionMode::SameDirection => {
            let stop2 = v(names::X2) + v(names::V2).pow(2) / (n(2.0) * v(names::A_MAX_BRAKE));
            order.and(stop1.le(stop2))
        }
        DirectionMode::OppositeDirection => {
            let stop2 = v(names::X2) - v(names::V2).pow(2) / (n(2.0) * v(names::A_MIN_BRAKE));
            order.and(stop2.ge(stop1))
        }
    }
}

/// The same-direction safe distance with the cycle clock `clock` in place of
/// `rho`, required to fit in the current gap.
pub fn cut_lemma_same(clock: &str) -> Formula {
    safe_dist_same_term_with(v(clock)).le(v(names::X2) - v(names::X1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{eval_formula, eval_term};
    use crate::rss::CarPairState;

    fn p0() -> RssParams {
        RssParams::new(4.0, 8.0, 2.0, 1.0)
    }

    fn eval_at(t: &Term, v1: f64, v2: f64) -> f64 {
        let mut s = p0().to_state();
        s.set("v1", v1);
        s.set("v2", v2);
        eval_term(t, &s).unwrap()
    }

    #[test]
    fn same_direction_values() {
        assert_eq!(safe_dist_same(10.0, 10.0, &p0()).unwrap(), 22.75);
        assert_eq!(safe_dist_same(0.0, 100.0, &p0()).unwrap(), 0.0);
        assert_eq!(eval_at(&safe_dist_same_term(), 10.0, 10.0), 22.75);
    }

    #[test]
    fn opposite_direction_values() {
        assert_eq!(safe_dist_opp(10.0, -10.0, &p0()).unwrap(), 58.0);
        assert_eq!(safe_dist_opp(0.0, 0.0, &p0()).unwrap(), 3.0);
        assert_eq!(eval_at(&safe_dist_opp_term(), 10.0, -10.0), 58.0);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(
            safe_dist_same(-1.0, 0.0, &p0()),
            Err(RssError::VelocitySign { .. })
        ));
        assert!(matches!(
            safe_dist_opp(1.0, 1.0, &p0()),
            Err(RssError::VelocitySign { .. })
        ));
        let bad = RssParams::new(4.0, 8.0, 2.0, 0.0);
        assert!(matches!(safe_dist_same(1.0, 1.0, &bad), Err(RssError::Params(_))));
    }

    #[test]
    fn free_vars_of_same_direction_term() {
        let fv = safe_dist_same_term().free_vars();
        let expect = ["v1", "v2", "rho", "aMaxAccel", "aMinBrake", "aMaxBrake"];
        assert_eq!(fv.len(), expect.len());
        assert!(expect.iter().all(|x| fv.contains(*x)));
    }

    #[test]
    fn invariant_examples() {
        let at = |mode, x1, v1, x2, v2| {
            let mut s = p0().to_state();
            CarPairState::new(x1, v1, x2, v2).bind(&mut s);
            eval_formula(&loop_invariant(mode), &s).unwrap()
        };
        assert!(at(DirectionMode::SameDirection, 0.0, 10.0, 22.75, 10.0));
        assert!(!at(DirectionMode::SameDirection, 5.0, 0.0, 4.0, 0.0));
        assert!(at(DirectionMode::OppositeDirection, 0.0, 10.0, 58.0, -10.0));
    }

    #[test]
    fn cut_lemma_at_reaction_time_is_safe_distance_check() {
        let mut s = p0().to_state();
        CarPairState::new(0.0, 10.0, 22.75, 10.0).bind(&mut s);
        s.set("t", 1.0);
        assert!(eval_formula(&cut_lemma_same("t"), &s).unwrap());
        s.set("x2", 22.7);
        assert!(!eval_formula(&cut_lemma_same("t"), &s).unwrap());
    }

    #[test]
    fn closed_form_matches_term_where_pow_differs_from_square() {
        // (v1 + rho * aMaxAccel)^2 here is one ulp away from the plain product
        let p = RssParams::new(
            2.1733570920557406,
            6.370809825189797,
            3.7279931206536734,
            1.8837913905341213,
        );
        let c = CarPairState::new(0.0, 40.80826006189093, 0.0, -1.3610172376313523);
        let mut s = p.to_state();
        c.bind(&mut s);
        let by_term = eval_term(&safe_dist_opp_term(), &s).unwrap();
        assert_eq!(safe_dist_opp(c.v1, c.v2, &p).unwrap().to_bits(), by_term.to_bits());
    }
}
