//! Worst-case trajectories of the optimality model.
//!
//! Both cars first follow worst-case accelerations for one reaction time and
//! then brake as the proper response requires until they stop. The minimal
//! safe gap is the largest distance car 1 gains on car 2 along the way.

use super::{check_pre, CarPairState, DirectionMode, RssError};
use crate::hp::RssParams;
use crate::sim::{effective_accel, kin_step};

/// `(a1, a2)` for the reaction phase and for the braking phase.
fn phases(mode: DirectionMode, p: &RssParams) -> [(f64, f64); 2] {
    match mode {
        DirectionMode::SameDirection => [(p.a_max_accel, -p.a_max_brake), (-p.a_min_brake, -p.a_max_brake)],
        DirectionMode::OppositeDirection => [(p.a_max_accel, -p.a_max_accel), (-p.a_min_brake, p.a_min_brake)],
    }
}

/// Constant-acceleration piece starting at `start`.
#[derive(Debug, Clone, Copy)]
struct Piece {
    start: f64,
    x: f64,
    v: f64,
    a: f64,
}

impl Piece {
    fn at(&self, t: f64) -> (f64, f64) {
        let h = t - self.start;
        (self.x + self.v * h + 0.5 * self.a * h * h, self.v + self.a * h)
    }
}

/// Displacement of one car from 0, piecewise with stop events.
struct Trajectory(Vec<Piece>);

impl Trajectory {
    fn new(v0: f64, sign: f64, segments: &[(f64, f64)]) -> Self {
        let mut pieces = Vec::new();
        let (mut t, mut x, mut v) = (0.0, 0.0, v0);
        for &(a, dur) in segments {
            let decel = sign * a < 0.0;
            if decel && sign * v <= 0.0 {
                pieces.push(Piece {
                    start: t,
                    x,
                    v: 0.0,
                    a: 0.0,
                });
                v = 0.0;
            } else if decel && -v / a < dur {
                let ts = -v / a;
                pieces.push(Piece { start: t, x, v, a });
                x += v * ts + 0.5 * a * ts * ts;
                v = 0.0;
                pieces.push(Piece {
                    start: t + ts,
                    x,
                    v: 0.0,
                    a: 0.0,
                });
            } else {
                pieces.push(Piece { start: t, x, v, a });
                if dur.is_finite() {
                    x += v * dur + 0.5 * a * dur * dur;
                    v += a * dur;
                }
            }
            t += dur;
        }
        Trajectory(pieces)
    }

    fn piece(&self, t: f64) -> &Piece {
        self.0.iter().rev().find(|p| p.start <= t).unwrap_or(&self.0[0])
    }

    fn at(&self, t: f64) -> (f64, f64) {
        self.piece(t).at(t)
    }

    fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().map(|p| p.start)
    }
}

/// Smallest initial gap for which the worst case never has `x1 > x2`.
pub fn worst_case_gap(mode: DirectionMode, v1: f64, v2: f64, p: &RssParams) -> Result<f64, RssError> {
    check_pre(mode, v1, v2, p)?;
    let [(r1, r2), (b1, b2)] = phases(mode, p);
    let car1 = Trajectory::new(v1, 1.0, &[(r1, p.rho), (b1, f64::INFINITY)]);
    let car2 = Trajectory::new(v2, mode.lead_sign(), &[(r2, p.rho), (b2, f64::INFINITY)]);

    let mut times: Vec<f64> = car1.breakpoints().chain(car2.breakpoints()).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let last = *times.last().expect("at least one piece");
    // both cars must be at rest after the last breakpoint
    let (p1, p2) = (car1.piece(last), car2.piece(last));
    if p1.v != 0.0 || p1.a != 0.0 || p2.v != 0.0 || p2.a != 0.0 {
        return Ok(f64::INFINITY);
    }

    let mut candidates = times.clone();
    for w in times.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let rel_a = car1.piece(mid).a - car2.piece(mid).a;
        let rel_v = car1.at(lo).1 - car2.at(lo).1;
        if rel_a != 0.0 {
            let tz = lo - rel_v / rel_a;
            if tz > lo && tz < hi {
                candidates.push(tz);
            }
        }
    }
    let gained = candidates
        .into_iter()
        .map(|t| car1.at(t).0 - car2.at(t).0)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(gained.max(0.0))
}

/// Outcome of driving the optimality model's worst case from a given gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model2Run {
    pub initial_gap: f64,
    /// Smallest `x2 − x1` over the run.
    pub min_separation: f64,
    /// `x2 − x1` once both cars stand still.
    pub final_separation: f64,
    pub collided: bool,
    pub duration: f64,
}

/// Runs the worst case of the optimality model with the kinematic stepper,
/// stepping from event to event (phase end, stops, equal velocities) so that
/// the separation is monotone between visited points.
pub fn run_model2(mode: DirectionMode, p: &RssParams, v1: f64, v2: f64, gap: f64) -> Result<Model2Run, RssError> {
    check_pre(mode, v1, v2, p)?;
    let sign2 = mode.lead_sign();
    let mut s = CarPairState::new(0.0, v1, gap, v2);
    let mut min_sep = s.gap();
    for ((a1, a2), dur) in phases(mode, p).into_iter().zip([p.rho, f64::INFINITY]) {
        s.a1 = a1;
        s.a2 = a2;
        let mut remaining = dur;
        for _ in 0..64 {
            let e1 = effective_accel(s.v1, a1, 1.0);
            let e2 = effective_accel(s.v2, a2, sign2);
            let mut next = remaining;
            if e1 * s.v1 < 0.0 {
                next = next.min(-s.v1 / e1);
            }
            if e2 * s.v2 < 0.0 {
                next = next.min(-s.v2 / e2);
            }
            let (w, dw) = (s.v1 - s.v2, e1 - e2);
            if dw != 0.0 && -w / dw > 0.0 {
                next = next.min(-w / dw);
            }
            if !next.is_finite() || next <= 0.0 {
                break;
            }
            s = kin_step(&s, next, mode);
            min_sep = min_sep.min(s.gap());
            remaining -= next;
        }
    }
    Ok(Model2Run {
        initial_gap: gap,
        min_separation: min_sep,
        final_separation: s.gap(),
        collided: min_sep < 0.0,
        duration: s.t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p0() -> RssParams {
        RssParams::new(4.0, 8.0, 2.0, 1.0)
    }

    #[test]
    fn worked_examples() {
        let same = DirectionMode::SameDirection;
        let opp = DirectionMode::OppositeDirection;
        assert!((worst_case_gap(same, 10.0, 10.0, &p0()).unwrap() - 22.75).abs() < 1e-12);
        assert!((worst_case_gap(opp, 10.0, -10.0, &p0()).unwrap() - 58.0).abs() < 1e-12);
        assert_eq!(worst_case_gap(same, 0.0, 100.0, &p0()).unwrap(), 0.0);
        assert!((worst_case_gap(opp, 0.0, 0.0, &p0()).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn model2_at_and_below_safe_distance() {
        let same = DirectionMode::SameDirection;
        let at = run_model2(same, &p0(), 10.0, 10.0, 22.75).unwrap();
        assert!(!at.collided, "{at:?}");
        assert!(at.final_separation.abs() < 1e-9);
        let below = run_model2(same, &p0(), 10.0, 10.0, 22.74).unwrap();
        assert!(below.collided);
        assert!((below.min_separation + 0.01).abs() < 1e-9);
    }

    #[test]
    fn opposite_run_stops_both_cars() {
        let r = run_model2(DirectionMode::OppositeDirection, &p0(), 10.0, -10.0, 58.0).unwrap();
        assert!(r.final_separation.abs() < 1e-9);
        assert!((r.duration - 4.0).abs() < 1e-12);
    }
}
