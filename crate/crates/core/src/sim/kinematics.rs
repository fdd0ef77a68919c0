use crate::rss::{CarPairState, DirectionMode};

/// Advances both cars by `dt` under their constant accelerations.
///
/// A car decelerating toward zero speed stops there and holds position for the
/// rest of the step. Car 1 always keeps `v ≥ 0`; car 2 keeps `v ≥ 0` in the
/// same direction mode and `v ≤ 0` in the opposite one. Accelerations are left
/// unchanged in the result and `t` advances by `dt`.
pub fn kin_step(s: &CarPairState, dt: f64, mode: DirectionMode) -> CarPairState {
    let (x1, v1) = advance(s.x1, s.v1, s.a1, dt, 1.0);
    let (x2, v2) = advance(s.x2, s.v2, s.a2, dt, mode.lead_sign());
    CarPairState {
        x1,
        v1,
        x2,
        v2,
        t: s.t + dt,
        ..*s
    }
}

/// One car; `sign` is the direction its velocity must keep.
pub fn advance(x: f64, v: f64, a: f64, dt: f64, sign: f64) -> (f64, f64) {
    if sign * a < 0.0 {
        let t_stop = -v / a;
        if t_stop <= dt {
            return (x - v * v / (2.0 * a), 0.0);
        }
    }
    (x + v * dt + 0.5 * a * dt * dt, v + a * dt)
}

/// Acceleration that actually acts on a car: zero when it is stopped and
/// pushed against its direction.
pub fn effective_accel(v: f64, a: f64, sign: f64) -> f64 {
    if sign * a < 0.0 && sign * v <= 0.0 {
        0.0
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stop_event() {
        assert_eq!(advance(0.0, 4.0, -4.0, 2.0, 1.0), (2.0, 0.0));
        assert_eq!(advance(0.0, 4.0, 0.0, 2.0, 1.0), (8.0, 4.0));
        // backward car braking with positive acceleration
        assert_eq!(advance(10.0, -4.0, 4.0, 2.0, -1.0), (8.0, 0.0));
    }

    #[test]
    fn stopped_car_stays() {
        assert_eq!(advance(3.0, 0.0, -8.0, 1.0, 1.0), (3.0, 0.0));
        assert_eq!(advance(3.0, 0.0, 2.0, 1.0, -1.0), (3.0, 0.0));
        assert_eq!(advance(3.0, 0.0, 2.0, 1.0, 1.0), (4.0, 2.0));
    }

    #[test]
    fn step_keeps_accelerations_and_advances_clock() {
        let s = CarPairState {
            x1: 0.0,
            v1: 10.0,
            a1: 2.0,
            x2: 50.0,
            v2: 10.0,
            a2: -8.0,
            t: 0.5,
        };
        let n = kin_step(&s, 1.0, DirectionMode::SameDirection);
        assert_eq!((n.x1, n.v1, n.a1), (11.0, 12.0, 2.0));
        assert_eq!((n.x2, n.v2, n.a2), (56.0, 2.0, -8.0));
        assert_eq!(n.t, 1.5);
    }
}
