#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use rsskit::hp::RssParams;
use rsskit::rss::{CarPairState, DirectionMode};
use rsskit::sim::{unsafe_start_reasons, Controller, Scenario};

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

pub fn random_params<R: Rng>(rng: &mut R) -> RssParams {
    let a_min_brake = rng.random_range(0.5..8.0);
    RssParams::new(
        a_min_brake,
        rng.random_range(a_min_brake * 1.01..a_min_brake * 3.0),
        rng.random_range(0.5..6.0),
        rng.random_range(0.1..4.0),
    )
}

pub fn random_mode<R: Rng>(rng: &mut R) -> DirectionMode {
    DirectionMode::ALL[rng.random_range(0..2)]
}

/// Velocities allowed by the evolution domain of `mode`.
pub fn random_velocities<R: Rng>(rng: &mut R, mode: DirectionMode, max: f64) -> (f64, f64) {
    let v1 = if rng.random_bool(0.1) {
        0.0
    } else {
        rng.random_range(0.0..max)
    };
    let v2 = if rng.random_bool(0.1) {
        0.0
    } else {
        rng.random_range(0.0..max)
    };
    (v1, mode.lead_sign() * v2)
}

/// Random scenario whose initial state satisfies the model's assumptions.
pub fn random_safe_scenario<R: Rng>(rng: &mut R, controller: Controller) -> Scenario {
    let mode = random_mode(rng);
    let params = random_params(rng);
    let (v1, v2) = random_velocities(rng, mode, 30.0);
    let sd = rsskit::rss::safe_dist(mode, v1, v2, &params).unwrap();
    let slack = if rng.random_bool(0.2) {
        0.0
    } else {
        rng.random_range(0.0..30.0)
    };
    let x1 = rng.random_range(-100.0..100.0);
    let mut initial = CarPairState::new(x1, v1, x1 + sd + slack, v2);
    // rounding in x1 + sd may leave the gap a hair short of sd
    while !unsafe_start_reasons(mode, &initial, &params).is_empty() {
        initial.x2 = initial.x2.next_up();
    }
    let delta = if rng.random_bool(0.1) {
        params.rho
    } else {
        params.rho * rng.random_range(0.1..1.0)
    };
    Scenario {
        mode,
        params,
        initial,
        controller,
        delta,
        horizon: rng.random_range(2.0..20.0),
        seed: rng.random(),
        allow_unsafe_start: false,
    }
}

/// Fine-step integration of one car under constant acceleration `a` for
/// `duration`, stopping at zero speed when braking against direction `sign`.
///
/// Each substep uses the trapezoid rule on velocity; at the substep where the
/// velocity would change sign it is set to zero and the car holds from then on.
pub fn integrate(x: f64, v: f64, a: f64, duration: f64, sign: f64, dt: f64) -> (f64, f64) {
    let n = (duration / dt).ceil() as usize;
    let h = duration / n as f64;
    let (mut x, mut v) = (x, v);
    let mut stopped = sign * a < 0.0 && sign * v <= 0.0;
    // compensated summation keeps a million position updates accurate
    let mut carry = 0.0;
    for _ in 0..n {
        if stopped {
            break;
        }
        let mut v_next = v + a * h;
        if sign * a < 0.0 && sign * v_next <= 0.0 {
            v_next = 0.0;
            stopped = true;
        }
        let dx = 0.5 * (v + v_next) * h - carry;
        let sum = x + dx;
        carry = (sum - x) - dx;
        x = sum;
        v = v_next;
    }
    (x, v)
}
