//! Random syntax trees, deterministic programs and states for property tests
//! and differential testing. Everything is driven by a caller-supplied RNG so
//! runs are reproducible from a seed.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::hp::{is_identifier, CmpOp, Formula, HybridProgram, OdeSystem, State, Term};
use crate::pycc::RESERVED;

/// Default variable pool for generated programs.
pub const VARS: [&str; 6] = ["x", "y", "z", "v1", "a1", "rho"];

/// Random identifier accepted by both the parser and the Python compiler.
pub fn identifier<R: Rng + ?Sized>(rng: &mut R) -> String {
    const FIRST: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
    const REST: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_0123456789";
    loop {
        let len = rng.random_range(0..6);
        let mut s = String::new();
        s.push(*FIRST.choose(rng).unwrap() as char);
        for _ in 0..len {
            s.push(*REST.choose(rng).unwrap() as char);
        }
        if is_identifier(&s) && !RESERVED.contains(&s.as_str()) {
            return s;
        }
    }
}

/// Non-negative finite literal, biased toward small and exactly representable
/// values but covering the whole range.
pub fn literal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    match rng.random_range(0..6) {
        0 => rng.random_range(0..10) as f64,
        1 => rng.random_range(0..1000) as f64 / 8.0,
        2 => rng.random_range(0.0..100.0),
        3 => 10f64.powi(rng.random_range(-300..300)) * rng.random_range(1.0..10.0),
        4 => f64::from_bits(rng.random_range(0..0x7FF0_0000_0000_0000u64)),
        _ => [0.1, 0.5, 1.0, 2.0, 1e-7, 5e-324][rng.random_range(0..6)],
    }
}

/// Value for a state variable; includes signed zeros and huge magnitudes so
/// overflow and division-by-zero paths are exercised.
pub fn value<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    match rng.random_range(0..10) {
        0 => 0.0,
        1 => -0.0,
        2 => rng.random_range(-1e200..1e200),
        3 => rng.random_range(-5..5) as f64,
        _ => rng.random_range(-100.0..100.0),
    }
}

pub fn term<R: Rng + ?Sized>(rng: &mut R, depth: usize, vars: &[String]) -> Term {
    if depth <= 1 || rng.random_bool(0.25) {
        return if vars.is_empty() || rng.random_bool(0.4) {
            Term::Num(literal(rng))
        } else {
            Term::Var(vars.choose(rng).unwrap().clone())
        };
    }
    let pick = rng.random_range(0..9);
    let exp = rng.random_range(0..5);
    let mut sub = || Box::new(term(rng, depth - 1, vars));
    match pick {
        0 => Term::Neg(sub()),
        1 => Term::Add(sub(), sub()),
        2 => Term::Sub(sub(), sub()),
        3 => Term::Mul(sub(), sub()),
        4 => Term::Div(sub(), sub()),
        5 => Term::Min(sub(), sub()),
        6 => Term::Max(sub(), sub()),
        7 => Term::Abs(sub()),
        _ => Term::Pow(sub(), exp),
    }
}

pub fn formula<R: Rng + ?Sized>(rng: &mut R, depth: usize, vars: &[String]) -> Formula {
    if depth <= 2 || rng.random_bool(0.3) {
        return match rng.random_range(0..12) {
            0 => Formula::True,
            1 => Formula::False,
            _ => {
                let op = *CmpOp::ALL.choose(rng).unwrap();
                Formula::Cmp(term(rng, depth - 1, vars), op, term(rng, depth - 1, vars))
            }
        };
    }
    let pick = rng.random_range(0..5);
    let mut sub = || Box::new(formula(rng, depth - 1, vars));
    match pick {
        0 => Formula::Not(sub()),
        1 => Formula::And(sub(), sub()),
        2 => Formula::Or(sub(), sub()),
        3 => Formula::Implies(sub(), sub()),
        _ => Formula::Iff(sub(), sub()),
    }
}

/// Any hybrid program, including nondeterministic constructs and ODEs.
pub fn hp<R: Rng + ?Sized>(rng: &mut R, depth: usize, vars: &[String]) -> HybridProgram {
    if depth <= 2 || rng.random_bool(0.25) {
        let x = vars.choose(rng).unwrap().clone();
        return match rng.random_range(0..4) {
            0 => HybridProgram::Assign(x, term(rng, depth.max(2) - 1, vars)),
            1 => HybridProgram::NondetAssign(x),
            2 => HybridProgram::Test(formula(rng, depth.max(3) - 1, vars)),
            _ => {
                let n = rng.random_range(1..=vars.len().min(3));
                let eqs = vars
                    .choose_multiple(rng, n)
                    .map(|v| (v.clone(), term(rng, depth.max(2) - 1, vars)))
                    .collect();
                let domain = if rng.random_bool(0.5) {
                    Formula::True
                } else {
                    formula(rng, depth.max(3) - 1, vars)
                };
                HybridProgram::Ode(OdeSystem::new(eqs, domain).expect("distinct variables"))
            }
        };
    }
    let pick = rng.random_range(0..3);
    let mut sub = || Box::new(hp(rng, depth - 1, vars));
    match pick {
        0 => HybridProgram::Seq(sub(), sub()),
        1 => HybridProgram::Choice(sub(), sub()),
        _ => HybridProgram::Loop(sub()),
    }
}

/// Deterministic program over `vars`. Loops count down a fresh counter from a
/// small literal, so every program terminates.
pub fn det_hp<R: Rng + ?Sized>(rng: &mut R, depth: usize, vars: &[String]) -> HybridProgram {
    let mut counters = 0;
    det_block(rng, depth, vars, &mut counters)
}

fn det_block<R: Rng + ?Sized>(rng: &mut R, depth: usize, vars: &[String], counters: &mut usize) -> HybridProgram {
    let len = rng.random_range(1..=3);
    HybridProgram::seq(
        (0..len)
            .map(|_| det_stmt(rng, depth, vars, counters))
            .collect::<Vec<_>>(),
    )
}

fn det_stmt<R: Rng + ?Sized>(rng: &mut R, depth: usize, vars: &[String], counters: &mut usize) -> HybridProgram {
    let tdepth = depth.clamp(2, 4);
    if depth <= 2 || rng.random_bool(0.5) {
        let x = vars.choose(rng).unwrap();
        return HybridProgram::assign(x, term(rng, tdepth, vars));
    }
    if rng.random_bool(0.6) {
        let guard = formula(rng, tdepth, vars);
        HybridProgram::if_else(
            guard,
            det_block(rng, depth - 1, vars, counters),
            det_block(rng, depth - 1, vars, counters),
        )
    } else {
        // counters are named outside the identifier pool, which has no digits-only suffix after `n_`
        let c = format!("n_{}", *counters);
        *counters += 1;
        let start = HybridProgram::assign(&c, Term::num(rng.random_range(0..4) as f64));
        let body =
            det_block(rng, depth - 1, vars, counters).then(HybridProgram::assign(&c, Term::var(&c) - Term::num(1.0)));
        start.then(HybridProgram::while_loop(Term::var(&c).gt(Term::num(0.0)), body))
    }
}

/// Values for every variable the program reads.
pub fn state_for<R: Rng + ?Sized>(rng: &mut R, p: &HybridProgram) -> State {
    p.free_vars().into_iter().map(|x| (x, value(rng))).collect()
}

/// `n` distinct identifiers from [`identifier`].
pub fn identifiers<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(n);
    while out.len() < n {
        let id = identifier(rng);
        if !out.contains(&id) && !id.starts_with("n_") {
            out.push(id);
        }
    }
    out
}
