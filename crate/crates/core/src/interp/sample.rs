use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{horizon, Horizon, Poly};
use super::{eval_formula, eval_term, EvalError, ExecLimit, Transition};
use crate::hp::{names, CmpOp, Formula, HybridProgram, OdeSystem, State, Term};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SampleOptions {
    /// Width of the interval cut from a half-line guard. `None` means
    /// `2·aMaxBrake`, read from the state.
    pub half_line_width: Option<f64>,
    /// Interval for `x := *` when no bound on `x` follows it.
    pub default_interval: Option<(f64, f64)>,
    /// Cap on every evolution duration.
    pub max_ode_duration: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampleOutcome {
    Ran(Transition),
    Blocked,
}

impl SampleOutcome {
    pub fn post(&self) -> Option<&State> {
        match self {
            SampleOutcome::Ran(tr) => Some(&tr.post),
            SampleOutcome::Blocked => None,
        }
    }
}

/// One random run of `p` from `s`, with default [`SampleOptions`].
pub fn sample_run(p: &HybridProgram, s: &State, lim: ExecLimit) -> Result<SampleOutcome, EvalError> {
    sample_run_with(p, s, lim, &SampleOptions::default())
}

/// One random run of `p` from `s`.
///
/// `x := *` draws uniformly from the interval described by the test right
/// after it. Choices pick a branch uniformly and fall back to the other one if
/// it blocks. Loops run a uniform number of iterations in
/// `0..=max_loop_iterations`, ending early if an iteration blocks. ODEs must be
/// kinematic chains (`v' = c`, `x' = v` with `c` constant during evolution);
/// the duration is uniform up to the longest one the domain allows.
///
/// Variables bound by `p` must already be in `s`.
pub fn sample_run_with(
    p: &HybridProgram,
    s: &State,
    lim: ExecLimit,
    opts: &SampleOptions,
) -> Result<SampleOutcome, EvalError> {
    let mut sampler = Sampler {
        rng: ChaCha8Rng::seed_from_u64(lim.seed),
        lim,
        opts,
    };
    let mut post = s.clone();
    if sampler.run(p, &mut post)? {
        Ok(SampleOutcome::Ran(Transition { pre: s.clone(), post }))
    } else {
        Ok(SampleOutcome::Blocked)
    }
}

struct Sampler<'a> {
    rng: ChaCha8Rng,
    lim: ExecLimit,
    opts: &'a SampleOptions,
}

impl Sampler<'_> {
    /// Returns false when the run blocks. `s` is unspecified in that case.
    fn run(&mut self, p: &HybridProgram, s: &mut State) -> Result<bool, EvalError> {
        match p {
            HybridProgram::Seq(..) => {
                let stmts = p.flatten_seq();
                for (i, stmt) in stmts.iter().enumerate() {
                    let ok = match (stmt, stmts.get(i + 1)) {
                        (HybridProgram::NondetAssign(x), Some(HybridProgram::Test(g))) => self.draw(x, Some(g), s)?,
                        _ => self.run(stmt, s)?,
                    };
                    if !ok {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            HybridProgram::Assign(x, t) => {
                let v = eval_term(t, s)?;
                assign(s, x, v)?;
                Ok(true)
            }
            HybridProgram::NondetAssign(x) => self.draw(x, None, s),
            HybridProgram::Test(f) => eval_formula(f, s),
            HybridProgram::Choice(a, b) => {
                let (first, second) = if self.rng.random_bool(0.5) { (a, b) } else { (b, a) };
                let saved = s.clone();
                if self.run(first, s)? {
                    return Ok(true);
                }
                *s = saved;
                self.run(second, s)
            }
            HybridProgram::Loop(body) => {
                let n = self.rng.random_range(0..=self.lim.max_loop_iterations);
                for _ in 0..n {
                    let saved = s.clone();
                    if !self.run(body, s)? {
                        *s = saved;
                        break;
                    }
                }
                Ok(true)
            }
            HybridProgram::Ode(ode) => self.evolve(ode, s),
        }
    }

    fn draw(&mut self, x: &str, guard: Option<&Formula>, s: &mut State) -> Result<bool, EvalError> {
        let interval = match guard {
            Some(g) => self.guard_interval(x, g, s)?,
            None => None,
        };
        let Some((lo, hi)) = interval.or(self.opts.default_interval) else {
            return Err(EvalError::NoInterval(x.to_string()));
        };
        if !(lo <= hi) {
            return Ok(false);
        }
        let v = if lo == hi { lo } else { self.rng.random_range(lo..=hi) };
        assign(s, x, v)?;
        Ok(true)
    }

    /// Bounds on `x` from the comparisons `x ~ e` among the conjuncts of `g`.
    fn guard_interval(&self, x: &str, g: &Formula, s: &State) -> Result<Option<(f64, f64)>, EvalError> {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut constrained = false;
        for c in g.conjuncts() {
            let Formula::Cmp(a, op, b) = c else { continue };
            let is_x = |t: &Term| matches!(t, Term::Var(v) if v == x);
            let (op, bound) = if is_x(a) && !b.mentions(x) {
                (*op, b)
            } else if is_x(b) && !a.mentions(x) {
                (op.flipped(), a)
            } else {
                continue;
            };
            let v = eval_term(bound, s)?;
            match op {
                CmpOp::Lt | CmpOp::Le => hi = hi.min(v),
                CmpOp::Gt | CmpOp::Ge => lo = lo.max(v),
                CmpOp::Eq => {
                    lo = lo.max(v);
                    hi = hi.min(v);
                }
                CmpOp::Ne => continue,
            }
            constrained = true;
        }
        if !constrained {
            return Ok(None);
        }
        if lo.is_infinite() || hi.is_infinite() {
            let w = match self.opts.half_line_width {
                Some(w) => w,
                None => 2.0 * s.get(names::A_MAX_BRAKE)?,
            };
            if lo.is_infinite() && hi.is_infinite() {
                return Ok(None);
            } else if lo.is_infinite() {
                lo = hi - w;
            } else {
                hi = lo + w;
            }
        }
        Ok(Some((lo, hi)))
    }

    fn evolve(&mut self, ode: &OdeSystem, s: &mut State) -> Result<bool, EvalError> {
        let evolved: Vec<&str> = ode.evolved().collect();
        let moving = |t: &Term| evolved.iter().any(|x| t.mentions(x));
        let mut rate: BTreeMap<&str, f64> = BTreeMap::new();
        for (x, t) in ode.equations() {
            if !moving(t) {
                rate.insert(x, eval_term(t, s)?);
            }
        }
        // x(τ) = x0 + v0·τ + ½·a·τ² for `x' = v, v' = a`; x0 + c·τ for `x' = c`
        let mut chain: Vec<(&str, Option<&str>)> = Vec::new();
        let mut polys = BTreeMap::new();
        for (x, t) in ode.equations() {
            let x0 = s.get(x)?;
            if let Some(&c) = rate.get(x.as_str()) {
                chain.push((x, None));
                polys.insert(x.clone(), Poly([x0, c, 0.0]));
            } else if let Term::Var(v) = t {
                let Some(&a) = rate.get(v.as_str()) else {
                    return Err(EvalError::UnsupportedOde(format!("{x}' = {t}")));
                };
                chain.push((x, Some(v)));
                polys.insert(x.clone(), Poly([x0, s.get(v)?, 0.5 * a]));
            } else {
                return Err(EvalError::UnsupportedOde(format!("{x}' = {t}")));
            }
        }
        let cap = self.opts.max_ode_duration;
        let tau_max = match (horizon(ode.domain(), s, &polys)?, cap) {
            (Horizon::Empty, _) => return Ok(false),
            (Horizon::Unbounded, None) => return Err(EvalError::UnboundedOde),
            (Horizon::Unbounded, Some(c)) => c,
            (Horizon::Upto(h), c) => c.map_or(h, |c| h.min(c)),
        };
        let tau = if tau_max > 0.0 {
            self.rng.random_range(0.0..=tau_max)
        } else {
            0.0
        };
        let start = s.clone();
        for (x, via) in chain {
            let x0 = start.get(x)?;
            let next = match via {
                None => x0 + rate[x] * tau,
                Some(v) => x0 + start.get(v)? * tau + 0.5 * rate[v] * tau * tau,
            };
            s.set(x, next);
        }
        Ok(true)
    }
}

fn assign(s: &mut State, x: &str, v: f64) -> Result<(), EvalError> {
    if !s.contains(x) {
        return Err(EvalError::FreshVariable(x.to_string()));
    }
    s.set(x, v);
    Ok(())
}
