use super::EvalError;
use crate::hp::{Formula, State, Term};

/// Evaluates `t` left to right in IEEE double arithmetic.
pub fn eval_term(t: &Term, s: &State) -> Result<f64, EvalError> {
    Ok(match t {
        Term::Num(v) => *v,
        Term::Var(x) => s.get(x)?,
        Term::Neg(a) => -eval_term(a, s)?,
        Term::Add(a, b) => eval_term(a, s)? + eval_term(b, s)?,
        Term::Sub(a, b) => eval_term(a, s)? - eval_term(b, s)?,
        Term::Mul(a, b) => eval_term(a, s)? * eval_term(b, s)?,
        Term::Div(a, b) => {
            let n = eval_term(a, s)?;
            let d = eval_term(b, s)?;
            if d == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            n / d
        }
        Term::Pow(a, e) => py_pow(eval_term(a, s)?, *e)?,
        // ties and NaN resolve to the first argument, like Python's builtins
        Term::Min(a, b) => {
            let x = eval_term(a, s)?;
            let y = eval_term(b, s)?;
            if y < x {
                y
            } else {
                x
            }
        }
        Term::Max(a, b) => {
            let x = eval_term(a, s)?;
            let y = eval_term(b, s)?;
            if y > x {
                y
            } else {
                x
            }
        }
        Term::Abs(a) => eval_term(a, s)?.abs(),
    })
}

/// `base ** exp` with the special cases of CPython's float power.
pub fn py_pow(base: f64, exp: u32) -> Result<f64, EvalError> {
    let odd = exp % 2 == 1;
    if exp == 0 {
        return Ok(1.0);
    }
    if base.is_nan() {
        return Ok(base);
    }
    if base.is_infinite() {
        return Ok(if odd { base } else { base.abs() });
    }
    if base == 0.0 {
        return Ok(if odd { base } else { 0.0 });
    }
    let (mag, negate) = if base < 0.0 { (-base, odd) } else { (base, false) };
    if mag == 1.0 {
        return Ok(if negate { -1.0 } else { 1.0 });
    }
    // CPython calls libm pow(), which can differ from x*x in the last bit.
    // black_box stops LLVM from rewriting pow(x, 2.0) as x*x when inlined.
    let r = mag.powf(std::hint::black_box(f64::from(exp)));
    if r.is_infinite() {
        return Err(EvalError::PowOverflow);
    }
    Ok(if negate { -r } else { r })
}

/// Classical two-valued semantics. `&`, `|` and `->` short-circuit.
pub fn eval_formula(f: &Formula, s: &State) -> Result<bool, EvalError> {
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Cmp(a, op, b) => {
            let x = eval_term(a, s)?;
            let y = eval_term(b, s)?;
            op.holds(x, y)
        }
        Formula::Not(p) => !eval_formula(p, s)?,
        Formula::And(p, q) => eval_formula(p, s)? && eval_formula(q, s)?,
        Formula::Or(p, q) => eval_formula(p, s)? || eval_formula(q, s)?,
        Formula::Implies(p, q) => !eval_formula(p, s)? || eval_formula(q, s)?,
        Formula::Iff(p, q) => {
            let l = eval_formula(p, s)?;
            let r = eval_formula(q, s)?;
            l == r
        }
    })
}
