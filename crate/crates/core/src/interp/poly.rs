//! Polynomials of degree at most two in the evolution time, used to find how
//! long an evolution domain stays true along a kinematic solution.

use std::collections::BTreeMap;

use super::{eval_term, EvalError};
use crate::hp::{CmpOp, Formula, State, Term};

/// `c[0] + c[1]·τ + c[2]·τ²`
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Poly(pub [f64; 3]);

impl Poly {
    pub fn constant(c: f64) -> Poly {
        Poly([c, 0.0, 0.0])
    }

    fn degree(&self) -> usize {
        if self.0[2] != 0.0 {
            2
        } else if self.0[1] != 0.0 {
            1
        } else {
            0
        }
    }

    pub fn eval(&self, tau: f64) -> f64 {
        (self.0[2] * tau + self.0[1]) * tau + self.0[0]
    }

    fn add(self, o: Poly) -> Poly {
        Poly([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }

    fn scale(self, k: f64) -> Poly {
        Poly([self.0[0] * k, self.0[1] * k, self.0[2] * k])
    }

    fn mul(self, o: Poly) -> Option<Poly> {
        if self.degree() + o.degree() > 2 {
            return None;
        }
        let (a, b) = (self.0, o.0);
        Some(Poly([
            a[0] * b[0],
            a[0] * b[1] + a[1] * b[0],
            a[0] * b[2] + a[1] * b[1] + a[2] * b[0],
        ]))
    }

    /// Distinct real roots in (0, ∞), ascending.
    fn positive_roots(&self) -> Vec<f64> {
        let [c, b, a] = self.0;
        let mut roots = match self.degree() {
            0 => vec![],
            1 => vec![-c / b],
            _ => {
                let disc = b * b - 4.0 * a * c;
                if disc < 0.0 {
                    vec![]
                } else {
                    // numerically stable pair
                    let q = -0.5 * (b + b.signum() * disc.sqrt());
                    if q == 0.0 {
                        vec![0.0]
                    } else {
                        vec![q / a, c / q]
                    }
                }
            }
        };
        roots.retain(|r| r.is_finite() && *r > 0.0);
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        roots
    }
}

/// The part of `[0, ∞)` on which a domain holds, starting at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Horizon {
    Empty,
    Upto(f64),
    Unbounded,
}

impl Horizon {
    fn meet(self, o: Horizon) -> Horizon {
        match (self, o) {
            (Horizon::Empty, _) | (_, Horizon::Empty) => Horizon::Empty,
            (Horizon::Unbounded, h) | (h, Horizon::Unbounded) => h,
            (Horizon::Upto(a), Horizon::Upto(b)) => Horizon::Upto(a.min(b)),
        }
    }
}

pub(crate) fn term_poly(t: &Term, s: &State, evolving: &BTreeMap<String, Poly>) -> Result<Poly, EvalError> {
    let unsupported = || EvalError::UnsupportedOde(format!("domain term `{t}` is not a polynomial of degree ≤ 2"));
    let moving = |t: &Term| evolving.keys().any(|x| t.mentions(x));
    if !moving(t) {
        return Ok(Poly::constant(eval_term(t, s)?));
    }
    Ok(match t {
        Term::Var(x) => evolving[x],
        Term::Neg(a) => term_poly(a, s, evolving)?.scale(-1.0),
        Term::Add(a, b) => term_poly(a, s, evolving)?.add(term_poly(b, s, evolving)?),
        Term::Sub(a, b) => term_poly(a, s, evolving)?.add(term_poly(b, s, evolving)?.scale(-1.0)),
        Term::Mul(a, b) => term_poly(a, s, evolving)?
            .mul(term_poly(b, s, evolving)?)
            .ok_or_else(unsupported)?,
        Term::Div(a, b) if !moving(b) => {
            let d = eval_term(b, s)?;
            if d == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            term_poly(a, s, evolving)?.scale(1.0 / d)
        }
        Term::Pow(a, e) => {
            let base = term_poly(a, s, evolving)?;
            let mut acc = Poly::constant(1.0);
            for _ in 0..*e {
                acc = acc.mul(base).ok_or_else(unsupported)?;
            }
            acc
        }
        _ => return Err(unsupported()),
    })
}

pub(crate) fn horizon(f: &Formula, s: &State, evolving: &BTreeMap<String, Poly>) -> Result<Horizon, EvalError> {
    Ok(match f {
        Formula::True => Horizon::Unbounded,
        Formula::False => Horizon::Empty,
        Formula::Cmp(a, op, b) => {
            let r = term_poly(a, s, evolving)?.add(term_poly(b, s, evolving)?.scale(-1.0));
            atom_horizon(r, *op)
        }
        Formula::And(p, q) => horizon(p, s, evolving)?.meet(horizon(q, s, evolving)?),
        Formula::Not(p) => match p.as_ref() {
            Formula::Not(inner) => horizon(inner, s, evolving)?,
            Formula::True => Horizon::Empty,
            Formula::False => Horizon::Unbounded,
            Formula::Cmp(a, op, b) => horizon(&Formula::Cmp(a.clone(), negate(*op), b.clone()), s, evolving)?,
            _ => {
                return Err(EvalError::UnsupportedOde(format!(
                    "domain `{f}` is not a conjunction of comparisons"
                )))
            }
        },
        _ => {
            return Err(EvalError::UnsupportedOde(format!(
                "domain `{f}` is not a conjunction of comparisons"
            )))
        }
    })
}

fn negate(op: CmpOp) -> CmpOp {
    match op {
        CmpOp::Lt => CmpOp::Ge,
        CmpOp::Le => CmpOp::Gt,
        CmpOp::Eq => CmpOp::Ne,
        CmpOp::Ne => CmpOp::Eq,
        CmpOp::Ge => CmpOp::Lt,
        CmpOp::Gt => CmpOp::Le,
    }
}

/// Connected component at 0 of `{τ ≥ 0 | r(τ) op 0}`.
fn atom_horizon(r: Poly, op: CmpOp) -> Horizon {
    let holds = |tau: f64| op.holds(r.eval(tau), 0.0);
    if !holds(0.0) {
        return Horizon::Empty;
    }
    if r.degree() == 0 {
        return Horizon::Unbounded;
    }
    if op == CmpOp::Eq {
        return Horizon::Upto(0.0);
    }
    let roots = r.positive_roots();
    let mut left = 0.0;
    for &root in &roots {
        if !holds(0.5 * (left + root)) {
            return Horizon::Upto(left);
        }
        left = root;
    }
    if holds(left + 1.0) {
        Horizon::Unbounded
    } else {
        Horizon::Upto(left)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn h(src: &str, evolving: &[(&str, [f64; 3])]) -> Horizon {
        let ev: BTreeMap<String, Poly> = evolving.iter().map(|(k, c)| (k.to_string(), Poly(*c))).collect();
        let s: State = [("rho", 1.5)].into_iter().collect();
        horizon(&parse_formula(src).unwrap(), &s, &ev).unwrap()
    }

    #[test]
    fn braking_car_stops() {
        // v = 4 - 2τ
        assert_eq!(h("v >= 0", &[("v", [4.0, -2.0, 0.0])]), Horizon::Upto(2.0));
        assert_eq!(h("v >= 0", &[("v", [4.0, 2.0, 0.0])]), Horizon::Unbounded);
        assert_eq!(h("v >= 0", &[("v", [-1.0, 2.0, 0.0])]), Horizon::Empty);
    }

    #[test]
    fn clock_bound_and_conjunction() {
        let ev = [("t", [0.0, 1.0, 0.0]), ("v", [4.0, -2.0, 0.0])];
        assert_eq!(h("v >= 0 & t <= rho", &ev), Horizon::Upto(1.5));
        assert_eq!(h("!(v < 0) & !!(t <= rho)", &ev), Horizon::Upto(1.5));
    }

    #[test]
    fn quadratic_touching_root() {
        // (τ - 1)² ≥ 0 holds everywhere
        assert_eq!(h("x >= 0", &[("x", [1.0, -2.0, 1.0])]), Horizon::Unbounded);
        // 1 - τ² ≥ 0 up to 1
        assert_eq!(h("x >= 0", &[("x", [1.0, 0.0, -1.0])]), Horizon::Upto(1.0));
        assert_eq!(h("x * x >= 0", &[("x", [1.0, -1.0, 0.0])]), Horizon::Unbounded);
    }

    #[test]
    fn degree_three_rejected() {
        let ev: BTreeMap<String, Poly> = [("x".to_string(), Poly([0.0, 1.0, 1.0]))].into_iter().collect();
        let f = parse_formula("x * x >= 0").unwrap();
        assert!(horizon(&f, &State::new(), &ev).is_err());
    }
}
