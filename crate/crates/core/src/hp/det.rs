//! The deterministic subset of hybrid programs.
//!
//! ```text
//! α, β ::= x := θ | α; β | {?P; α} ++ {?!P; β} | {?P; α}*; ?!P
//! ```
//!
//! Sequences are matched after flattening, so `{?P; α}*; {?!P; β}` and
//! `{{?P; α}*; ?!P}; β` are both accepted. A negated guard is also accepted
//! when it equals `!P` after removing double negations.

use thiserror::Error;

use super::ast::{Formula, HybridProgram, Term};

/// Structured view of a deterministic program.
#[derive(Debug, Clone, PartialEq)]
pub enum DetStmt<'a> {
    Assign(&'a str, &'a Term),
    /// `?true`, only produced when skips are allowed.
    Skip,
    If {
        guard: &'a Formula,
        then: Vec<DetStmt<'a>>,
        otherwise: Vec<DetStmt<'a>>,
    },
    While {
        guard: &'a Formula,
        body: Vec<DetStmt<'a>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetError {
    #[error("nondeterministic assignment `{0} := *`")]
    NondetAssign(String),
    #[error("differential equation")]
    Ode,
    #[error("test `?{0}` outside an if/while shape")]
    BareTest(String),
    #[error("choice is not of the form {{?P; a}} ++ {{?!P; b}}")]
    UnguardedChoice,
    #[error("loop is not of the form {{?P; a}}*; ?!P")]
    UnguardedLoop,
}

/// True iff `p` is generated by the deterministic grammar.
pub fn is_det_hp(p: &HybridProgram) -> bool {
    det_view(p, false).is_ok()
}

/// Classifies `p` as deterministic statements.
///
/// With `allow_skip`, the identity test `?true` is accepted as a statement of
/// its own.
pub fn det_view(p: &HybridProgram, allow_skip: bool) -> Result<Vec<DetStmt<'_>>, DetError> {
    view_block(&p.flatten_seq(), allow_skip)
}

/// `q` is the negation of `p`, modulo double negation.
pub fn is_negation_of(q: &Formula, p: &Formula) -> bool {
    let neg = Formula::Not(Box::new(p.clone()));
    q.strip_double_negation() == neg.strip_double_negation()
}

fn view_block<'a>(stmts: &[&'a HybridProgram], allow_skip: bool) -> Result<Vec<DetStmt<'a>>, DetError> {
    let mut out = Vec::with_capacity(stmts.len());
    let mut i = 0;
    while i < stmts.len() {
        match stmts[i] {
            HybridProgram::Assign(x, t) => out.push(DetStmt::Assign(x, t)),
            HybridProgram::NondetAssign(x) => return Err(DetError::NondetAssign(x.clone())),
            HybridProgram::Ode(_) => return Err(DetError::Ode),
            HybridProgram::Test(Formula::True) if allow_skip => out.push(DetStmt::Skip),
            HybridProgram::Test(f) => return Err(DetError::BareTest(f.to_string())),
            HybridProgram::Choice(a, b) => {
                let (guard, then) = guarded(a).ok_or(DetError::UnguardedChoice)?;
                let (neg, otherwise) = guarded(b).ok_or(DetError::UnguardedChoice)?;
                if !is_negation_of(neg, guard) {
                    return Err(DetError::UnguardedChoice);
                }
                out.push(DetStmt::If {
                    guard,
                    then: view_block(&then, allow_skip)?,
                    otherwise: view_block(&otherwise, allow_skip)?,
                });
            }
            HybridProgram::Loop(body) => {
                let (guard, rest) = guarded(body).ok_or(DetError::UnguardedLoop)?;
                match stmts.get(i + 1) {
                    Some(HybridProgram::Test(exit)) if is_negation_of(exit, guard) => {}
                    _ => return Err(DetError::UnguardedLoop),
                }
                out.push(DetStmt::While {
                    guard,
                    body: view_block(&rest, allow_skip)?,
                });
                i += 1;
            }
            HybridProgram::Seq(..) => unreachable!("flattened"),
        }
        i += 1;
    }
    Ok(out)
}

/// Splits `?P; rest` with a non-empty `rest`.
fn guarded(p: &HybridProgram) -> Option<(&Formula, Vec<&HybridProgram>)> {
    let flat = p.flatten_seq();
    match flat.split_first() {
        Some((HybridProgram::Test(g), rest)) if !rest.is_empty() => Some((g, rest.to_vec())),
        _ => None,
    }
}
