//! Evaluation of terms and formulas, big-step execution of deterministic
//! programs, and randomized execution of nondeterministic ones.

mod eval;
mod exec;
mod poly;
mod sample;

use thiserror::Error;

use crate::hp::{AstError, DetError, State};

pub use eval::{eval_formula, eval_term, py_pow};
pub use exec::exec_det;
pub use sample::{sample_run, sample_run_with, SampleOptions, SampleOutcome};

pub const DEFAULT_MAX_LOOP_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecLimit {
    pub max_loop_iterations: usize,
    pub seed: u64,
}

impl ExecLimit {
    pub fn new(max_loop_iterations: usize, seed: u64) -> Self {
        assert!(max_loop_iterations >= 1, "max_loop_iterations must be at least 1");
        ExecLimit {
            max_loop_iterations,
            seed,
        }
    }

    pub fn with_seed(seed: u64) -> Self {
        ExecLimit::new(DEFAULT_MAX_LOOP_ITERATIONS, seed)
    }
}

impl Default for ExecLimit {
    fn default() -> Self {
        ExecLimit::with_seed(0)
    }
}

/// A pair of states connected by a program run.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub pre: State,
    pub post: State,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("overflow in power")]
    PowOverflow,
    #[error("loop exceeded {0} iterations")]
    LoopLimit(usize),
    #[error("program is not deterministic: {0}")]
    NotDeterministic(#[from] DetError),
    #[error("no sampling interval for `{0} := *`")]
    NoInterval(String),
    #[error("unsupported differential equation: {0}")]
    UnsupportedOde(String),
    #[error("evolution domain does not bound the duration")]
    UnboundedOde,
    #[error("assignment to `{0}`, which is not in the state")]
    FreshVariable(String),
}

impl From<AstError> for EvalError {
    fn from(e: AstError) -> Self {
        match e {
            AstError::UnboundVariable(x) => EvalError::UnboundVariable(x),
            other => EvalError::UnsupportedOde(other.to_string()),
        }
    }
}
