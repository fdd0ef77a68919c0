//! Core syntax trees, runtime state and model parameters.

pub mod ast;
pub mod det;
pub mod names;
mod params;
mod state;

use thiserror::Error;

pub use ast::{is_identifier, CmpOp, Formula, HybridProgram, OdeSystem, Term};
pub use det::{det_view, is_det_hp, DetError, DetStmt};
pub use params::{ParamViolation, RssParams};
pub use state::State;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AstError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("invalid identifier `{0}`")]
    BadIdentifier(String),
    #[error("number literal {0} must be finite and non-negative")]
    BadLiteral(f64),
    #[error("variable `{0}` appears twice in one ODE system")]
    DuplicateOdeVariable(String),
    #[error("ODE system without equations")]
    EmptyOde,
}
