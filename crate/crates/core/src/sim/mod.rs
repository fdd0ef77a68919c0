//! Two-car simulation with deterministic or sampled controllers.

mod check;
mod controller;
mod kinematics;
mod scenario;
mod trace;

pub use check::{check_trace, TraceReport};
pub use controller::{Builtin, Controller, ControllerError, ENVELOPE};
pub use kinematics::{advance, effective_accel, kin_step};
pub use scenario::{run_scenario, unsafe_start_reasons, Scenario, SimError};
pub use trace::{format_g17, Trace, TraceError, TraceRecord, CSV_HEADER};
