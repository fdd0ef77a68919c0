//! Fixed identifiers shared by the RSS models, the simulator and the monitors.

pub const X1: &str = "x1";
pub const X2: &str = "x2";
pub const V1: &str = "v1";
pub const V2: &str = "v2";
pub const A1: &str = "a1";
pub const A2: &str = "a2";
pub const T: &str = "t";

pub const A_MIN_BRAKE: &str = "aMinBrake";
pub const A_MAX_BRAKE: &str = "aMaxBrake";
pub const A_MAX_ACCEL: &str = "aMaxAccel";
pub const RHO: &str = "rho";

/// Suffix naming the post-state copy of a variable in monitor formulas.
pub const POST_SUFFIX: &str = "_post";

pub fn post(name: &str) -> String {
    format!("{name}{POST_SUFFIX}")
}
