//! TOML scenario files.
//!
//! ```toml
//! [params]
//! aMinBrake = 4
//! aMaxBrake = 8
//! aMaxAccel = 2
//! rho = 1
//!
//! [initial]
//! x1 = 0
//! v1 = 10
//! x2 = 60
//! v2 = 10
//!
//! [run]
//! mode = "same"                  # or "opposite"
//! controller = "rss-conservative" # builtin, "envelope", or a path to a .hp file
//! delta = 1
//! horizon = 20
//! seed = 0                       # optional
//!
//! [overrides]                    # optional
//! allow-unsafe-start = false
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;

use crate::hp::{ParamViolation, RssParams};
use crate::rss::{CarPairState, DirectionMode};
use crate::sim::{Builtin, Controller, Scenario, SimError, ENVELOPE};
use crate::syntax::parse_hp;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub file: String,
    /// 1-based line in `file`, when the problem can be pinned to one.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "{}:{}: {}", self.file, l, self.message),
            None => write!(f, "{}: {}", self.file, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    params: RawParams,
    initial: RawInitial,
    run: RawRun,
    #[serde(default)]
    overrides: RawOverrides,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(rename = "aMinBrake")]
    a_min_brake: Spanned<f64>,
    #[serde(rename = "aMaxBrake")]
    a_max_brake: Spanned<f64>,
    #[serde(rename = "aMaxAccel")]
    a_max_accel: Spanned<f64>,
    rho: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    x1: Spanned<f64>,
    v1: Spanned<f64>,
    x2: Spanned<f64>,
    v2: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    mode: Spanned<String>,
    controller: Spanned<String>,
    delta: Spanned<f64>,
    horizon: Spanned<f64>,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOverrides {
    #[serde(rename = "allow-unsafe-start", default)]
    allow_unsafe_start: bool,
}

/// A loaded scenario and where its controller came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub scenario: Scenario,
    /// The `controller` entry as written.
    pub controller_source: String,
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

pub fn load_scenario(path: &Path) -> Result<ScenarioFile, ConfigError> {
    let name = path.display().to_string();
    let src = std::fs::read_to_string(path).map_err(|e| ConfigError {
        file: name.clone(),
        line: None,
        message: e.to_string(),
    })?;
    parse_scenario(&src, &name, path.parent())
}

/// Parses a scenario document. Controller paths are resolved against `base`.
pub fn parse_scenario(src: &str, file: &str, base: Option<&Path>) -> Result<ScenarioFile, ConfigError> {
    let err = |offset: Option<usize>, message: String| ConfigError {
        file: file.to_string(),
        line: offset.map(|o| line_of(src, o)),
        message,
    };
    let raw: RawFile = toml::from_str(src).map_err(|e| {
        let msg = e.message().trim().to_string();
        err(e.span().map(|s| s.start), msg)
    })?;
    let at = |s: &std::ops::Range<usize>| Some(s.start);

    let p = &raw.params;
    let params = RssParams::new(
        *p.a_min_brake.get_ref(),
        *p.a_max_brake.get_ref(),
        *p.a_max_accel.get_ref(),
        *p.rho.get_ref(),
    );
    let mode: DirectionMode = raw
        .run
        .mode
        .get_ref()
        .parse()
        .map_err(|m| err(at(&raw.run.mode.span()), m))?;
    let controller_source = raw.run.controller.get_ref().clone();
    let controller =
        resolve_controller(&controller_source, base).map_err(|m| err(at(&raw.run.controller.span()), m))?;
    let i = &raw.initial;
    let scenario = Scenario {
        mode,
        params,
        initial: CarPairState::new(*i.x1.get_ref(), *i.v1.get_ref(), *i.x2.get_ref(), *i.v2.get_ref()),
        controller,
        delta: *raw.run.delta.get_ref(),
        horizon: *raw.run.horizon.get_ref(),
        seed: raw.run.seed,
        allow_unsafe_start: raw.overrides.allow_unsafe_start,
    };
    scenario.validate().map_err(|e| {
        let span = match &e {
            SimError::Params(v) => Some(match v[0] {
                ParamViolation::MinBrakePositive | ParamViolation::MinBrakeBelowMaxBrake => p.a_min_brake.span(),
                ParamViolation::MaxAccelPositive => p.a_max_accel.span(),
                ParamViolation::RhoPositive => p.rho.span(),
            }),
            SimError::Step { .. } => Some(raw.run.delta.span()),
            SimError::Horizon(_) => Some(raw.run.horizon.span()),
            SimError::VelocitySign { v1, .. } if *v1 < 0.0 => Some(i.v1.span()),
            SimError::VelocitySign { .. } => Some(i.v2.span()),
            SimError::UnsafeStart(_) | SimError::NonFinite => Some(i.x1.span()),
            _ => None,
        };
        err(span.as_ref().and_then(at), e.to_string())
    })?;
    Ok(ScenarioFile {
        scenario,
        controller_source,
    })
}

fn resolve_controller(name: &str, base: Option<&Path>) -> Result<Controller, String> {
    if let Ok(b) = name.parse::<Builtin>() {
        return Ok(Controller::Builtin(b));
    }
    if name == ENVELOPE {
        return Ok(Controller::Envelope);
    }
    let path = match base {
        Some(dir) if Path::new(name).is_relative() => dir.join(name),
        _ => PathBuf::from(name),
    };
    if !path.exists() {
        let names: Vec<_> = Builtin::ALL.iter().map(|b| b.as_str()).chain([ENVELOPE]).collect();
        return Err(format!(
            "unknown controller `{name}` (expected one of {} or a path to a .hp file)",
            names.join(", ")
        ));
    }
    let src = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let program = parse_hp(&src).map_err(|e| format!("{}:{e}", path.display()))?;
    Controller::program(program).map_err(|e| format!("{}: {e}", path.display()))
}
