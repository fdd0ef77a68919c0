//! Differential testing of the compiler against the interpreter.

use std::io::Write;
use std::process::{Command, Stdio};

use rayon::prelude::*;
use serde::Serialize;

use super::{compile, module_text, PyccError};
use crate::hp::{HybridProgram, State};
use crate::interp::{exec_det, EvalError, ExecLimit};

/// Reads a JSON list of states and prints, per state, either the outputs or
/// the name of the exception raised.
const BATCH_DRIVER: &str = r#"

def _batch():
    results = []
    for state in json.load(sys.stdin):
        try:
            out = step(state)
            results.append({"ok": {k: repr(float(v)) for k, v in out.items()}})
        except Exception as e:
            results.append({"err": type(e).__name__})
    json.dump(results, sys.stdout)


_batch()
"#;

#[derive(Debug, Clone, PartialEq)]
pub struct DiffCase {
    pub program: HybridProgram,
    pub states: Vec<State>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum DiffOutcome {
    Ok(Vec<(String, f64)>),
    /// Python exception class name, or the one an interpreter error maps to.
    Err(String),
}

impl DiffOutcome {
    fn matches(&self, other: &DiffOutcome) -> bool {
        match (self, other) {
            (DiffOutcome::Ok(a), DiffOutcome::Ok(b)) => {
                a.len() == b.len()
                    && a.iter().zip(b).all(|((ka, va), (kb, vb))| {
                        // repr() drops NaN payloads, so any NaN equals any NaN
                        ka == kb && (va.to_bits() == vb.to_bits() || (va.is_nan() && vb.is_nan()))
                    })
            }
            (DiffOutcome::Err(a), DiffOutcome::Err(b)) => a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffMismatch {
    pub program: String,
    pub state: Vec<(String, f64)>,
    pub interpreter: DiffOutcome,
    pub python: DiffOutcome,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DifftestReport {
    pub programs: usize,
    pub runs: usize,
    pub matches: usize,
    pub errors_on_both_sides: usize,
    pub mismatches: Vec<DiffMismatch>,
    /// Programs the compiler rejected or Python failed to run at all.
    pub failures: Vec<(String, String)>,
}

impl DifftestReport {
    pub fn clean(&self) -> bool {
        self.mismatches.is_empty() && self.failures.is_empty()
    }
}

/// Exception class CPython raises where the interpreter returns `e`.
pub fn python_error_kind(e: &EvalError) -> String {
    match e {
        EvalError::DivisionByZero => "ZeroDivisionError",
        EvalError::PowOverflow => "OverflowError",
        EvalError::UnboundVariable(_) => "NameError",
        EvalError::LoopLimit(_) => "LoopLimit",
        _ => "Unsupported",
    }
    .to_string()
}

fn normalize_python_kind(kind: &str) -> String {
    match kind {
        "UnboundLocalError" | "KeyError" => "NameError".into(),
        other => other.into(),
    }
}

fn entries(s: &State) -> Vec<(String, f64)> {
    s.iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn state_json(s: &State) -> serde_json::Value {
    serde_json::Value::Object(
        s.iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::String(format!("{v:?}"))))
            .collect(),
    )
}

fn run_python(python: &str, source: &str, states: &[State]) -> Result<Vec<DiffOutcome>, String> {
    let mut child = Command::new(python)
        .arg("-c")
        .arg(source)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| format!("cannot start {python}: {e}"))?;
    let input = serde_json::Value::Array(states.iter().map(state_json).collect()).to_string();
    let mut stdin = child.stdin.take().expect("piped stdin");
    // write on a separate thread so a large output cannot deadlock the pipe
    let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
    let output = child.wait_with_output().map_err(|e| e.to_string())?;
    writer
        .join()
        .expect("stdin writer")
        .map_err(|e| format!("writing to {python}: {e}"))?;
    if !output.status.success() {
        return Err(String::from_utf8_lossy(&output.stderr).into_owned());
    }
    let parsed: Vec<serde_json::Value> =
        serde_json::from_slice(&output.stdout).map_err(|e| format!("bad output from {python}: {e}"))?;
    parsed
        .into_iter()
        .map(|r| {
            if let Some(kind) = r.get("err").and_then(|k| k.as_str()) {
                return Ok(DiffOutcome::Err(normalize_python_kind(kind)));
            }
            let obj = r
                .get("ok")
                .and_then(|o| o.as_object())
                .ok_or_else(|| format!("bad result {r}"))?;
            let mut vals = obj
                .iter()
                .map(|(k, v)| {
                    let text = v.as_str().ok_or_else(|| format!("bad value {v}"))?;
                    let x = text.parse::<f64>().map_err(|_| format!("bad float `{text}`"))?;
                    Ok((k.clone(), x))
                })
                .collect::<Result<Vec<_>, String>>()?;
            vals.sort_by(|a, b| a.0.cmp(&b.0));
            Ok(DiffOutcome::Ok(vals))
        })
        .collect()
}

fn run_case(case: &DiffCase, python: &str, lim: ExecLimit) -> DifftestReport {
    let mut rep = DifftestReport {
        programs: 1,
        ..DifftestReport::default()
    };
    let shown = case.program.to_string();
    let emitted = match compile(&case.program) {
        Ok(e) => e,
        Err(e @ PyccError::NotDeterministic(_)) | Err(e @ PyccError::Reserved(_)) => {
            rep.failures.push((shown, e.to_string()));
            return rep;
        }
    };
    let source = format!("{}{}", module_text(&emitted), BATCH_DRIVER);
    let py = match run_python(python, &source, &case.states) {
        Ok(py) if py.len() == case.states.len() => py,
        Ok(py) => {
            rep.failures.push((
                shown,
                format!("expected {} results, got {}", case.states.len(), py.len()),
            ));
            return rep;
        }
        Err(e) => {
            rep.failures.push((shown, e));
            return rep;
        }
    };
    for (state, python) in case.states.iter().zip(py) {
        rep.runs += 1;
        let interpreter = match exec_det(&case.program, state, lim) {
            Ok(post) => DiffOutcome::Ok(entries(&post)),
            Err(e) => DiffOutcome::Err(python_error_kind(&e)),
        };
        if interpreter.matches(&python) {
            rep.matches += 1;
            if matches!(interpreter, DiffOutcome::Err(_)) {
                rep.errors_on_both_sides += 1;
            }
        } else {
            rep.mismatches.push(DiffMismatch {
                program: shown.clone(),
                state: entries(state),
                interpreter,
                python,
            });
        }
    }
    rep
}

/// Runs every case through the interpreter and through CPython (one process
/// per program, in parallel) and compares the final states bitwise. A run
/// that errors on both sides with the same exception class counts as a match.
pub fn difftest(cases: &[DiffCase], python: &str, lim: ExecLimit) -> DifftestReport {
    cases
        .par_iter()
        .map(|c| run_case(c, python, lim))
        .reduce(DifftestReport::default, |mut a, b| {
            a.programs += b.programs;
            a.runs += b.runs;
            a.matches += b.matches;
            a.errors_on_both_sides += b.errors_on_both_sides;
            a.mismatches.extend(b.mismatches);
            a.failures.extend(b.failures);
            a
        })
}
