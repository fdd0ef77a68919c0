//! Python bindings for the rsskit core.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use rsskit_core::config::load_scenario;
use rsskit_core::hp::{is_det_hp, HybridProgram, RssParams, State};
use rsskit_core::interp::{eval_formula, eval_term, exec_det, ExecLimit};
use rsskit_core::pycc;
use rsskit_core::rss::{self, CarPairState, DirectionMode};
use rsskit_core::sim::{self, Builtin, Controller};
use rsskit_core::syntax::{parse_formula, parse_hp, parse_term, print_hp};

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mode_of(s: &str) -> PyResult<DirectionMode> {
    s.parse().map_err(value_err)
}

fn state_of(m: BTreeMap<String, f64>) -> State {
    m.into_iter().collect()
}

fn dict_of(s: &State) -> BTreeMap<String, f64> {
    s.iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// RSS parameters: braking and acceleration bounds and the reaction time.
#[pyclass(name = "Params", frozen, from_py_object)]
#[derive(Clone)]
struct PyParams(RssParams);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (a_min_brake=4.0, a_max_brake=8.0, a_max_accel=2.0, rho=1.0))]
    fn new(a_min_brake: f64, a_max_brake: f64, a_max_accel: f64, rho: f64) -> Self {
        PyParams(RssParams::new(a_min_brake, a_max_brake, a_max_accel, rho))
    }

    #[getter]
    fn a_min_brake(&self) -> f64 {
        self.0.a_min_brake
    }
    #[getter]
    fn a_max_brake(&self) -> f64 {
        self.0.a_max_brake
    }
    #[getter]
    fn a_max_accel(&self) -> f64 {
        self.0.a_max_accel
    }
    #[getter]
    fn rho(&self) -> f64 {
        self.0.rho
    }

    /// Violated constraints, empty when the parameters are usable.
    fn violations(&self) -> Vec<String> {
        self.0.validate().iter().map(ToString::to_string).collect()
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!(
            "Params(a_min_brake={:?}, a_max_brake={:?}, a_max_accel={:?}, rho={:?})",
            p.a_min_brake, p.a_max_brake, p.a_max_accel, p.rho
        )
    }
}

/// A parsed hybrid program.
#[pyclass(name = "Program", frozen)]
struct PyProgram(HybridProgram);

#[pymethods]
impl PyProgram {
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        parse_hp(src).map(PyProgram).map_err(value_err)
    }

    fn is_deterministic(&self) -> bool {
        is_det_hp(&self.0)
    }

    fn free_vars(&self) -> Vec<String> {
        self.0.free_vars().into_iter().collect()
    }

    /// Runs a deterministic program from `state` and returns the final state.
    #[pyo3(signature = (state, max_loop_iterations=rsskit_core::interp::DEFAULT_MAX_LOOP_ITERATIONS))]
    fn run(&self, state: BTreeMap<String, f64>, max_loop_iterations: usize) -> PyResult<BTreeMap<String, f64>> {
        let out = exec_det(&self.0, &state_of(state), ExecLimit::new(max_loop_iterations, 0)).map_err(value_err)?;
        Ok(dict_of(&out))
    }

    /// Python module with `step(state)` and a JSON stdin/stdout `main()`.
    fn compile(&self) -> PyResult<String> {
        let emitted = pycc::compile(&self.0).map_err(value_err)?;
        Ok(pycc::emit_harness_wrapper(&emitted))
    }

    fn __str__(&self) -> String {
        print_hp(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Program({:?})", print_hp(&self.0))
    }
}

#[pyfunction(name = "eval_term")]
fn py_eval_term(src: &str, state: BTreeMap<String, f64>) -> PyResult<f64> {
    let t = parse_term(src).map_err(value_err)?;
    eval_term(&t, &state_of(state)).map_err(value_err)
}

#[pyfunction(name = "eval_formula")]
fn py_eval_formula(src: &str, state: BTreeMap<String, f64>) -> PyResult<bool> {
    let f = parse_formula(src).map_err(value_err)?;
    eval_formula(&f, &state_of(state)).map_err(value_err)
}

/// Minimum safe longitudinal distance; `mode` is "same" or "opposite".
#[pyfunction]
fn safe_dist(mode: &str, v1: f64, v2: f64, params: PyParams) -> PyResult<f64> {
    rss::safe_dist(mode_of(mode)?, v1, v2, &params.0).map_err(value_err)
}

/// Checks one control decision: `(ok, failed_clause, branch)`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn check_ctrl(
    mode: &str,
    x1: f64,
    v1: f64,
    x2: f64,
    v2: f64,
    a1: f64,
    a2: f64,
    params: PyParams,
) -> PyResult<(bool, Option<String>, String)> {
    let pre = CarPairState::new(x1, v1, x2, v2);
    let post = CarPairState { a1, a2, ..pre };
    let v = rss::check_ctrl(mode_of(mode)?, &pre, &post, &params.0).map_err(value_err)?;
    Ok((v.satisfied, v.failed_clause, v.branch.as_str().to_string()))
}

/// Minimum separation of the worst-case trajectory from the given gap.
#[pyfunction]
fn worst_case(mode: &str, v1: f64, v2: f64, gap: f64, params: PyParams) -> PyResult<(f64, bool)> {
    let r = rss::run_model2(mode_of(mode)?, &params.0, v1, v2, gap).map_err(value_err)?;
    Ok((r.min_separation, r.collided))
}

/// A two-car simulation setup.
#[pyclass(name = "Scenario", frozen)]
struct PyScenario(sim::Scenario);

#[pymethods]
impl PyScenario {
    /// `controller` is a builtin name, "envelope", or hybrid program source.
    #[new]
    #[allow(clippy::too_many_arguments)]
    #[pyo3(signature = (mode, params, x1, v1, x2, v2, controller, delta, horizon, seed=0, allow_unsafe_start=false))]
    fn new(
        mode: &str,
        params: PyParams,
        x1: f64,
        v1: f64,
        x2: f64,
        v2: f64,
        controller: &str,
        delta: f64,
        horizon: f64,
        seed: u64,
        allow_unsafe_start: bool,
    ) -> PyResult<Self> {
        let controller = if controller == sim::ENVELOPE {
            Controller::Envelope
        } else if let Ok(b) = controller.parse::<Builtin>() {
            Controller::Builtin(b)
        } else {
            Controller::program(parse_hp(controller).map_err(value_err)?).map_err(value_err)?
        };
        let sc = sim::Scenario {
            mode: mode_of(mode)?,
            params: params.0,
            initial: CarPairState::new(x1, v1, x2, v2),
            controller,
            delta,
            horizon,
            seed,
            allow_unsafe_start,
        };
        sc.validate().map_err(value_err)?;
        Ok(PyScenario(sc))
    }

    /// Reads a scenario TOML file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        load_scenario(&path).map(|f| PyScenario(f.scenario)).map_err(value_err)
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.0.mode.as_str()
    }

    #[getter]
    fn params(&self) -> PyParams {
        PyParams(self.0.params)
    }

    fn run(&self) -> PyResult<PyTrace> {
        sim::run_scenario(&self.0)
            .map(PyTrace)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }
}

/// Simulation trace; one record per control step.
#[pyclass(name = "Trace", frozen)]
struct PyTrace(sim::Trace);

#[pymethods]
impl PyTrace {
    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        sim::Trace::read_csv(text.as_bytes()).map(PyTrace).map_err(value_err)
    }

    fn to_csv(&self) -> String {
        self.0.to_csv_string()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Records as dictionaries keyed by the CSV column names.
    fn records<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, pyo3::types::PyDict>>> {
        self.0
            .records
            .iter()
            .map(|r| {
                let d = pyo3::types::PyDict::new(py);
                for (k, v) in [
                    ("t", r.t),
                    ("x1", r.x1),
                    ("v1", r.v1),
                    ("a1", r.a1),
                    ("x2", r.x2),
                    ("v2", r.v2),
                    ("a2", r.a2),
                ] {
                    d.set_item(k, v)?;
                }
                d.set_item("mode", r.mode.as_str())?;
                d.set_item("monitor_ok", r.monitor_ok)?;
                d.set_item("monitor_id", r.monitor_id.clone())?;
                d.set_item("invariant_J", r.invariant_j)?;
                d.set_item("collided", r.collided)?;
                Ok(d)
            })
            .collect()
    }

    fn first_collision(&self) -> Option<usize> {
        self.0.first_collision()
    }

    fn first_monitor_failure(&self) -> Option<usize> {
        self.0.first_monitor_failure()
    }

    /// Recomputes every verdict offline against `mode` and `params`.
    fn check<'py>(&self, py: Python<'py>, mode: &str, params: PyParams) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
        let rep = sim::check_trace(&self.0, mode_of(mode)?, &params.0).map_err(value_err)?;
        let d = pyo3::types::PyDict::new(py);
        d.set_item("records", rep.records)?;
        d.set_item("first_monitor_failure", rep.first_monitor_failure)?;
        d.set_item("first_invariant_failure", rep.first_invariant_failure)?;
        d.set_item("first_collision", rep.first_collision)?;
        d.set_item("first_column_mismatch", rep.first_column_mismatch)?;
        d.set_item("modeling_flaw", rep.modeling_flaw)?;
        Ok(d)
    }
}

#[pymodule]
fn rsskit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyProgram>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(py_eval_term, m)?)?;
    m.add_function(wrap_pyfunction!(py_eval_formula, m)?)?;
    m.add_function(wrap_pyfunction!(safe_dist, m)?)?;
    m.add_function(wrap_pyfunction!(check_ctrl, m)?)?;
    m.add_function(wrap_pyfunction!(worst_case, m)?)?;
    m.add("BUILTIN_CONTROLLERS", Builtin::ALL.map(Builtin::as_str).to_vec())?;
    Ok(())
}
