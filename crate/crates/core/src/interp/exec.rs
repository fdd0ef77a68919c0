use super::{eval_formula, eval_term, EvalError, ExecLimit};
use crate::hp::{det_view, DetStmt, HybridProgram, State};

/// Big-step execution of a deterministic program.
///
/// `?true` is accepted as a no-op. Assignments may introduce variables that
/// are not yet in the state.
pub fn exec_det(p: &HybridProgram, s: &State, lim: ExecLimit) -> Result<State, EvalError> {
    let stmts = det_view(p, true)?;
    let mut state = s.clone();
    run_block(&stmts, &mut state, lim)?;
    Ok(state)
}

fn run_block(stmts: &[DetStmt<'_>], s: &mut State, lim: ExecLimit) -> Result<(), EvalError> {
    for stmt in stmts {
        match stmt {
            DetStmt::Assign(x, t) => {
                let v = eval_term(t, s)?;
                s.set(x, v);
            }
            DetStmt::Skip => {}
            DetStmt::If { guard, then, otherwise } => {
                if eval_formula(guard, s)? {
                    run_block(then, s, lim)?;
                } else {
                    run_block(otherwise, s, lim)?;
                }
            }
            DetStmt::While { guard, body } => {
                let mut n = 0;
                while eval_formula(guard, s)? {
                    if n == lim.max_loop_iterations {
                        return Err(EvalError::LoopLimit(n));
                    }
                    run_block(body, s, lim)?;
                    n += 1;
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_hp;

    fn st(pairs: &[(&str, f64)]) -> State {
        pairs.iter().map(|&(k, v)| (k, v)).collect()
    }

    #[test]
    fn increment() {
        let p = parse_hp("x := x + 1").unwrap();
        assert_eq!(
            exec_det(&p, &st(&[("x", 1.0)]), ExecLimit::default()).unwrap(),
            st(&[("x", 2.0)])
        );
    }

    #[test]
    fn free_driving_det() {
        let p = parse_hp("a1 := aMaxAccel; a2 := -aMaxBrake").unwrap();
        let s = st(&[("a1", 0.0), ("a2", 0.0), ("aMaxAccel", 2.0), ("aMaxBrake", 8.0)]);
        let out = exec_det(&p, &s, ExecLimit::default()).unwrap();
        assert_eq!(out.get("a1").unwrap(), 2.0);
        assert_eq!(out.get("a2").unwrap(), -8.0);
        assert_eq!(out.get("aMaxBrake").unwrap(), 8.0);
    }

    #[test]
    fn while_countdown() {
        let p = parse_hp("{?x < 3; x := x + 1}*; ?!(x < 3)").unwrap();
        assert_eq!(
            exec_det(&p, &st(&[("x", 0.0)]), ExecLimit::default()).unwrap(),
            st(&[("x", 3.0)])
        );
    }

    #[test]
    fn if_takes_else_branch() {
        let p = parse_hp("{?v1 = 0; a1 := 0} ++ {?!(v1 = 0); a1 := -4}").unwrap();
        let out = exec_det(&p, &st(&[("v1", 3.0), ("a1", 9.0)]), ExecLimit::default()).unwrap();
        assert_eq!(out.get("a1").unwrap(), -4.0);
    }

    #[test]
    fn loop_limit() {
        let p = parse_hp("{?x < 100; x := x + 1}*; ?!(x < 100)").unwrap();
        let err = exec_det(&p, &st(&[("x", 0.0)]), ExecLimit::new(10, 0)).unwrap_err();
        assert_eq!(err, EvalError::LoopLimit(10));
        assert!(exec_det(&p, &st(&[("x", 90.0)]), ExecLimit::new(10, 0)).is_ok());
    }

    #[test]
    fn rejects_nondeterminism() {
        let p = parse_hp("a1 := *").unwrap();
        assert!(matches!(
            exec_det(&p, &st(&[("a1", 0.0)]), ExecLimit::default()),
            Err(EvalError::NotDeterministic(_))
        ));
    }

    #[test]
    fn identity_program() {
        let p = parse_hp("?true").unwrap();
        let s = st(&[("x", 0.5)]);
        assert_eq!(exec_det(&p, &s, ExecLimit::default()).unwrap(), s);
    }
}
