//! Compiles deterministic hybrid programs to Python 3 that reproduces the
//! interpreter bit for bit.
//!
//! Every term is emitted with the same operation order as the evaluator, and
//! `^n` becomes `**n`, which CPython evaluates with the same special cases as
//! [`crate::interp::py_pow`]. `min`, `max` and `abs` map to the Python
//! builtins of the same name.

mod difftest;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::hp::{det_view, CmpOp, DetError, DetStmt, Formula, HybridProgram, Term};

pub use difftest::{difftest, python_error_kind, DiffCase, DiffMismatch, DiffOutcome, DifftestReport};

const INDENT: &str = "    ";

/// Python keywords plus the names the generated wrapper relies on.
pub const RESERVED: &[&str] = &[
    "False",
    "None",
    "True",
    "and",
    "as",
    "assert",
    "async",
    "await",
    "break",
    "class",
    "continue",
    "def",
    "del",
    "elif",
    "else",
    "except",
    "finally",
    "for",
    "from",
    "global",
    "if",
    "import",
    "in",
    "is",
    "lambda",
    "nonlocal",
    "not",
    "or",
    "pass",
    "raise",
    "return",
    "try",
    "while",
    "with",
    "yield",
    // scaffold
    "state",
    "out",
    "step",
    "main",
    "json",
    "sys",
    "float",
    "dict",
    "repr",
    "type",
    "min",
    "max",
    "abs",
    "NameError",
    "Exception",
    "_batch",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PyccError {
    #[error("program is not deterministic: {0}")]
    NotDeterministic(#[from] DetError),
    #[error("identifier `{0}` is reserved in the generated Python")]
    Reserved(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedProgram {
    /// Straight-line Python statements at indentation level zero.
    pub body: String,
    /// Variables the program reads, sorted.
    pub inputs: Vec<String>,
    /// Variables the program reads or writes, sorted.
    pub outputs: Vec<String>,
    /// Variables assigned on every path.
    pub must_bound: Vec<String>,
    /// Hex SHA-256 of `body`.
    pub sha256: String,
    pub uses_extensions: bool,
}

/// Compiles `p`. `?true` statements become `pass`.
pub fn compile(p: &HybridProgram) -> Result<EmittedProgram, PyccError> {
    let stmts = det_view(p, true)?;
    let inputs = p.free_vars();
    let bound = p.bound_vars();
    if let Some(bad) = inputs.iter().chain(&bound).find(|x| RESERVED.contains(&x.as_str())) {
        return Err(PyccError::Reserved(bad.clone()));
    }
    let mut body = String::new();
    block(&stmts, 0, &mut body);
    let outputs: BTreeSet<String> = inputs.union(&bound).cloned().collect();
    let sha256 = hex(&Sha256::digest(body.as_bytes()));
    Ok(EmittedProgram {
        body,
        inputs: inputs.into_iter().collect(),
        outputs: outputs.into_iter().collect(),
        must_bound: p.must_bound_vars().into_iter().collect(),
        sha256,
        uses_extensions: p.uses_extension_functions(),
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn block(stmts: &[DetStmt<'_>], depth: usize, out: &mut String) {
    let pad = INDENT.repeat(depth);
    if stmts.is_empty() {
        out.push_str(&pad);
        out.push_str("pass\n");
    }
    for s in stmts {
        match s {
            DetStmt::Assign(x, t) => {
                let _ = writeln!(out, "{pad}{x}={}", py_term(t));
            }
            DetStmt::Skip => {
                let _ = writeln!(out, "{pad}pass");
            }
            DetStmt::If { guard, then, otherwise } => {
                let _ = writeln!(out, "{pad}if {}:", py_formula(guard));
                block(then, depth + 1, out);
                let _ = writeln!(out, "{pad}else:");
                block(otherwise, depth + 1, out);
            }
            DetStmt::While { guard, body } => {
                let _ = writeln!(out, "{pad}while {}:", py_formula(guard));
                block(body, depth + 1, out);
                let _ = writeln!(out, "{pad}else:");
                let _ = writeln!(out, "{pad}{INDENT}pass");
            }
        }
    }
}

/// Python float literal that reads back as `v`.
pub fn py_float(v: f64) -> String {
    let s = format!("{v:?}");
    if v.is_sign_negative() {
        format!("({s})")
    } else {
        s
    }
}

fn prec(t: &Term) -> u8 {
    match t {
        Term::Add(..) | Term::Sub(..) => 1,
        Term::Mul(..) | Term::Div(..) => 2,
        Term::Neg(_) => 3,
        Term::Pow(..) => 4,
        Term::Num(_) | Term::Var(_) | Term::Min(..) | Term::Max(..) | Term::Abs(_) => 5,
    }
}

/// Python expression for `t`. Precedence and associativity of `+ - * /`,
/// unary minus and `**` agree with the term grammar, so parentheses are only
/// added where the tree needs them.
pub fn py_term(t: &Term) -> String {
    let mut s = String::new();
    term(t, &mut s);
    s
}

fn wrapped(t: &Term, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        term(t, out);
        out.push(')');
    } else {
        term(t, out);
    }
}

fn term(t: &Term, out: &mut String) {
    let binary = |a: &Term, op: &str, b: &Term, p: u8, out: &mut String| {
        wrapped(a, prec(a) < p, out);
        out.push_str(op);
        wrapped(b, prec(b) <= p, out);
    };
    match t {
        Term::Num(v) => out.push_str(&py_float(*v)),
        Term::Var(x) => out.push_str(x),
        Term::Neg(a) => {
            out.push('-');
            wrapped(a, prec(a) <= 3, out);
        }
        Term::Add(a, b) => binary(a, "+", b, 1, out),
        Term::Sub(a, b) => binary(a, "-", b, 1, out),
        Term::Mul(a, b) => binary(a, "*", b, 2, out),
        Term::Div(a, b) => binary(a, "/", b, 2, out),
        Term::Pow(a, e) => {
            // a literal base must be bracketed too: `(-1.0)**2` comes from py_float
            wrapped(a, prec(a) < 5, out);
            let _ = write!(out, "**{e}");
        }
        Term::Min(a, b) | Term::Max(a, b) => {
            out.push_str(if matches!(t, Term::Min(..)) { "min(" } else { "max(" });
            term(a, out);
            out.push(',');
            term(b, out);
            out.push(')');
        }
        Term::Abs(a) => {
            out.push_str("abs(");
            term(a, out);
            out.push(')');
        }
    }
}

fn py_cmp(op: CmpOp) -> &'static str {
    match op {
        CmpOp::Eq => "==",
        other => other.symbol(),
    }
}

/// Python boolean expression for `f`.
///
/// Comparisons bind tighter than `not`, `and` and `or` in Python, so only
/// nested connectives are bracketed. Both sides of `<->` are always bracketed
/// because `==` between comparisons would otherwise chain.
pub fn py_formula(f: &Formula) -> String {
    let sub = |g: &Formula| match g {
        Formula::And(..) | Formula::Or(..) | Formula::Implies(..) | Formula::Iff(..) => {
            format!("({})", py_formula(g))
        }
        _ => py_formula(g),
    };
    match f {
        Formula::True => "True".into(),
        Formula::False => "False".into(),
        Formula::Cmp(a, op, b) => format!("{}{}{}", py_term(a), py_cmp(*op), py_term(b)),
        Formula::Not(p) => format!("not {}", sub(p)),
        Formula::And(a, b) => format!("{} and {}", sub(a), sub(b)),
        Formula::Or(a, b) => format!("{} or {}", sub(a), sub(b)),
        Formula::Implies(a, b) => format!("(not {}) or {}", sub(a), sub(b)),
        // `==` on bools evaluates both sides, as the interpreter does
        Formula::Iff(a, b) => format!("({})==({})", py_formula(a), py_formula(b)),
    }
}

/// `step(state)` plus imports, without an entry point.
pub(crate) fn module_text(prog: &EmittedProgram) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Generated from a deterministic hybrid program.");
    let _ = writeln!(s, "# sha256 of body: {}", prog.sha256);
    if prog.uses_extensions {
        let _ = writeln!(s, "# Uses min/max/abs, which are outside the core term language.");
    }
    s.push_str("import json\nimport sys\n\n\ndef step(state):\n");
    for x in &prog.inputs {
        let _ = writeln!(s, "{INDENT}{x} = float(state[\"{x}\"])");
    }
    for x in prog.outputs.iter().filter(|x| !prog.inputs.contains(x)) {
        let _ = writeln!(s, "{INDENT}if \"{x}\" in state:");
        let _ = writeln!(s, "{INDENT}{INDENT}{x} = float(state[\"{x}\"])");
    }
    for line in prog.body.lines() {
        let _ = writeln!(s, "{INDENT}{line}");
    }
    let _ = writeln!(s, "{INDENT}out = dict(state)");
    for x in &prog.outputs {
        if prog.inputs.contains(x) || prog.must_bound.contains(x) {
            let _ = writeln!(s, "{INDENT}out[\"{x}\"] = {x}");
        } else {
            let _ = writeln!(s, "{INDENT}try:");
            let _ = writeln!(s, "{INDENT}{INDENT}out[\"{x}\"] = {x}");
            let _ = writeln!(s, "{INDENT}except NameError:");
            let _ = writeln!(s, "{INDENT}{INDENT}pass");
        }
    }
    let _ = writeln!(s, "{INDENT}return out");
    s
}

/// A standalone script: reads a JSON object of variable values from stdin,
/// runs the program once and prints the resulting object.
///
/// Numbers are written with `repr`, which round-trips every double. Inputs
/// may also be strings such as `"inf"`, since each one goes through `float()`.
pub fn emit_harness_wrapper(prog: &EmittedProgram) -> String {
    let mut s = module_text(prog);
    s.push_str(concat!(
        "\n\n",
        "def main():\n",
        "    state = json.load(sys.stdin)\n",
        "    out = step(state)\n",
        "    json.dump({k: float(v) for k, v in out.items()}, sys.stdout)\n",
        "    sys.stdout.write(\"\\n\")\n",
        "\n\n",
        "if __name__ == \"__main__\":\n",
        "    main()\n",
    ));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_hp, parse_term};

    #[test]
    fn terms() {
        for (src, want) in [
            ("a - (b - c)", "a-(b-c)"),
            ("-x^2", "-x**2"),
            ("(-x)^2", "(-x)**2"),
            ("(x^2)^3", "(x**2)**3"),
            ("2^2", "2.0**2"),
            ("max(v1 * rho, 0)", "max(v1*rho,0.0)"),
            ("v1^2 / (2 * b)", "v1**2/(2.0*b)"),
            ("0.1 + 1e-7 + 1e21", "0.1+1e-7+1e21"),
        ] {
            assert_eq!(py_term(&parse_term(src).unwrap()), want, "{src}");
        }
        assert_eq!(py_term(&Term::Num(-1.0)), "(-1.0)");
        assert_eq!(py_term(&Term::Pow(Box::new(Term::Num(-1.0)), 2)), "(-1.0)**2");
    }

    #[test]
    fn formulas() {
        for (src, want) in [
            ("x = 1 -> !(y < 2) <-> true", "((not x==1.0) or not y<2.0)==(True)"),
            ("a < 1 & (b < 1 | c != 1)", "a<1.0 and (b<1.0 or c!=1.0)"),
            ("!(a < 1 & b < 1)", "not (a<1.0 and b<1.0)"),
            ("a < 1 <-> b < 1", "(a<1.0)==(b<1.0)"),
        ] {
            assert_eq!(py_formula(&parse_formula(src).unwrap()), want, "{src}");
        }
    }

    #[test]
    fn statements() {
        let p = parse_hp("{{?x < 3; x := x + 1}*; ?!(x < 3)}; {{?x = 3; y := 1} ++ {?!(x = 3); ?true}}").unwrap();
        let e = compile(&p).unwrap();
        assert_eq!(
            e.body,
            "while x<3.0:\n    x=x+1.0\nelse:\n    pass\nif x==3.0:\n    y=1.0\nelse:\n    pass\n"
        );
        assert_eq!(e.inputs, ["x"]);
        assert_eq!(e.outputs, ["x", "y"]);
        assert_eq!(e.must_bound, Vec::<String>::new());
        assert_eq!(e.sha256.len(), 64);
        let w = emit_harness_wrapper(&e);
        assert!(w.contains("    x = float(state[\"x\"])\n"));
        assert!(w.contains("    if \"y\" in state:\n"));
        assert!(w.contains("    try:\n        out[\"y\"] = y\n    except NameError:\n"));
    }

    #[test]
    fn rejects() {
        let nondet = parse_hp("x := *").unwrap();
        assert!(matches!(compile(&nondet), Err(PyccError::NotDeterministic(_))));
        let kw = parse_hp("lambda := 1").unwrap();
        assert_eq!(compile(&kw), Err(PyccError::Reserved("lambda".into())));
        let scaffold = parse_hp("x := state").unwrap();
        assert_eq!(compile(&scaffold), Err(PyccError::Reserved("state".into())));
    }

    #[test]
    fn hash_tracks_body() {
        let a = compile(&parse_hp("x := 1").unwrap()).unwrap();
        let b = compile(&parse_hp("x := 2").unwrap()).unwrap();
        assert_ne!(a.sha256, b.sha256);
        assert_eq!(a.sha256, compile(&parse_hp("x := 1").unwrap()).unwrap().sha256);
    }
}
