//! Canonical one-line rendering. Output re-parses to an equal tree.

use crate::hp::{Formula, HybridProgram, Term};

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    term(t, &mut s);
    s
}

pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    formula(f, &mut s);
    s
}

pub fn print_hp(p: &HybridProgram) -> String {
    let mut s = String::new();
    program(p, &mut s);
    s
}

/// Shortest decimal text that reads back as the same double.
pub fn format_number(v: f64) -> String {
    format!("{v}")
}

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Add(..) | Term::Sub(..) => 1,
        Term::Mul(..) | Term::Div(..) => 2,
        Term::Neg(_) => 3,
        Term::Pow(..) => 4,
        Term::Num(_) | Term::Var(_) | Term::Min(..) | Term::Max(..) | Term::Abs(_) => 5,
    }
}

fn term_wrapped(t: &Term, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        term(t, out);
        out.push(')');
    } else {
        term(t, out);
    }
}

fn term(t: &Term, out: &mut String) {
    let binary = |a: &Term, op: &str, b: &Term, prec: u8, out: &mut String| {
        term_wrapped(a, term_prec(a) < prec, out);
        out.push_str(op);
        term_wrapped(b, term_prec(b) <= prec, out);
    };
    match t {
        Term::Num(v) => out.push_str(&format_number(*v)),
        Term::Var(x) => out.push_str(x),
        Term::Neg(a) => {
            out.push('-');
            term_wrapped(a, term_prec(a) <= 3, out);
        }
        Term::Add(a, b) => binary(a, " + ", b, 1, out),
        Term::Sub(a, b) => binary(a, " - ", b, 1, out),
        Term::Mul(a, b) => binary(a, " * ", b, 2, out),
        Term::Div(a, b) => binary(a, " / ", b, 2, out),
        Term::Pow(a, e) => {
            term_wrapped(a, term_prec(a) < 5, out);
            out.push('^');
            out.push_str(&e.to_string());
        }
        Term::Min(a, b) | Term::Max(a, b) => {
            out.push_str(if matches!(t, Term::Min(..)) { "min(" } else { "max(" });
            term(a, out);
            out.push_str(", ");
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

fn formula_prec(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(_) => 5,
        Formula::True | Formula::False | Formula::Cmp(..) => 6,
    }
}

fn formula_wrapped(f: &Formula, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        formula(f, out);
        out.push(')');
    } else {
        formula(f, out);
    }
}

fn formula(f: &Formula, out: &mut String) {
    let binary = |a: &Formula, op: &str, b: &Formula, prec: u8, right_assoc: bool, out: &mut String| {
        let (lp, rp) = (formula_prec(a), formula_prec(b));
        formula_wrapped(a, if right_assoc { lp <= prec } else { lp < prec }, out);
        out.push_str(op);
        formula_wrapped(b, if right_assoc { rp < prec } else { rp <= prec }, out);
    };
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Cmp(a, op, b) => {
            term(a, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            term(b, out);
        }
        Formula::Not(p) => {
            out.push('!');
            // comparisons under `!` are bracketed for readability
            let parens = matches!(p.as_ref(), Formula::Cmp(..)) || formula_prec(p) < 5;
            formula_wrapped(p, parens, out);
        }
        Formula::And(a, b) => binary(a, " & ", b, 4, false, out),
        Formula::Or(a, b) => binary(a, " | ", b, 3, false, out),
        Formula::Implies(a, b) => binary(a, " -> ", b, 2, true, out),
        Formula::Iff(a, b) => binary(a, " <-> ", b, 1, false, out),
    }
}

fn hp_prec(p: &HybridProgram) -> u8 {
    match p {
        HybridProgram::Choice(..) => 1,
        HybridProgram::Seq(..) => 2,
        _ => 3,
    }
}

fn braced(p: &HybridProgram, out: &mut String) {
    out.push('{');
    program(p, out);
    out.push('}');
}

fn program(p: &HybridProgram, out: &mut String) {
    match p {
        HybridProgram::Assign(x, t) => {
            out.push_str(x);
            out.push_str(" := ");
            term(t, out);
        }
        HybridProgram::NondetAssign(x) => {
            out.push_str(x);
            out.push_str(" := *");
        }
        HybridProgram::Test(f) => {
            out.push('?');
            formula(f, out);
        }
        HybridProgram::Seq(a, b) => {
            if hp_prec(a) <= 2 {
                braced(a, out);
            } else {
                program(a, out);
            }
            out.push_str("; ");
            if hp_prec(b) < 2 {
                braced(b, out);
            } else {
                program(b, out);
            }
        }
        HybridProgram::Choice(a, b) => {
            // sequences inside a choice are braced so branches read as blocks
            if hp_prec(a) <= 2 {
                braced(a, out);
            } else {
                program(a, out);
            }
            out.push_str(" ++ ");
            if hp_prec(b) == 2 {
                braced(b, out);
            } else {
                program(b, out);
            }
        }
        HybridProgram::Loop(a) => {
            braced(a, out);
            out.push('*');
        }
        HybridProgram::Ode(ode) => {
            out.push('{');
            for (i, (x, t)) in ode.equations().iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(x);
                out.push_str("' = ");
                term(t, out);
            }
            if *ode.domain() != Formula::True {
                out.push_str(" & ");
                formula(ode.domain(), out);
            }
            out.push('}');
        }
    }
}
