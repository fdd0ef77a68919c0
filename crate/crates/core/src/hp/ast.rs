//! Terms, quantifier-free formulas and hybrid programs.
//!
//! Equality on all three trees is structural. Number literals are kept
//! non-negative; a negative constant is `Neg(Num(_))`, which is also what the
//! parser produces for `-4`.

use std::collections::BTreeSet;
use std::fmt;

use super::AstError;

/// Arithmetic term over the reals.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    /// Finite, non-negative literal.
    Num(f64),
    Var(String),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Div(Box<Term>, Box<Term>),
    /// Power with a non-negative integer literal exponent.
    Pow(Box<Term>, u32),
    Min(Box<Term>, Box<Term>),
    Max(Box<Term>, Box<Term>),
    Abs(Box<Term>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ne, CmpOp::Ge, CmpOp::Gt];

    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }

    /// The operator with swapped operands: `a < b` iff `b > a`.
    pub fn flipped(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Eq => CmpOp::Eq,
            CmpOp::Ne => CmpOp::Ne,
            CmpOp::Ge => CmpOp::Le,
            CmpOp::Gt => CmpOp::Lt,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

/// Quantifier-free, modality-free first-order formula over real arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    True,
    False,
    Cmp(Term, CmpOp, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

/// Explicit ODE system `{x1' = θ1, ..., xn' = θn & Q}`.
///
/// Fields are private so that the no-duplicate-variable invariant can only be
/// established through [`OdeSystem::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSystem {
    eqs: Vec<(String, Term)>,
    domain: Formula,
}

impl OdeSystem {
    pub fn new(eqs: Vec<(String, Term)>, domain: Formula) -> Result<Self, AstError> {
        if eqs.is_empty() {
            return Err(AstError::EmptyOde);
        }
        let mut seen = BTreeSet::new();
        for (x, _) in &eqs {
            check_identifier(x)?;
            if !seen.insert(x.as_str()) {
                return Err(AstError::DuplicateOdeVariable(x.clone()));
            }
        }
        Ok(OdeSystem { eqs, domain })
    }

    pub fn equations(&self) -> &[(String, Term)] {
        &self.eqs
    }

    pub fn domain(&self) -> &Formula {
        &self.domain
    }

    pub fn evolved(&self) -> impl Iterator<Item = &str> {
        self.eqs.iter().map(|(x, _)| x.as_str())
    }
}

/// Hybrid program.
#[derive(Debug, Clone, PartialEq)]
pub enum HybridProgram {
    Assign(String, Term),
    NondetAssign(String),
    Test(Formula),
    Seq(Box<HybridProgram>, Box<HybridProgram>),
    Choice(Box<HybridProgram>, Box<HybridProgram>),
    Loop(Box<HybridProgram>),
    Ode(OdeSystem),
}

const KEYWORDS: [&str; 5] = ["true", "false", "min", "max", "abs"];

/// `[a-zA-Z_][a-zA-Z0-9_]*`, excluding the reserved words of the concrete syntax.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&s)
}

pub(crate) fn check_identifier(s: &str) -> Result<(), AstError> {
    if is_identifier(s) {
        Ok(())
    } else {
        Err(AstError::BadIdentifier(s.to_string()))
    }
}

impl Term {
    pub fn num(v: f64) -> Term {
        if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
            Term::Neg(Box::new(Term::Num(-v)))
        } else {
            Term::Num(v)
        }
    }

    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn pow(self, exp: u32) -> Term {
        Term::Pow(Box::new(self), exp)
    }

    pub fn min(self, other: Term) -> Term {
        Term::Min(Box::new(self), Box::new(other))
    }

    pub fn max(self, other: Term) -> Term {
        Term::Max(Box::new(self), Box::new(other))
    }

    pub fn abs(self) -> Term {
        Term::Abs(Box::new(self))
    }

    pub fn lt(self, rhs: Term) -> Formula {
        Formula::Cmp(self, CmpOp::Lt, rhs)
    }
    pub fn le(self, rhs: Term) -> Formula {
        Formula::Cmp(self, CmpOp::Le, rhs)
    }
    pub fn eq_to(self, rhs: Term) -> Formula {
        Formula::Cmp(self, CmpOp::Eq, rhs)
    }
    pub fn ne(self, rhs: Term) -> Formula {
        Formula::Cmp(self, CmpOp::Ne, rhs)
    }
    pub fn ge(self, rhs: Term) -> Formula {
        Formula::Cmp(self, CmpOp::Ge, rhs)
    }
    pub fn gt(self, rhs: Term) -> Formula {
        Formula::Cmp(self, CmpOp::Gt, rhs)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Num(_) => {}
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Neg(a) | Term::Abs(a) | Term::Pow(a, _) => a.collect_vars(out),
            Term::Add(a, b)
            | Term::Sub(a, b)
            | Term::Mul(a, b)
            | Term::Div(a, b)
            | Term::Min(a, b)
            | Term::Max(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Term::Num(_) => false,
            Term::Var(x) => x == name,
            Term::Neg(a) | Term::Abs(a) | Term::Pow(a, _) => a.mentions(name),
            Term::Add(a, b)
            | Term::Sub(a, b)
            | Term::Mul(a, b)
            | Term::Div(a, b)
            | Term::Min(a, b)
            | Term::Max(a, b) => a.mentions(name) || b.mentions(name),
        }
    }

    pub fn uses_extension_functions(&self) -> bool {
        match self {
            Term::Num(_) | Term::Var(_) => false,
            Term::Min(..) | Term::Max(..) | Term::Abs(..) => true,
            Term::Neg(a) | Term::Pow(a, _) => a.uses_extension_functions(),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) | Term::Div(a, b) => {
                a.uses_extension_functions() || b.uses_extension_functions()
            }
        }
    }

    /// Checks the literal and identifier invariants over the whole tree.
    pub fn validate(&self) -> Result<(), AstError> {
        match self {
            Term::Num(v) => {
                if v.is_finite() && *v >= 0.0 && !v.is_sign_negative() {
                    Ok(())
                } else {
                    Err(AstError::BadLiteral(*v))
                }
            }
            Term::Var(x) => check_identifier(x),
            Term::Neg(a) | Term::Abs(a) | Term::Pow(a, _) => a.validate(),
            Term::Add(a, b)
            | Term::Sub(a, b)
            | Term::Mul(a, b)
            | Term::Div(a, b)
            | Term::Min(a, b)
            | Term::Max(a, b) => {
                a.validate()?;
                b.validate()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Num(_) | Term::Var(_) => 1,
            Term::Neg(a) | Term::Abs(a) | Term::Pow(a, _) => 1 + a.depth(),
            Term::Add(a, b)
            | Term::Sub(a, b)
            | Term::Mul(a, b)
            | Term::Div(a, b)
            | Term::Min(a, b)
            | Term::Max(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

macro_rules! term_binop {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl std::ops::$trait for Term {
            type Output = Term;
            fn $method(self, rhs: Term) -> Term {
                Term::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}

term_binop!(Add, add, Add);
term_binop!(Sub, sub, Sub);
term_binop!(Mul, mul, Mul);
term_binop!(Div, div, Div);

impl std::ops::Neg for Term {
    type Output = Term;
    fn neg(self) -> Term {
        Term::Neg(Box::new(self))
    }
}

impl Formula {
    pub fn and(self, rhs: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn iff(self, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(self), Box::new(rhs))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    /// Right-nested conjunction; `True` for an empty list.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return Formula::True;
        };
        while let Some(p) = parts.pop() {
            acc = p.and(acc);
        }
        acc
    }

    /// Right-nested disjunction; `False` for an empty list.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return Formula::False;
        };
        while let Some(p) = parts.pop() {
            acc = p.or(acc);
        }
        acc
    }

    /// Top-level conjuncts, flattening nested `And` in either position.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::And(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Strips pairs of leading negations: `!!P` becomes `P`.
    pub fn strip_double_negation(&self) -> &Formula {
        let mut f = self;
        while let Formula::Not(inner) = f {
            match inner.as_ref() {
                Formula::Not(p) => f = p,
                _ => break,
            }
        }
        f
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Cmp(a, _, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Not(p) => p.collect_vars(out),
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) | Formula::Iff(p, q) => {
                p.collect_vars(out);
                q.collect_vars(out);
            }
        }
    }

    pub fn uses_extension_functions(&self) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Cmp(a, _, b) => a.uses_extension_functions() || b.uses_extension_functions(),
            Formula::Not(p) => p.uses_extension_functions(),
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) | Formula::Iff(p, q) => {
                p.uses_extension_functions() || q.uses_extension_functions()
            }
        }
    }

    pub fn validate(&self) -> Result<(), AstError> {
        match self {
            Formula::True | Formula::False => Ok(()),
            Formula::Cmp(a, _, b) => {
                a.validate()?;
                b.validate()
            }
            Formula::Not(p) => p.validate(),
            Formula::And(p, q) | Formula::Or(p, q) | Formula::Implies(p, q) | Formula::Iff(p, q) => {
                p.validate()?;
                q.validate()
            }
        }
    }
}

impl HybridProgram {
    pub fn assign(x: &str, t: Term) -> HybridProgram {
        HybridProgram::Assign(x.to_string(), t)
    }

    pub fn nondet(x: &str) -> HybridProgram {
        HybridProgram::NondetAssign(x.to_string())
    }

    pub fn test(f: Formula) -> HybridProgram {
        HybridProgram::Test(f)
    }

    pub fn then(self, next: HybridProgram) -> HybridProgram {
        HybridProgram::Seq(Box::new(self), Box::new(next))
    }

    pub fn or_else(self, other: HybridProgram) -> HybridProgram {
        HybridProgram::Choice(Box::new(self), Box::new(other))
    }

    pub fn repeat(self) -> HybridProgram {
        HybridProgram::Loop(Box::new(self))
    }

    /// Right-nested sequence of the given statements. Panics on an empty list.
    pub fn seq(parts: impl IntoIterator<Item = HybridProgram>) -> HybridProgram {
        let mut parts: Vec<HybridProgram> = parts.into_iter().collect();
        let mut acc = parts.pop().expect("seq of zero programs");
        while let Some(p) = parts.pop() {
            acc = p.then(acc);
        }
        acc
    }

    /// `{?P; then} ++ {?!P; otherwise}`
    pub fn if_else(guard: Formula, then: HybridProgram, otherwise: HybridProgram) -> HybridProgram {
        HybridProgram::test(guard.clone())
            .then(then)
            .or_else(HybridProgram::test(guard.not()).then(otherwise))
    }

    /// `{?P; body}*; ?!P`
    pub fn while_loop(guard: Formula, body: HybridProgram) -> HybridProgram {
        HybridProgram::test(guard.clone())
            .then(body)
            .repeat()
            .then(HybridProgram::test(guard.not()))
    }

    /// Sequence flattened into its statements, independent of nesting.
    pub fn flatten_seq(&self) -> Vec<&HybridProgram> {
        let mut out = Vec::new();
        fn walk<'a>(p: &'a HybridProgram, out: &mut Vec<&'a HybridProgram>) {
            match p {
                HybridProgram::Seq(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Variables read anywhere in the program.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            HybridProgram::Assign(_, t) => t.collect_vars(out),
            HybridProgram::NondetAssign(_) => {}
            HybridProgram::Test(f) => f.collect_vars(out),
            HybridProgram::Seq(a, b) | HybridProgram::Choice(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            HybridProgram::Loop(a) => a.collect_free(out),
            HybridProgram::Ode(ode) => {
                for (x, t) in ode.equations() {
                    // an evolving variable's initial value is read
                    out.insert(x.clone());
                    t.collect_vars(out);
                }
                ode.domain().collect_vars(out);
            }
        }
    }

    /// Targets of assignments and ODE-evolved variables.
    pub fn bound_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_bound(&mut out);
        out
    }

    fn collect_bound(&self, out: &mut BTreeSet<String>) {
        match self {
            HybridProgram::Assign(x, _) | HybridProgram::NondetAssign(x) => {
                out.insert(x.clone());
            }
            HybridProgram::Test(_) => {}
            HybridProgram::Seq(a, b) | HybridProgram::Choice(a, b) => {
                a.collect_bound(out);
                b.collect_bound(out);
            }
            HybridProgram::Loop(a) => a.collect_bound(out),
            HybridProgram::Ode(ode) => out.extend(ode.evolved().map(str::to_string)),
        }
    }

    /// Variables assigned on every terminating path.
    pub fn must_bound_vars(&self) -> BTreeSet<String> {
        match self {
            HybridProgram::Assign(x, _) | HybridProgram::NondetAssign(x) => BTreeSet::from([x.clone()]),
            HybridProgram::Test(_) | HybridProgram::Loop(_) => BTreeSet::new(),
            HybridProgram::Seq(a, b) => {
                let mut s = a.must_bound_vars();
                s.extend(b.must_bound_vars());
                s
            }
            HybridProgram::Choice(a, b) => a
                .must_bound_vars()
                .intersection(&b.must_bound_vars())
                .cloned()
                .collect(),
            HybridProgram::Ode(ode) => ode.evolved().map(str::to_string).collect(),
        }
    }

    pub fn uses_extension_functions(&self) -> bool {
        match self {
            HybridProgram::Assign(_, t) => t.uses_extension_functions(),
            HybridProgram::NondetAssign(_) => false,
            HybridProgram::Test(f) => f.uses_extension_functions(),
            HybridProgram::Seq(a, b) | HybridProgram::Choice(a, b) => {
                a.uses_extension_functions() || b.uses_extension_functions()
            }
            HybridProgram::Loop(a) => a.uses_extension_functions(),
            HybridProgram::Ode(ode) => {
                ode.equations().iter().any(|(_, t)| t.uses_extension_functions())
                    || ode.domain().uses_extension_functions()
            }
        }
    }

    pub fn validate(&self) -> Result<(), AstError> {
        match self {
            HybridProgram::Assign(x, t) => {
                check_identifier(x)?;
                t.validate()
            }
            HybridProgram::NondetAssign(x) => check_identifier(x),
            HybridProgram::Test(f) => f.validate(),
            HybridProgram::Seq(a, b) | HybridProgram::Choice(a, b) => {
                a.validate()?;
                b.validate()
            }
            HybridProgram::Loop(a) => a.validate(),
            HybridProgram::Ode(ode) => {
                for (_, t) in ode.equations() {
                    t.validate()?;
                }
                ode.domain().validate()
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_term(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_formula(self))
    }
}

impl fmt::Display for HybridProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_hp(self))
    }
}
