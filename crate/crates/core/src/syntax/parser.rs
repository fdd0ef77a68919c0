use super::lexer::{tokenize, Tok, Token};
use super::ParseError;
use crate::hp::{CmpOp, Formula, HybridProgram, OdeSystem, Term};

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

pub fn parse_hp(text: &str) -> Result<HybridProgram, ParseError> {
    let mut p = Parser::new(text)?;
    let hp = p.program()?;
    p.expect_eof()?;
    Ok(hp)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn advance(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::new(t.span, format!("expected {expected}, found {}", t.tok.describe()))
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    // ---- terms ----

    fn term(&mut self) -> PResult<Term> {
        let mut lhs = self.product()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = lhs + self.product()?;
            } else if self.eat(&Tok::Minus) {
                lhs = lhs - self.product()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> PResult<Term> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                lhs = lhs * self.unary()?;
            } else if self.eat(&Tok::Slash) {
                lhs = lhs / self.unary()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> PResult<Term> {
        if self.eat(&Tok::Minus) {
            Ok(-self.unary()?)
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> PResult<Term> {
        let mut base = self.term_atom()?;
        while self.eat(&Tok::Caret) {
            let exp = match self.peek().clone() {
                Tok::Num(_, text) if text.bytes().all(|b| b.is_ascii_digit()) => text.parse::<u32>().ok(),
                _ => None,
            };
            let Some(exp) = exp else {
                return Err(self.error("non-negative integer exponent"));
            };
            self.advance();
            base = base.pow(exp);
        }
        Ok(base)
    }

    fn term_atom(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Num(v, _) => {
                self.advance();
                Ok(Term::Num(v))
            }
            Tok::Ident(x) => {
                self.advance();
                Ok(Term::Var(x))
            }
            Tok::LParen => {
                self.advance();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Min | Tok::Max => {
                let is_min = *self.peek() == Tok::Min;
                self.advance();
                self.expect(Tok::LParen, "`(`")?;
                let a = self.term()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(if is_min { a.min(b) } else { a.max(b) })
            }
            Tok::Abs => {
                self.advance();
                self.expect(Tok::LParen, "`(`")?;
                let a = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(a.abs())
            }
            _ => Err(self.error("term")),
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> PResult<Formula> {
        let mut lhs = self.implication()?;
        while self.eat(&Tok::DArrow) {
            lhs = lhs.iff(self.implication()?);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            Ok(lhs.implies(self.implication()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Bar) {
            lhs = lhs.or(self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.negation()?;
        while self.eat(&Tok::Amp) {
            lhs = lhs.and(self.negation()?);
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> PResult<Formula> {
        if self.eat(&Tok::Bang) {
            Ok(self.negation()?.not())
        } else {
            self.formula_atom()
        }
    }

    fn formula_atom(&mut self) -> PResult<Formula> {
        match self.peek() {
            Tok::True => {
                self.advance();
                Ok(Formula::True)
            }
            Tok::False => {
                self.advance();
                Ok(Formula::False)
            }
            Tok::LParen => {
                // `(` opens either a term of a comparison or a nested formula
                let save = self.pos;
                match self.comparison() {
                    Ok(f) => Ok(f),
                    Err(as_term) => {
                        self.pos = save;
                        self.advance();
                        let inner = self.formula().and_then(|f| {
                            self.expect(Tok::RParen, "`)`")?;
                            Ok(f)
                        });
                        inner.map_err(|as_formula| {
                            if as_term.span.start > as_formula.span.start {
                                as_term
                            } else {
                                as_formula
                            }
                        })
                    }
                }
            }
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> PResult<Formula> {
        let lhs = self.term().map_err(|e| {
            if e.span.start == self.toks[self.pos].span.start && e.message.starts_with("expected term") {
                self.error("formula")
            } else {
                e
            }
        })?;
        let op = match self.peek() {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Ge => CmpOp::Ge,
            Tok::Gt => CmpOp::Gt,
            _ => return Err(self.error("comparison operator")),
        };
        self.advance();
        let rhs = self.term()?;
        Ok(Formula::Cmp(lhs, op, rhs))
    }

    // ---- hybrid programs ----

    fn program(&mut self) -> PResult<HybridProgram> {
        let lhs = self.sequence()?;
        if self.eat(&Tok::Choice) {
            Ok(lhs.or_else(self.program()?))
        } else {
            Ok(lhs)
        }
    }

    fn sequence(&mut self) -> PResult<HybridProgram> {
        let lhs = self.repetition()?;
        if self.eat(&Tok::Semi) {
            // tolerate a trailing `;` before a closing bracket, `++` or the end
            if matches!(self.peek(), Tok::RBrace | Tok::RParen | Tok::Choice | Tok::Eof) {
                return Ok(lhs);
            }
            Ok(lhs.then(self.sequence()?))
        } else {
            Ok(lhs)
        }
    }

    fn repetition(&mut self) -> PResult<HybridProgram> {
        let mut p = self.statement()?;
        while self.eat(&Tok::Star) {
            p = p.repeat();
        }
        Ok(p)
    }

    fn statement(&mut self) -> PResult<HybridProgram> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.advance();
                self.expect(Tok::Assign, "`:=`")?;
                if self.eat(&Tok::Star) {
                    Ok(HybridProgram::NondetAssign(x))
                } else {
                    Ok(HybridProgram::Assign(x, self.term()?))
                }
            }
            Tok::Question => {
                self.advance();
                Ok(HybridProgram::Test(self.formula()?))
            }
            Tok::LBrace => {
                let open = self.toks[self.pos].span;
                self.advance();
                if matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Prime {
                    return self.ode_rest(open);
                }
                let p = self.program()?;
                self.expect(Tok::RBrace, "`}`")?;
                Ok(p)
            }
            Tok::LParen => {
                self.advance();
                let p = self.program()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(p)
            }
            _ => Err(self.error("program")),
        }
    }

    fn ode_rest(&mut self, open: super::SourceSpan) -> PResult<HybridProgram> {
        let mut eqs = Vec::new();
        loop {
            let Tok::Ident(x) = self.peek().clone() else {
                return Err(self.error("differential equation"));
            };
            self.advance();
            self.expect(Tok::Prime, "`'`")?;
            self.expect(Tok::Eq, "`=`")?;
            eqs.push((x, self.term()?));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        let domain = if self.eat(&Tok::Amp) {
            self.formula()?
        } else {
            Formula::True
        };
        self.expect(Tok::RBrace, "`}`")?;
        OdeSystem::new(eqs, domain)
            .map(HybridProgram::Ode)
            .map_err(|e| ParseError::new(open, e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> Term {
        Term::var(x)
    }
    fn n(x: f64) -> Term {
        Term::num(x)
    }

    #[test]
    fn assignment_of_negated_variable() {
        assert_eq!(
            parse_hp("a1 := -aMinBrake").unwrap(),
            HybridProgram::assign("a1", -v("aMinBrake"))
        );
    }

    #[test]
    fn stopped_car_choice() {
        let p = parse_hp("{?v1=0; a1:=0} ++ {?!(v1=0); a1:=-4}").unwrap();
        let expect = HybridProgram::test(v("v1").eq_to(n(0.0)))
            .then(HybridProgram::assign("a1", n(0.0)))
            .or_else(
                HybridProgram::test(v("v1").eq_to(n(0.0)).not()).then(HybridProgram::assign("a1", -Term::Num(4.0))),
            );
        assert_eq!(p, expect);
    }

    #[test]
    fn truncated_assignment() {
        let err = parse_hp("x :=").unwrap_err();
        assert_eq!(err.span.start, 4);
        assert_eq!(err.span.column, 5);
        assert!(err.message.starts_with("expected term"), "{}", err.message);
    }

    #[test]
    fn term_precedence() {
        // pow > unary minus > mul/div > add/sub
        assert_eq!(parse_term("-x^2").unwrap(), -(v("x").pow(2)));
        assert_eq!(parse_term("-a*b").unwrap(), (-v("a")) * v("b"));
        assert_eq!(parse_term("a - b - c").unwrap(), (v("a") - v("b")) - v("c"));
        assert_eq!(parse_term("a + b * c").unwrap(), v("a") + v("b") * v("c"));
        assert_eq!(parse_term("max(v1, 0)").unwrap(), v("v1").max(n(0.0)));
        assert!(parse_term("x^-1").is_err());
        assert!(parse_term("x^1.5").is_err());
    }

    #[test]
    fn formula_precedence() {
        let a = || v("a").lt(n(1.0));
        let b = || v("b").lt(n(1.0));
        let c = || v("c").lt(n(1.0));
        assert_eq!(parse_formula("a<1 | b<1 & c<1").unwrap(), a().or(b().and(c())));
        assert_eq!(
            parse_formula("a<1 -> b<1 -> c<1").unwrap(),
            a().implies(b().implies(c()))
        );
        assert_eq!(parse_formula("!a<1 & b<1").unwrap(), a().not().and(b()));
        assert_eq!(parse_formula("a<1 <-> b<1 | c<1").unwrap(), a().iff(b().or(c())));
    }

    #[test]
    fn parenthesized_term_versus_formula() {
        assert_eq!(
            parse_formula("(x + 1) * 2 < 3").unwrap(),
            ((v("x") + n(1.0)) * n(2.0)).lt(n(3.0))
        );
        assert_eq!(
            parse_formula("((x < 3)) & true").unwrap(),
            v("x").lt(n(3.0)).and(Formula::True)
        );
    }

    #[test]
    fn unicode_aliases() {
        assert_eq!(
            parse_formula("−aMaxBrake ≤ a1 ∧ a1 ≤ aMaxAccel").unwrap(),
            parse_formula("-aMaxBrake <= a1 & a1 <= aMaxAccel").unwrap()
        );
    }

    #[test]
    fn ode_with_domain() {
        let p = parse_hp("{x1' = v1, v1' = a1, t' = 1 & v1 >= 0 & t <= rho}").unwrap();
        let HybridProgram::Ode(ode) = p else { panic!() };
        assert_eq!(ode.equations().len(), 3);
        assert_eq!(ode.domain(), &v("v1").ge(n(0.0)).and(v("t").le(v("rho"))));
        assert!(parse_hp("{x' = 1, x' = 2}").is_err());
    }

    #[test]
    fn seq_and_choice_associativity() {
        let a = || HybridProgram::assign("a", n(1.0));
        let b = || HybridProgram::assign("b", n(1.0));
        let c = || HybridProgram::assign("c", n(1.0));
        assert_eq!(
            parse_hp("a := 1; b := 1 ++ c := 1").unwrap(),
            a().then(b()).or_else(c())
        );
        assert_eq!(parse_hp("a := 1; b := 1; c := 1;").unwrap(), a().then(b().then(c())));
        assert_eq!(parse_hp("{a := 1; b := 1}*").unwrap(), a().then(b()).repeat());
        assert_eq!(parse_hp("x := *").unwrap(), HybridProgram::nondet("x"));
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_hp("{?x<3;x:=x+1}*;?!(x<3)").unwrap();
        let b = parse_hp("  {\n ?x < 3 ;\n x := x + 1 } *\n ; ? ! ( x < 3 ) // done").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_stay_inside_input() {
        for src in ["", "x", "x :=", "{?x<", "a1 := 2 +", "?(x < 1", "{x' = }", "x := 1 }"] {
            let err = parse_hp(src).unwrap_err();
            assert!(err.span.start <= src.len() && err.span.end <= src.len(), "{src}: {err}");
            assert!(err.span.line >= 1 && err.span.column >= 1);
        }
    }
}
