use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(f64, String),
    Ident(String),
    True,
    False,
    Min,
    Max,
    Abs,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Question,
    Assign,
    Prime,
    Amp,
    Bar,
    Bang,
    Arrow,
    DArrow,
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
    Choice,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Num(_, s) => format!("number `{s}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::True => "true",
            Tok::False => "false",
            Tok::Min => "min",
            Tok::Max => "max",
            Tok::Abs => "abs",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Question => "?",
            Tok::Assign => ":=",
            Tok::Prime => "'",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Bang => "!",
            Tok::Arrow => "->",
            Tok::DArrow => "<->",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Ge => ">=",
            Tok::Gt => ">",
            Tok::Choice => "++",
            Tok::Num(..) | Tok::Ident(_) | Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span_from(&self, start: (usize, usize, usize)) -> SourceSpan {
        SourceSpan {
            start: start.0,
            end: self.pos,
            line: start.1,
            column: start.2,
        }
    }

    fn mark(&self) -> (usize, usize, usize) {
        (self.pos, self.line, self.col)
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        // whitespace and line comments
        loop {
            match cur.peek() {
                Some(c) if c.is_whitespace() => {
                    cur.bump();
                }
                Some('/') if cur.peek_at(1) == Some('/') => {
                    while let Some(c) = cur.peek() {
                        if c == '\n' {
                            break;
                        }
                        cur.bump();
                    }
                }
                _ => break,
            }
        }
        let start = cur.mark();
        let Some(c) = cur.bump() else {
            out.push(Token {
                tok: Tok::Eof,
                span: cur.span_from(start),
            });
            return Ok(out);
        };
        let tok = match c {
            '0'..='9' => lex_number(&mut cur, start)?,
            c if c.is_ascii_alphabetic() || c == '_' => {
                while matches!(cur.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    cur.bump();
                }
                match &src[start.0..cur.pos] {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "min" => Tok::Min,
                    "max" => Tok::Max,
                    "abs" => Tok::Abs,
                    s => Tok::Ident(s.to_string()),
                }
            }
            '+' => {
                if cur.peek() == Some('+') {
                    cur.bump();
                    Tok::Choice
                } else {
                    Tok::Plus
                }
            }
            '-' => {
                if cur.peek() == Some('>') {
                    cur.bump();
                    Tok::Arrow
                } else {
                    Tok::Minus
                }
            }
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '?' => Tok::Question,
            '\'' => Tok::Prime,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            ':' => {
                if cur.peek() == Some('=') {
                    cur.bump();
                    Tok::Assign
                } else {
                    return Err(ParseError::new(cur.span_from(start), "expected `:=`"));
                }
            }
            '!' => {
                if cur.peek() == Some('=') {
                    cur.bump();
                    Tok::Ne
                } else {
                    Tok::Bang
                }
            }
            '<' => match (cur.peek(), cur.peek_at(1)) {
                (Some('-'), Some('>')) => {
                    cur.bump();
                    cur.bump();
                    Tok::DArrow
                }
                (Some('='), _) => {
                    cur.bump();
                    Tok::Le
                }
                _ => Tok::Lt,
            },
            '>' => {
                if cur.peek() == Some('=') {
                    cur.bump();
                    Tok::Ge
                } else {
                    Tok::Gt
                }
            }
            '=' => {
                if cur.peek() == Some('=') {
                    cur.bump();
                }
                Tok::Eq
            }
            // accepted on input, never printed
            '≤' => Tok::Le,
            '≥' => Tok::Ge,
            '≠' => Tok::Ne,
            '∧' => Tok::Amp,
            '∨' => Tok::Bar,
            '¬' => Tok::Bang,
            '→' => Tok::Arrow,
            '↔' => Tok::DArrow,
            '∪' => Tok::Choice,
            '−' => Tok::Minus,
            '·' | '×' => Tok::Star,
            '⊤' => Tok::True,
            '⊥' => Tok::False,
            other => {
                return Err(ParseError::new(
                    cur.span_from(start),
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        out.push(Token {
            tok,
            span: cur.span_from(start),
        });
    }
}

fn lex_number(cur: &mut Cursor<'_>, mark: (usize, usize, usize)) -> Result<Tok, ParseError> {
    let start = mark.0;
    while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
        cur.bump();
    }
    if cur.peek() == Some('.') && matches!(cur.peek_at(1), Some(c) if c.is_ascii_digit()) {
        cur.bump();
        while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
            cur.bump();
        }
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let digits_at = match cur.peek_at(1) {
            Some('+' | '-') => 2,
            _ => 1,
        };
        if matches!(cur.peek_at(digits_at), Some(c) if c.is_ascii_digit()) {
            for _ in 0..digits_at {
                cur.bump();
            }
            while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                cur.bump();
            }
        }
    }
    let text = &cur.src[start..cur.pos];
    let value: f64 = text
        .parse()
        .map_err(|_| ParseError::new(cur.span_from(mark), format!("malformed number `{text}`")))?;
    if !value.is_finite() {
        return Err(ParseError::new(
            cur.span_from(mark),
            format!("number `{text}` is out of range"),
        ));
    }
    Ok(Tok::Num(value, text.to_string()))
}
