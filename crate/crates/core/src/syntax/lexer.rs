use chrono::NaiveDate;

use super::ast::Span;
use super::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Upper(String),
    Int(i64),
    Double(f64),
    Str(String),
    Date(NaiveDate),
    Let,
    Rec,
    In,
    Match,
    With,
    Fun,
    Mu,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    Bar,
    Arrow,
    FatArrow,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    StarStar,
    EqEq,
    Lt,
    Le,
    Gt,
    Ge,
    Question,
    Underscore,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Upper(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Double(d) => format!("`{d}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Date(d) => format!("`{d}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Tok::Let => "let",
            Tok::Rec => "rec",
            Tok::In => "in",
            Tok::Match => "match",
            Tok::With => "with",
            Tok::Fun => "fun",
            Tok::Mu => "mu",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Bar => "|",
            Tok::Arrow => "->",
            Tok::FatArrow => "=>",
            Tok::Eq => "=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::StarStar => "**",
            Tok::EqEq => "==",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Question => "?",
            Tok::Underscore => "_",
            _ => "",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    Lexer { src, pos: 0 }.run()
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn error(&self, at: usize, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::lexical(self.src, at, msg.into())
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('-') if self.peek_at(1) == Some('-') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some('#') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }

    fn run(mut self) -> Result<Vec<Token>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let start = self.pos;
            let Some(c) = self.bump() else {
                out.push(Token {
                    tok: Tok::Eof,
                    span: Span::new(start, start),
                });
                return Ok(out);
            };
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '.' => Tok::Dot,
                '|' => Tok::Bar,
                '?' => Tok::Question,
                '+' => Tok::Plus,
                '/' => Tok::Slash,
                'λ' => Tok::Fun,
                'μ' => Tok::Mu,
                '→' => Tok::Arrow,
                '⇒' => Tok::FatArrow,
                '-' if self.peek() == Some('>') => {
                    self.bump();
                    Tok::Arrow
                }
                '-' => Tok::Minus,
                '*' if self.peek() == Some('*') => {
                    self.bump();
                    Tok::StarStar
                }
                '*' => Tok::Star,
                '=' if self.peek() == Some('>') => {
                    self.bump();
                    Tok::FatArrow
                }
                '=' if self.peek() == Some('=') => {
                    self.bump();
                    Tok::EqEq
                }
                '=' => Tok::Eq,
                '<' if self.peek() == Some('=') => {
                    self.bump();
                    Tok::Le
                }
                '<' => Tok::Lt,
                '>' if self.peek() == Some('=') => {
                    self.bump();
                    Tok::Ge
                }
                '>' => Tok::Gt,
                // Π and Σ read as the constructor names Pi and Sigma.
                'Π' => Tok::Upper("Pi".into()),
                'Σ' => Tok::Upper("Sigma".into()),
                'ε' => Tok::Ident("eps".into()),
                '"' => self.string(start)?,
                c if c.is_ascii_digit() => self.number(start)?,
                c if c.is_alphabetic() || c == '_' => {
                    while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_' || c == '\'')
                    {
                        self.bump();
                    }
                    let word = &self.src[start..self.pos];
                    match word {
                        "let" => Tok::Let,
                        "rec" => Tok::Rec,
                        "in" => Tok::In,
                        "match" => Tok::Match,
                        "with" => Tok::With,
                        "fun" => Tok::Fun,
                        "mu" => Tok::Mu,
                        "_" => Tok::Underscore,
                        w if w.starts_with(|c: char| c.is_uppercase()) => Tok::Upper(w.to_string()),
                        w => Tok::Ident(w.to_string()),
                    }
                }
                other => return Err(self.error(start, format!("unexpected character `{other}`"))),
            };
            out.push(Token {
                tok,
                span: Span::new(start, self.pos),
            });
        }
    }

    fn string(&mut self, start: usize) -> Result<Tok, SyntaxError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(start, "unterminated string literal")),
                Some('"') => return Ok(Tok::Str(s)),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    _ => return Err(self.error(self.pos, "invalid escape sequence")),
                },
                Some(c) => s.push(c),
            }
        }
    }

    fn digits(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
    }

    fn number(&mut self, start: usize) -> Result<Tok, SyntaxError> {
        self.digits();
        // YYYY-MM-DD takes precedence over subtraction.
        if self.pos - start == 4 && self.looks_like_date() {
            let end = self.pos + 6;
            let text = &self.src[start..end];
            let date = NaiveDate::parse_from_str(text, "%Y-%m-%d")
                .map_err(|_| self.error(start, format!("invalid date `{text}`")))?;
            self.pos = end;
            return Ok(Tok::Date(date));
        }
        let mut is_double = false;
        if self.peek() == Some('.') && matches!(self.peek_at(1), Some(c) if c.is_ascii_digit()) {
            is_double = true;
            self.bump();
            self.digits();
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.bump();
            if matches!(self.peek(), Some('+' | '-')) {
                self.bump();
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                is_double = true;
                self.digits();
            } else {
                self.pos = save;
            }
        }
        let text = &self.src[start..self.pos];
        if is_double {
            text.parse()
                .map(Tok::Double)
                .map_err(|_| self.error(start, format!("invalid number `{text}`")))
        } else {
            text.parse()
                .map(Tok::Int)
                .map_err(|_| self.error(start, format!("integer literal `{text}` out of range")))
        }
    }

    fn looks_like_date(&self) -> bool {
        let rest = &self.src.as_bytes()[self.pos..];
        rest.len() >= 6
            && rest[0] == b'-'
            && rest[1].is_ascii_digit()
            && rest[2].is_ascii_digit()
            && rest[3] == b'-'
            && rest[4].is_ascii_digit()
            && rest[5].is_ascii_digit()
            && !rest.get(6).is_some_and(|b| b.is_ascii_digit())
    }
}
