use std::collections::HashSet;

use super::ast::{Currency, Literal, MatchArm, Span, SurfaceType, Term, TermKind};
use super::lexer::{tokenize, Tok, Token};
use super::{line_col, SyntaxError};

/// A top-level item of a program file or REPL line.
#[derive(Debug, Clone, PartialEq)]
pub enum TopItem {
    /// `let [rec] x = t` without a trailing `in`.
    Decl {
        recursive: bool,
        name: String,
        bound: Term,
        span: Span,
    },
    Expr(Term),
}

pub fn parse_term(src: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(src)?;
    let t = p.expr()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_type(src: &str) -> Result<SurfaceType, SyntaxError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parses a sequence of declarations, optionally followed by expressions.
pub fn parse_program(src: &str) -> Result<Vec<TopItem>, SyntaxError> {
    let mut p = Parser::new(src)?;
    let mut items = Vec::new();
    while p.peek() != &Tok::Eof {
        if p.peek() == &Tok::Let {
            let start = p.span().start;
            let header = p.let_header()?;
            if p.peek() == &Tok::In {
                p.bump();
                let body = p.expr()?;
                items.push(TopItem::Expr(header.finish(body, start)));
            } else {
                let span = Span::new(start, header.bound.span.end);
                items.push(TopItem::Decl {
                    recursive: header.recursive,
                    name: header.name,
                    bound: header.bound,
                    span,
                });
            }
        } else {
            items.push(TopItem::Expr(p.expr()?));
        }
    }
    Ok(items)
}

struct LetHeader {
    recursive: bool,
    name: String,
    bound: Term,
}

impl LetHeader {
    fn finish(self, body: Term, start: usize) -> Term {
        let span = Span::new(start, body.span.end);
        Term::new(
            TermKind::Let {
                recursive: self.recursive,
                name: self.name,
                bound: Box::new(self.bound),
                body: Box::new(body),
            },
            span,
        )
    }
}

struct Param {
    name: String,
    ty: Option<SurfaceType>,
    start: usize,
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, SyntaxError> {
        Ok(Parser {
            src,
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let tok = &self.toks[self.pos];
        let (line, col) = line_col(self.src, tok.span.start);
        let expected: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        SyntaxError {
            line,
            col,
            offset: tok.span.start,
            message: format!(
                "expected {}, found {}",
                expected.join(" or "),
                tok.tok.describe()
            ),
            expected,
        }
    }

    fn error_at(&self, span: Span, message: String) -> SyntaxError {
        let (line, col) = line_col(self.src, span.start);
        SyntaxError {
            line,
            col,
            offset: span.start,
            message,
            expected: Vec::new(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, SyntaxError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.error(&[&format!("`{}`", tok.symbol())]))
        }
    }

    fn expect_eof(&self) -> Result<(), SyntaxError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    fn ident(&mut self) -> Result<(String, Span), SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().span)),
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn label(&mut self) -> Result<(String, Span), SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Upper(s) => Ok((s, self.bump().span)),
            _ => Err(self.error(&["label"])),
        }
    }

    // ---- terms ----

    fn expr(&mut self) -> Result<Term, SyntaxError> {
        match self.peek() {
            Tok::Let => {
                let start = self.span().start;
                let header = self.let_header()?;
                self.expect(Tok::In)?;
                let body = self.expr()?;
                Ok(header.finish(body, start))
            }
            Tok::Fun => {
                let start = self.bump().span.start;
                let mut params = vec![self.param()?];
                while self.peek() != &Tok::Arrow {
                    params.push(self.param()?);
                }
                self.bump();
                let body = self.expr()?;
                Ok(wrap_lambdas(params, body, start))
            }
            Tok::Match => self.match_expr(),
            _ => {
                let t = self.op_expr(0)?;
                if self.peek() == &Tok::Colon {
                    self.bump();
                    let ty = self.ty()?;
                    let span = Span::new(t.span.start, self.prev_end());
                    Ok(Term::new(TermKind::Annot(Box::new(t), ty), span))
                } else {
                    Ok(t)
                }
            }
        }
    }

    fn let_header(&mut self) -> Result<LetHeader, SyntaxError> {
        self.expect(Tok::Let)?;
        let recursive = if self.peek() == &Tok::Rec {
            self.bump();
            true
        } else {
            false
        };
        let (name, _) = self.ident()?;
        let mut params = Vec::new();
        while self.peek() != &Tok::Eq {
            if !matches!(self.peek(), Tok::Ident(_) | Tok::LParen) {
                return Err(self.error(&["parameter", "`=`"]));
            }
            params.push(self.param()?);
        }
        self.bump();
        let body = self.expr()?;
        let start = params.first().map_or(body.span.start, |p| p.start);
        let bound = wrap_lambdas(params, body, start);
        Ok(LetHeader {
            recursive,
            name,
            bound,
        })
    }

    fn param(&mut self) -> Result<Param, SyntaxError> {
        let start = self.span().start;
        match self.peek() {
            Tok::Ident(_) => {
                let (name, _) = self.ident()?;
                Ok(Param {
                    name,
                    ty: None,
                    start,
                })
            }
            Tok::Underscore => {
                self.bump();
                Ok(Param {
                    name: "_".into(),
                    ty: None,
                    start,
                })
            }
            Tok::LParen => {
                self.bump();
                let (name, _) = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(Param {
                    name,
                    ty: Some(ty),
                    start,
                })
            }
            _ => Err(self.error(&["parameter"])),
        }
    }

    fn match_expr(&mut self) -> Result<Term, SyntaxError> {
        let start = self.expect(Tok::Match)?.span.start;
        let scrutinee = self.expr()?;
        self.expect(Tok::With)?;
        if self.peek() == &Tok::Bar {
            self.bump();
        }
        let mut arms = Vec::new();
        let mut seen = HashSet::new();
        loop {
            let arm_start = self.span();
            if arms.iter().any(|a: &MatchArm| a.label.is_none()) {
                return Err(self.error_at(arm_start, "wildcard arm must be the last arm".into()));
            }
            let label = match self.peek().clone() {
                Tok::Underscore => {
                    self.bump();
                    None
                }
                Tok::Upper(l) => {
                    self.bump();
                    Some(l)
                }
                _ => return Err(self.error(&["variant label", "`_`"])),
            };
            if let Some(l) = &label {
                if !seen.insert(l.clone()) {
                    return Err(self.error_at(arm_start, format!("duplicate match arm `{l}`")));
                }
            }
            let binder = match self.peek().clone() {
                Tok::Ident(x) if label.is_some() => {
                    self.bump();
                    Some(x)
                }
                Tok::Underscore if label.is_some() => {
                    self.bump();
                    None
                }
                _ => None,
            };
            if !matches!(self.peek(), Tok::Arrow | Tok::FatArrow) {
                return Err(self.error(&["`->`", "`=>`"]));
            }
            self.bump();
            let body = self.expr()?;
            let span = arm_start.to(body.span);
            arms.push(MatchArm {
                label,
                binder,
                body,
                span,
            });
            if self.peek() == &Tok::Bar {
                self.bump();
            } else {
                break;
            }
        }
        let end = arms.last().map_or(start, |a| a.span.end);
        Ok(Term::new(
            TermKind::Match(Box::new(scrutinee), arms),
            Span::new(start, end),
        ))
    }

    fn binop(tok: &Tok) -> Option<(u8, &'static str, bool)> {
        // (precedence, name, right associative)
        Some(match tok {
            Tok::EqEq => (0, "==", false),
            Tok::Lt => (0, "<", false),
            Tok::Le => (0, "<=", false),
            Tok::Gt => (0, ">", false),
            Tok::Ge => (0, ">=", false),
            Tok::Plus => (1, "+", false),
            Tok::Minus => (1, "-", false),
            Tok::Star => (2, "*", false),
            Tok::Slash => (2, "/", false),
            Tok::StarStar => (3, "**", true),
            _ => return None,
        })
    }

    fn op_expr(&mut self, min_prec: u8) -> Result<Term, SyntaxError> {
        let mut lhs = self.unary()?;
        while let Some((prec, name, right)) = Self::binop(self.peek()) {
            if prec < min_prec {
                break;
            }
            let op_span = self.bump().span;
            let rhs = if right {
                self.op_expr(prec)?
            } else {
                self.op_expr(prec + 1)?
            };
            let op = Term::new(TermKind::Var(name.into()), op_span);
            let partial_span = lhs.span.to(op_span);
            let partial = Term::new(TermKind::App(Box::new(op), Box::new(lhs)), partial_span);
            let span = partial.span.to(rhs.span);
            lhs = Term::new(TermKind::App(Box::new(partial), Box::new(rhs)), span);
            if prec == 0 && Self::binop(self.peek()).is_some_and(|(p, _, _)| p == 0) {
                return Err(self.error(&["expression without chained comparison"]));
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Term, SyntaxError> {
        if self.peek() == &Tok::Minus {
            let start = self.bump().span;
            let tok = self.peek().clone();
            let span = start.to(self.span());
            return match tok {
                Tok::Int(n) => {
                    self.bump();
                    Ok(Term::new(TermKind::Lit(Literal::Int(-n)), span))
                }
                Tok::Double(d) => {
                    self.bump();
                    Ok(Term::new(TermKind::Lit(Literal::Double(-d)), span))
                }
                _ => Err(self.error(&["numeric literal"])),
            };
        }
        self.app_expr()
    }

    /// Tokens at column one begin a new top-level item.
    fn at_line_start(&self) -> bool {
        let start = self.span().start;
        start == 0 || self.src.as_bytes()[start - 1] == b'\n'
    }

    fn starts_atom(&self) -> bool {
        !self.at_line_start()
            && matches!(
            self.peek(),
            Tok::Ident(_)
                | Tok::Upper(_)
                | Tok::Int(_)
                | Tok::Double(_)
                | Tok::Str(_)
                | Tok::Date(_)
                | Tok::LParen
                | Tok::LBrace
        )
    }

    fn app_expr(&mut self) -> Result<Term, SyntaxError> {
        let mut head = match self.peek().clone() {
            Tok::Upper(l) if Currency::parse(&l).is_none() => {
                let lspan = self.bump().span;
                let payload = if self.starts_atom() {
                    self.postfix()?
                } else {
                    Term::unit(Span::new(lspan.end, lspan.end))
                };
                let span = lspan.to(payload.span);
                Term::new(TermKind::Variant(l, Box::new(payload)), span)
            }
            _ => self.postfix()?,
        };
        while self.starts_atom() {
            let arg = self.postfix()?;
            let span = head.span.to(arg.span);
            head = Term::new(TermKind::App(Box::new(head), Box::new(arg)), span);
        }
        Ok(head)
    }

    fn postfix(&mut self) -> Result<Term, SyntaxError> {
        let mut t = self.atom()?;
        while self.peek() == &Tok::Dot {
            self.bump();
            let (label, lspan) = self.label()?;
            let span = t.span.to(lspan);
            t = Term::new(TermKind::Project(Box::new(t), label), span);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, SyntaxError> {
        let tok = self.peek().clone();
        let span = self.span();
        let kind = match tok {
            Tok::Ident(x) => {
                self.bump();
                TermKind::Var(x)
            }
            Tok::Upper(l) => {
                self.bump();
                match Currency::parse(&l) {
                    Some(c) => TermKind::Lit(Literal::Currency(c)),
                    None => TermKind::Variant(l, Box::new(Term::unit(Span::new(span.end, span.end)))),
                }
            }
            Tok::Int(n) => {
                self.bump();
                TermKind::Lit(Literal::Int(n))
            }
            Tok::Double(d) => {
                self.bump();
                TermKind::Lit(Literal::Double(d))
            }
            Tok::Str(s) => {
                self.bump();
                TermKind::Lit(Literal::Str(s))
            }
            Tok::Date(d) => {
                self.bump();
                TermKind::Lit(Literal::Date(d))
            }
            Tok::LParen => {
                self.bump();
                if self.peek() == &Tok::RParen {
                    let end = self.bump().span;
                    return Ok(Term::unit(span.to(end)));
                }
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(inner);
            }
            Tok::LBrace => return self.record(),
            _ => return Err(self.error(&["expression"])),
        };
        Ok(Term::new(kind, span))
    }

    fn record(&mut self) -> Result<Term, SyntaxError> {
        let start = self.expect(Tok::LBrace)?.span;
        let mut fields: Vec<(String, Term)> = Vec::new();
        while self.peek() != &Tok::RBrace {
            let (label, lspan) = self.label()?;
            if fields.iter().any(|(l, _)| *l == label) {
                return Err(self.error_at(lspan, format!("duplicate record label `{label}`")));
            }
            self.expect(Tok::Eq)?;
            let t = self.expr()?;
            fields.push((label, t));
            if self.peek() == &Tok::Comma {
                self.bump();
            } else if self.peek() != &Tok::RBrace {
                return Err(self.error(&["`,`", "`}`"]));
            }
        }
        let end = self.bump().span;
        Ok(Term::new(TermKind::Record(fields), start.to(end)))
    }

    // ---- types ----

    fn at_row_field(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::Upper(_)) && self.peek2() == &Tok::Colon
    }

    fn ty(&mut self) -> Result<SurfaceType, SyntaxError> {
        if self.peek() == &Tok::Mu {
            self.bump();
            let (name, _) = self.ident()?;
            self.expect(Tok::Dot)?;
            let body = self.ty()?;
            return Ok(SurfaceType::Mu(name, Box::new(body)));
        }
        if self.at_row_field() {
            return self.bare_row();
        }
        let lhs = self.app_ty()?;
        if self.peek() == &Tok::Arrow {
            self.bump();
            let rhs = self.ty()?;
            return Ok(SurfaceType::arrow(lhs, rhs));
        }
        Ok(lhs)
    }

    /// `l : t; tail` with an explicit tail.
    fn bare_row(&mut self) -> Result<SurfaceType, SyntaxError> {
        let (label, _) = self.label()?;
        self.expect(Tok::Colon)?;
        let ty = self.ty_no_row()?;
        let tail = if self.peek() == &Tok::Semi {
            self.bump();
            self.ty()?
        } else {
            SurfaceType::EmptyRow
        };
        Ok(SurfaceType::RowField {
            label,
            ty: Box::new(ty),
            tail: Box::new(tail),
        })
    }

    /// A type in field position: everything except a bare row.
    fn ty_no_row(&mut self) -> Result<SurfaceType, SyntaxError> {
        if self.peek() == &Tok::Mu {
            return self.ty();
        }
        let lhs = self.app_ty()?;
        if self.peek() == &Tok::Arrow {
            self.bump();
            let rhs = self.ty_no_row()?;
            return Ok(SurfaceType::arrow(lhs, rhs));
        }
        Ok(lhs)
    }

    fn starts_atom_ty(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::Upper(_) | Tok::Question | Tok::LParen | Tok::LBrace | Tok::LBracket
        )
    }

    fn app_ty(&mut self) -> Result<SurfaceType, SyntaxError> {
        if let Tok::Upper(name) = self.peek().clone() {
            if name != "Dyn" {
                self.bump();
                let mut args = Vec::new();
                while self.starts_atom_ty() && !self.at_row_field() {
                    args.push(self.atom_ty()?);
                }
                return Ok(normalize_con(name, args));
            }
        }
        self.atom_ty()
    }

    fn atom_ty(&mut self) -> Result<SurfaceType, SyntaxError> {
        match self.peek().clone() {
            Tok::Question => {
                self.bump();
                Ok(SurfaceType::Dyn)
            }
            Tok::Ident(x) => {
                self.bump();
                Ok(if x == "eps" {
                    SurfaceType::EmptyRow
                } else {
                    SurfaceType::Var(x)
                })
            }
            Tok::Upper(name) => {
                self.bump();
                Ok(if name == "Dyn" {
                    SurfaceType::Dyn
                } else {
                    normalize_con(name, Vec::new())
                })
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::LBrace => {
                self.bump();
                let row = self.braced_row(Tok::RBrace, false)?;
                Ok(SurfaceType::Record(Box::new(row)))
            }
            Tok::LBracket => {
                self.bump();
                let row = self.braced_row(Tok::RBracket, true)?;
                Ok(SurfaceType::Variant(Box::new(row)))
            }
            _ => Err(self.error(&["type"])),
        }
    }

    /// Fields separated by `;`, an optional `| tail`, then `close`.
    fn braced_row(&mut self, close: Tok, unit_payloads: bool) -> Result<SurfaceType, SyntaxError> {
        let mut fields: Vec<(String, SurfaceType)> = Vec::new();
        let mut tail = SurfaceType::EmptyRow;
        loop {
            if *self.peek() == close {
                break;
            }
            if self.peek() == &Tok::Bar {
                self.bump();
                tail = self.ty()?;
                break;
            }
            let (label, lspan) = self.label()?;
            if fields.iter().any(|(l, _)| *l == label) {
                return Err(self.error_at(lspan, format!("duplicate row label `{label}`")));
            }
            let ty = if unit_payloads && self.peek() != &Tok::Colon {
                SurfaceType::unit()
            } else {
                self.expect(Tok::Colon)?;
                self.ty_no_row()?
            };
            fields.push((label, ty));
            if self.peek() == &Tok::Semi {
                self.bump();
            } else if *self.peek() != close && self.peek() != &Tok::Bar {
                return Err(self.error(&["`;`", "`|`", &format!("`{}`", close.symbol())]));
            }
        }
        self.expect(close)?;
        Ok(SurfaceType::row(fields, tail))
    }
}

fn normalize_con(name: String, mut args: Vec<SurfaceType>) -> SurfaceType {
    match (name.as_str(), args.len()) {
        ("Pi", 1) => SurfaceType::Record(Box::new(args.pop().unwrap())),
        ("Sigma", 1) => SurfaceType::Variant(Box::new(args.pop().unwrap())),
        _ => SurfaceType::Con(name, args),
    }
}

fn wrap_lambdas(params: Vec<Param>, body: Term, _start: usize) -> Term {
    params.into_iter().rev().fold(body, |body, p| {
        let span = Span::new(p.start, body.span.end);
        Term::new(
            TermKind::Lambda {
                param: p.name,
                param_ty: p.ty,
                body: Box::new(body),
            },
            span,
        )
    })
}
