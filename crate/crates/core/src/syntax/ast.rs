//! Abstract syntax for terms and surface type expressions.

use std::fmt;

use chrono::NaiveDate;

/// Byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }

    pub fn contains(self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// 1-based line and column of the span start.
    pub fn line_col(self, source: &str) -> (usize, usize) {
        line_col(source, self.start)
    }
}

pub fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for (i, ch) in source.char_indices() {
        if i >= offset {
            break;
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

/// ISO 4217-style currency code.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Currency(pub String);

impl Currency {
    pub const KNOWN: &'static [&'static str] = &["USD", "EUR", "GBP", "JPY", "CHF", "CAD", "AUD"];

    pub fn parse(code: &str) -> Option<Currency> {
        Self::KNOWN
            .contains(&code)
            .then(|| Currency(code.to_string()))
    }
}

impl fmt::Display for Currency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(i64),
    Double(f64),
    Str(String),
    Date(NaiveDate),
    Currency(Currency),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchArm {
    /// `None` is the wildcard arm `_`.
    pub label: Option<String>,
    pub binder: Option<String>,
    pub body: Term,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TermKind {
    Var(String),
    Lambda {
        param: String,
        param_ty: Option<SurfaceType>,
        body: Box<Term>,
    },
    App(Box<Term>, Box<Term>),
    Let {
        recursive: bool,
        name: String,
        bound: Box<Term>,
        body: Box<Term>,
    },
    Annot(Box<Term>, SurfaceType),
    Record(Vec<(String, Term)>),
    Project(Box<Term>, String),
    Variant(String, Box<Term>),
    Match(Box<Term>, Vec<MatchArm>),
    Lit(Literal),
}

impl Term {
    pub fn new(kind: TermKind, span: Span) -> Self {
        Term { kind, span }
    }

    /// The unit value `{}`.
    pub fn unit(span: Span) -> Self {
        Term::new(TermKind::Record(Vec::new()), span)
    }

    /// A copy with every span reset, for structural comparison.
    pub fn without_spans(&self) -> Term {
        let kind = match &self.kind {
            TermKind::Var(x) => TermKind::Var(x.clone()),
            TermKind::Lambda {
                param,
                param_ty,
                body,
            } => TermKind::Lambda {
                param: param.clone(),
                param_ty: param_ty.clone(),
                body: Box::new(body.without_spans()),
            },
            TermKind::App(f, a) => {
                TermKind::App(Box::new(f.without_spans()), Box::new(a.without_spans()))
            }
            TermKind::Let {
                recursive,
                name,
                bound,
                body,
            } => TermKind::Let {
                recursive: *recursive,
                name: name.clone(),
                bound: Box::new(bound.without_spans()),
                body: Box::new(body.without_spans()),
            },
            TermKind::Annot(t, ty) => TermKind::Annot(Box::new(t.without_spans()), ty.clone()),
            TermKind::Record(fields) => TermKind::Record(
                fields
                    .iter()
                    .map(|(l, t)| (l.clone(), t.without_spans()))
                    .collect(),
            ),
            TermKind::Project(t, l) => TermKind::Project(Box::new(t.without_spans()), l.clone()),
            TermKind::Variant(l, t) => TermKind::Variant(l.clone(), Box::new(t.without_spans())),
            TermKind::Match(t, arms) => TermKind::Match(
                Box::new(t.without_spans()),
                arms.iter()
                    .map(|arm| MatchArm {
                        label: arm.label.clone(),
                        binder: arm.binder.clone(),
                        body: arm.body.without_spans(),
                        span: Span::default(),
                    })
                    .collect(),
            ),
            TermKind::Lit(l) => TermKind::Lit(l.clone()),
        };
        Term::new(kind, Span::default())
    }

    /// Syntactic values, the only bindings that get generalized.
    pub fn is_value(&self) -> bool {
        match &self.kind {
            TermKind::Lambda { .. } | TermKind::Lit(_) | TermKind::Var(_) => true,
            TermKind::Record(fields) => fields.iter().all(|(_, t)| t.is_value()),
            TermKind::Variant(_, t) | TermKind::Annot(t, _) => t.is_value(),
            _ => false,
        }
    }

    /// Pre-order walk over every subterm, including `self`.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        match &self.kind {
            TermKind::Var(_) | TermKind::Lit(_) => {}
            TermKind::Lambda { body, .. } => body.walk(f),
            TermKind::App(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            TermKind::Let { bound, body, .. } => {
                bound.walk(f);
                body.walk(f);
            }
            TermKind::Annot(t, _) | TermKind::Project(t, _) | TermKind::Variant(_, t) => t.walk(f),
            TermKind::Record(fields) => fields.iter().for_each(|(_, t)| t.walk(f)),
            TermKind::Match(t, arms) => {
                t.walk(f);
                arms.iter().for_each(|arm| arm.body.walk(f));
            }
        }
    }
}

/// A type expression as written in annotations.
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceType {
    Var(String),
    /// Named constructor applied to arguments, e.g. `Obs Double` or `Pi r`.
    Con(String, Vec<SurfaceType>),
    Arrow(Box<SurfaceType>, Box<SurfaceType>),
    /// `{ l : t; ... }`, a record of a row.
    Record(Box<SurfaceType>),
    /// `[ L : t; ... ]`, a variant of a row.
    Variant(Box<SurfaceType>),
    RowField {
        label: String,
        ty: Box<SurfaceType>,
        tail: Box<SurfaceType>,
    },
    EmptyRow,
    Mu(String, Box<SurfaceType>),
    Dyn,
}

impl SurfaceType {
    pub fn con(name: &str) -> Self {
        SurfaceType::Con(name.to_string(), Vec::new())
    }

    pub fn arrow(dom: SurfaceType, cod: SurfaceType) -> Self {
        SurfaceType::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn field(label: &str, ty: SurfaceType, tail: SurfaceType) -> Self {
        SurfaceType::RowField {
            label: label.to_string(),
            ty: Box::new(ty),
            tail: Box::new(tail),
        }
    }

    /// Builds a row from fields and a tail.
    pub fn row(fields: Vec<(String, SurfaceType)>, tail: SurfaceType) -> Self {
        fields
            .into_iter()
            .rev()
            .fold(tail, |tail, (label, ty)| SurfaceType::RowField {
                label,
                ty: Box::new(ty),
                tail: Box::new(tail),
            })
    }

    pub fn record(fields: Vec<(String, SurfaceType)>) -> Self {
        SurfaceType::Record(Box::new(Self::row(fields, SurfaceType::EmptyRow)))
    }

    pub fn variant(fields: Vec<(String, SurfaceType)>) -> Self {
        SurfaceType::Variant(Box::new(Self::row(fields, SurfaceType::EmptyRow)))
    }

    pub fn unit() -> Self {
        SurfaceType::Record(Box::new(SurfaceType::EmptyRow))
    }

    /// Splits a row into its fields and its final tail.
    pub fn row_parts(&self) -> (Vec<(&str, &SurfaceType)>, &SurfaceType) {
        let mut fields = Vec::new();
        let mut cur = self;
        while let SurfaceType::RowField { label, ty, tail } = cur {
            fields.push((label.as_str(), &**ty));
            cur = tail;
        }
        (fields, cur)
    }

    pub fn has_dyn(&self) -> bool {
        match self {
            SurfaceType::Dyn => true,
            SurfaceType::Var(_) | SurfaceType::EmptyRow => false,
            SurfaceType::Con(_, args) => args.iter().any(Self::has_dyn),
            SurfaceType::Arrow(a, b) => a.has_dyn() || b.has_dyn(),
            SurfaceType::Record(r) | SurfaceType::Variant(r) | SurfaceType::Mu(_, r) => r.has_dyn(),
            SurfaceType::RowField { ty, tail, .. } => ty.has_dyn() || tail.has_dyn(),
        }
    }

    /// Capture-naive substitution of `name` by `with`.
    pub fn subst(&self, name: &str, with: &SurfaceType) -> SurfaceType {
        match self {
            SurfaceType::Var(v) if v == name => with.clone(),
            SurfaceType::Var(_) | SurfaceType::EmptyRow | SurfaceType::Dyn => self.clone(),
            SurfaceType::Con(c, args) => {
                SurfaceType::Con(c.clone(), args.iter().map(|a| a.subst(name, with)).collect())
            }
            SurfaceType::Arrow(a, b) => {
                SurfaceType::arrow(a.subst(name, with), b.subst(name, with))
            }
            SurfaceType::Record(r) => SurfaceType::Record(Box::new(r.subst(name, with))),
            SurfaceType::Variant(r) => SurfaceType::Variant(Box::new(r.subst(name, with))),
            SurfaceType::RowField { label, ty, tail } => SurfaceType::RowField {
                label: label.clone(),
                ty: Box::new(ty.subst(name, with)),
                tail: Box::new(tail.subst(name, with)),
            },
            SurfaceType::Mu(v, _) if v == name => self.clone(),
            SurfaceType::Mu(v, body) => SurfaceType::Mu(v.clone(), Box::new(body.subst(name, with))),
        }
    }

    /// One step of equi-recursive unrolling; non-μ types are returned as is.
    pub fn unroll(&self) -> SurfaceType {
        let mut cur = self.clone();
        while let SurfaceType::Mu(v, body) = &cur {
            cur = body.subst(v, &cur);
        }
        cur
    }
}
