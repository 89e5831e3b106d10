use std::cell::OnceCell;
use std::rc::Rc;

use super::builtins;
use super::cast::Cast;
use super::value::{Closure, PrimApp, Value};
use super::{Blame, PriceTable, RuntimeError, RuntimeTypeError, SourceUnit};
use crate::infer::{Obligations, SiteKind};
use crate::syntax::{Literal, Span, Term, TermKind};

/// A term with its runtime checks attached.
#[derive(Debug)]
pub enum Expr {
    Var(String),
    Lit(Value),
    Lambda {
        param: String,
        body: Rc<Expr>,
    },
    App {
        f: Box<Expr>,
        arg: Box<Expr>,
        fn_cast: Option<Cast>,
        arg_cast: Option<Cast>,
        arg_blame: Blame,
    },
    Let {
        recursive: bool,
        name: String,
        bound: Box<Expr>,
        body: Box<Expr>,
    },
    Cast(Box<Expr>, Cast),
    Record(Vec<(String, Expr)>),
    Project {
        inner: Box<Expr>,
        label: String,
        cast: Option<Cast>,
        blame: Blame,
    },
    Variant(String, Box<Expr>),
    Match {
        scrutinee: Box<Expr>,
        cast: Option<Cast>,
        arms: Vec<Arm>,
        blame: Blame,
    },
}

#[derive(Debug)]
pub struct Arm {
    /// `None` for the wildcard.
    pub label: Option<String>,
    pub binder: Option<String>,
    pub body: Expr,
    pub cast: Option<Cast>,
}

/// Attaches each obligation to the term position it checks.
pub fn compile(term: &Term, obligations: &Obligations, unit: &Rc<SourceUnit>) -> Expr {
    Compiler { obligations, unit }.term(term)
}

struct Compiler<'a> {
    obligations: &'a Obligations,
    unit: &'a Rc<SourceUnit>,
}

impl Compiler<'_> {
    fn blame(&self, span: Span) -> Blame {
        Blame {
            unit: self.unit.clone(),
            span,
        }
    }

    fn cast(&self, kind: SiteKind, span: Span) -> Option<Cast> {
        self.obligations
            .get(kind, span)
            .map(|o| Cast::new(o.from.clone(), o.to.clone(), self.blame(o.blame), Some(kind)))
    }

    fn term(&self, t: &Term) -> Expr {
        match &t.kind {
            TermKind::Var(x) => Expr::Var(x.clone()),
            TermKind::Lit(lit) => Expr::Lit(literal(lit)),
            TermKind::Lambda { param, body, .. } => Expr::Lambda {
                param: param.clone(),
                body: Rc::new(self.term(body)),
            },
            TermKind::App(f, a) => Expr::App {
                f: Box::new(self.term(f)),
                arg: Box::new(self.term(a)),
                fn_cast: self.cast(SiteKind::AppFn, t.span),
                arg_cast: self.cast(SiteKind::AppArg, t.span),
                arg_blame: self.blame(a.span),
            },
            TermKind::Let { recursive, name, bound, body } => Expr::Let {
                recursive: *recursive,
                name: name.clone(),
                bound: Box::new(self.term(bound)),
                body: Box::new(self.term(body)),
            },
            TermKind::Annot(inner, _) => {
                let inner = self.term(inner);
                match self.cast(SiteKind::Annot, t.span) {
                    Some(c) => Expr::Cast(Box::new(inner), c),
                    None => inner,
                }
            }
            TermKind::Record(fields) => {
                Expr::Record(fields.iter().map(|(l, ft)| (l.clone(), self.term(ft))).collect())
            }
            TermKind::Project(inner, label) => Expr::Project {
                inner: Box::new(self.term(inner)),
                label: label.clone(),
                cast: self.cast(SiteKind::Project, t.span),
                blame: self.blame(inner.span),
            },
            TermKind::Variant(label, payload) => Expr::Variant(label.clone(), Box::new(self.term(payload))),
            TermKind::Match(scrutinee, arms) => Expr::Match {
                scrutinee: Box::new(self.term(scrutinee)),
                cast: self.cast(SiteKind::Match, t.span),
                arms: arms
                    .iter()
                    .map(|a| Arm {
                        label: a.label.clone(),
                        binder: a.binder.clone(),
                        body: self.term(&a.body),
                        cast: self.cast(SiteKind::ArmResult, a.body.span),
                    })
                    .collect(),
                blame: self.blame(scrutinee.span),
            },
        }
    }
}

fn literal(lit: &Literal) -> Value {
    match lit {
        Literal::Int(n) => Value::Int(*n),
        Literal::Double(x) => Value::Double(*x),
        Literal::Str(s) => Value::str(s),
        Literal::Date(d) => Value::Date(*d),
        Literal::Currency(c) => Value::Currency(c.clone()),
    }
}

/// Variable bindings, innermost first. `let rec` slots are filled after
/// their body is built.
#[derive(Clone, Default)]
pub struct Env(Option<Rc<Frame>>);

struct Frame {
    name: String,
    value: OnceCell<Value>,
    next: Env,
}

impl Env {
    pub fn new() -> Self {
        Env(None)
    }

    pub fn bind(&self, name: &str, value: Value) -> Env {
        let cell = OnceCell::new();
        let _ = cell.set(value);
        self.push(name, cell)
    }

    fn push(&self, name: &str, value: OnceCell<Value>) -> Env {
        Env(Some(Rc::new(Frame {
            name: name.to_string(),
            value,
            next: self.clone(),
        })))
    }

    pub fn lookup(&self, name: &str) -> Result<Value, RuntimeError> {
        let mut cur = self;
        while let Some(frame) = &cur.0 {
            if frame.name == name {
                return frame
                    .value
                    .get()
                    .cloned()
                    .ok_or_else(|| RuntimeError::Uninitialized(name.to_string()));
            }
            cur = &frame.next;
        }
        Err(RuntimeError::Unbound(name.to_string()))
    }

    /// Binds `name` to the value `make` builds in the extended environment.
    pub fn bind_rec(
        &self,
        name: &str,
        make: impl FnOnce(&Env) -> Result<Value, RuntimeError>,
    ) -> Result<(Env, Value), RuntimeError> {
        let env = self.push(name, OnceCell::new());
        let value = make(&env)?;
        if let Some(frame) = &env.0 {
            let _ = frame.value.set(value.clone());
        }
        Ok((env, value))
    }
}

/// The evaluator. Holds the market data observables are sampled against.
pub struct Interp {
    pub prices: Rc<PriceTable>,
}

impl Interp {
    pub fn new(prices: PriceTable) -> Self {
        Interp {
            prices: Rc::new(prices),
        }
    }

    /// An environment holding every builtin.
    pub fn builtin_env() -> Env {
        builtins::builtin_values()
            .into_iter()
            .fold(Env::new(), |env, (name, v)| env.bind(name, v))
    }

    pub fn eval(&self, e: &Expr, env: &Env) -> Result<Value, RuntimeError> {
        match e {
            Expr::Var(x) => env.lookup(x),
            Expr::Lit(v) => Ok(v.clone()),
            Expr::Lambda { param, body } => Ok(Value::Closure(Rc::new(Closure {
                param: param.clone(),
                body: body.clone(),
                env: env.clone(),
            }))),
            Expr::App { f, arg, fn_cast, arg_cast, arg_blame } => {
                let fv = self.eval(f, env)?;
                let fv = apply_cast(fn_cast, fv)?;
                let av = self.eval(arg, env)?;
                let av = apply_cast(arg_cast, av)?;
                self.apply(fv, av, arg_blame)
            }
            Expr::Let { recursive, name, bound, body } => {
                let env = if *recursive {
                    env.bind_rec(name, |env| self.eval(bound, env))?.0
                } else {
                    env.bind(name, self.eval(bound, env)?)
                };
                self.eval(body, &env)
            }
            Expr::Cast(inner, c) => c.apply(self.eval(inner, env)?),
            Expr::Record(fields) => {
                let mut out = Vec::with_capacity(fields.len());
                for (label, fe) in fields {
                    out.push((label.clone(), self.eval(fe, env)?));
                }
                Ok(Value::Record(Rc::new(out)))
            }
            Expr::Project { inner, label, cast, blame } => {
                let v = apply_cast(cast, self.eval(inner, env)?)?;
                match v.field(label) {
                    Some(fv) => Ok(fv.clone()),
                    None => Err(mismatch(blame, format!("{{{label} : _}}"), &v)),
                }
            }
            Expr::Variant(label, payload) => Ok(Value::variant(label, self.eval(payload, env)?)),
            Expr::Match { scrutinee, cast, arms, blame } => {
                let v = apply_cast(cast, self.eval(scrutinee, env)?)?;
                let Value::Variant(label, payload) = &v else {
                    return Err(mismatch(blame, "a variant".into(), &v));
                };
                let arm = arms
                    .iter()
                    .find(|a| a.label.as_deref() == Some(&**label))
                    .or_else(|| arms.iter().find(|a| a.label.is_none()));
                let Some(arm) = arm else {
                    let labels: Vec<&str> = arms.iter().filter_map(|a| a.label.as_deref()).collect();
                    return Err(mismatch(blame, format!("one of {}", labels.join(", ")), &v));
                };
                let env = match &arm.binder {
                    Some(b) if arm.label.is_some() => env.bind(b, (**payload).clone()),
                    _ => env.clone(),
                };
                apply_cast(&arm.cast, self.eval(&arm.body, &env)?)
            }
        }
    }

    /// Applies a function value. `blame` is the argument's position at the
    /// call site.
    pub fn apply(&self, f: Value, arg: Value, blame: &Blame) -> Result<Value, RuntimeError> {
        match f {
            Value::Closure(c) => self.eval(&c.body, &c.env.bind(&c.param, arg)),
            Value::Prim(p) => {
                let mut args = p.args.clone();
                args.push(arg);
                if args.len() == p.prim.arity() {
                    builtins::run(p.prim, &args, blame, &self.prices)
                } else {
                    Ok(Value::Prim(Rc::new(PrimApp { prim: p.prim, args })))
                }
            }
            Value::Guard(g) => {
                let arg = g.dom.blaming(blame).apply(arg)?;
                let result = self.apply(g.inner.clone(), arg, blame)?;
                g.cod.apply(result)
            }
            other => Err(mismatch(blame, "a function".into(), &other)),
        }
    }
}

fn apply_cast(cast: &Option<Cast>, v: Value) -> Result<Value, RuntimeError> {
    match cast {
        Some(c) => c.apply(v),
        None => Ok(v),
    }
}

fn mismatch(blame: &Blame, expected: String, actual: &Value) -> RuntimeError {
    RuntimeTypeError {
        blame: blame.clone(),
        site: None,
        expected,
        actual: actual.tag(),
    }
    .into()
}
