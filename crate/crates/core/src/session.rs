//! A long-lived interpreter: one type store, one typing environment and one
//! value environment, extended by each chunk of source that is run.

use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::infer::{
    annotate_dynamic_by_default, dynamic_binding, infer, infer_binding, InferError, InferOptions, InferOutcome,
    Obligations, TypeEnv,
};
use crate::runtime::{builtin_types, compile, Env, Expr, Interp, PriceTable, RuntimeError, SourceUnit, Value};
use crate::stdlib::PRELUDE;
use crate::syntax::{line_col, parse_program, pretty_type, Span, SurfaceType, SyntaxError, Term, TopItem};
use crate::typegraph::{Scheme, TypeStore};

#[derive(Debug, Clone, Default)]
pub struct SessionOptions {
    /// Treat every unannotated parameter and binding as `?`.
    pub dynamic_by_default: bool,
    /// Record unification traces.
    pub trace: bool,
}

/// A position in a named source, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub unit: String,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.unit, self.line, self.col)
    }
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{unit}: {source}")]
    Syntax { unit: String, source: SyntaxError },
    #[error("{at}: {source}")]
    Type { at: Location, source: Box<InferError> },
    #[error("{0}")]
    Runtime(#[from] RuntimeError),
    #[error("prelude snippet `{name}` failed to load: {source}")]
    Prelude {
        name: String,
        source: Box<SessionError>,
    },
}

impl SessionError {
    pub fn is_static(&self) -> bool {
        matches!(self, SessionError::Type { .. })
    }

    pub fn runtime(&self) -> Option<&RuntimeError> {
        match self {
            SessionError::Runtime(e) => Some(e),
            _ => None,
        }
    }
}

/// What one top-level item produced.
#[derive(Debug, Clone)]
pub struct ItemResult {
    /// Set for declarations.
    pub name: Option<String>,
    pub ty: SurfaceType,
    /// `None` when only type checking.
    pub value: Option<Value>,
    /// Type of every subterm, by span.
    pub types: Vec<(Span, SurfaceType)>,
    pub obligations: Obligations,
    pub trace: Vec<String>,
    /// The term that was checked, after any dynamic-by-default rewriting.
    pub term: Term,
}

impl ItemResult {
    pub fn type_string(&self) -> String {
        pretty_type(&self.ty)
    }
}

impl fmt::Display for ItemResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.name, &self.value) {
            (Some(n), Some(v)) => write!(f, "{n} = {v} : {}", self.type_string()),
            (Some(n), None) => write!(f, "{n} : {}", self.type_string()),
            (None, Some(v)) => write!(f, "{v} : {}", self.type_string()),
            (None, None) => write!(f, "{}", self.type_string()),
        }
    }
}

struct Checked {
    result: ItemResult,
    expr: Expr,
    recursive: bool,
}

pub struct Session {
    pub store: TypeStore,
    pub types: TypeEnv,
    pub values: Env,
    pub interp: Interp,
    pub options: SessionOptions,
}

impl Session {
    /// A session with the builtins and the prelude loaded.
    pub fn new(prices: PriceTable, options: SessionOptions) -> Result<Session, SessionError> {
        let mut s = Session::bare(prices, options);
        s.load_prelude()?;
        Ok(s)
    }

    /// A session with the builtins only.
    pub fn bare(prices: PriceTable, options: SessionOptions) -> Session {
        let mut store = TypeStore::new();
        let mut types = TypeEnv::new();
        for (name, ty) in builtin_types() {
            let n = store.intern_closed(&ty);
            types.bind(name, Scheme::mono(n));
        }
        Session {
            store,
            types,
            values: Interp::builtin_env(),
            interp: Interp::new(prices),
            options,
        }
    }

    fn load_prelude(&mut self) -> Result<(), SessionError> {
        // The prelude is always checked statically.
        let saved = std::mem::take(&mut self.options);
        for (name, src) in PRELUDE {
            let unit = format!("<prelude:{name}>");
            if let Err(e) = self.run(&unit, src) {
                self.options = saved;
                return Err(SessionError::Prelude {
                    name: name.to_string(),
                    source: Box::new(e),
                });
            }
        }
        self.options = saved;
        Ok(())
    }

    /// Type checks and evaluates `src`. Nothing is bound unless every item
    /// type checks and evaluates.
    pub fn run(&mut self, unit: &str, src: &str) -> Result<Vec<ItemResult>, SessionError> {
        self.run_with(unit, src, &mut |_| {})
    }

    /// Like [`Session::run`], reporting each item as soon as it is done.
    pub fn run_with(
        &mut self,
        unit: &str,
        src: &str,
        on_item: &mut dyn FnMut(&ItemResult),
    ) -> Result<Vec<ItemResult>, SessionError> {
        let saved_types = self.types.clone();
        let checked = match self.check_items(unit, src) {
            Ok(c) => c,
            Err(e) => {
                self.types = saved_types;
                return Err(e);
            }
        };
        let mut env = self.values.clone();
        let mut out = Vec::with_capacity(checked.len());
        for Checked { mut result, expr, recursive } in checked {
            let value = match (&result.name, recursive) {
                (Some(name), true) => env.bind_rec(name, |env| self.interp.eval(&expr, env)).map(|(e, v)| {
                    env = e;
                    v
                }),
                (Some(name), false) => self.interp.eval(&expr, &env).inspect(|v| {
                    env = env.bind(name, v.clone());
                }),
                (None, _) => self.interp.eval(&expr, &env),
            };
            match value {
                Ok(v) => result.value = Some(v),
                Err(e) => {
                    self.types = saved_types;
                    return Err(e.into());
                }
            }
            on_item(&result);
            out.push(result);
        }
        self.values = env;
        Ok(out)
    }

    /// Type checks `src` without evaluating it. Declarations stay bound in
    /// the typing environment only.
    pub fn check(&mut self, unit: &str, src: &str) -> Result<Vec<ItemResult>, SessionError> {
        let saved_types = self.types.clone();
        match self.check_items(unit, src) {
            Ok(c) => Ok(c.into_iter().map(|c| c.result).collect()),
            Err(e) => {
                self.types = saved_types;
                Err(e)
            }
        }
    }

    /// The type of a single expression, binding nothing.
    pub fn type_of(&mut self, src: &str) -> Result<SurfaceType, SessionError> {
        let saved_types = self.types.clone();
        let r = self.check_items("<input>", src);
        self.types = saved_types;
        let items = r?;
        Ok(items.last().map_or(SurfaceType::unit(), |c| c.result.ty.clone()))
    }

    fn check_items(&mut self, unit: &str, src: &str) -> Result<Vec<Checked>, SessionError> {
        let items = parse_program(src).map_err(|source| SessionError::Syntax {
            unit: unit.to_string(),
            source,
        })?;
        let source_unit = SourceUnit::new(unit, src);
        let opts = InferOptions {
            trace: self.options.trace,
        };
        let type_error = |source: InferError| {
            let (line, col) = line_col(src, source.span().start);
            SessionError::Type {
                at: Location {
                    unit: unit.to_string(),
                    line,
                    col,
                },
                source: Box::new(source),
            }
        };
        let mut out = Vec::with_capacity(items.len());
        for item in items {
            let (name, recursive, term, outcome, ty) = match item {
                TopItem::Decl { recursive, name, bound, .. } => {
                    let bound = if self.options.dynamic_by_default {
                        dynamic_binding(&bound)
                    } else {
                        bound
                    };
                    let (scheme, outcome) =
                        infer_binding(&mut self.store, &mut self.types, recursive, &name, &bound, &opts)
                            .map_err(type_error)?;
                    self.types.bind(&name, scheme.clone());
                    let ty = self.store.resolve(scheme.body);
                    (Some(name), recursive, bound, outcome, ty)
                }
                TopItem::Expr(term) => {
                    let term = if self.options.dynamic_by_default {
                        annotate_dynamic_by_default(&term)
                    } else {
                        term
                    };
                    let outcome = infer(&mut self.store, &mut self.types, &term, &opts).map_err(type_error)?;
                    let ty = self.store.resolve(outcome.ty);
                    (None, false, term, outcome, ty)
                }
            };
            out.push(self.finish(name, recursive, term, outcome, ty, &source_unit));
        }
        Ok(out)
    }

    fn finish(
        &self,
        name: Option<String>,
        recursive: bool,
        term: Term,
        outcome: InferOutcome,
        ty: SurfaceType,
        unit: &Rc<SourceUnit>,
    ) -> Checked {
        let obligations = outcome.obligations(&self.store);
        let expr = compile(&term, &obligations, unit);
        Checked {
            result: ItemResult {
                name,
                ty,
                value: None,
                types: outcome.resolved_types(&self.store),
                obligations,
                trace: outcome.trace,
                term,
            },
            expr,
            recursive,
        }
    }

    /// Looks up a bound value.
    pub fn value(&self, name: &str) -> Option<Value> {
        self.values.lookup(name).ok()
    }

    /// The resolved type of a bound name.
    pub fn type_of_name(&self, name: &str) -> Option<SurfaceType> {
        self.types.lookup(name).map(|s| self.store.resolve(s.body))
    }

    /// Evaluates `src` and returns the value of its last item.
    pub fn eval(&mut self, src: &str) -> Result<Value, SessionError> {
        let items = self.run("<input>", src)?;
        Ok(items
            .last()
            .and_then(|r| r.value.clone())
            .unwrap_or_else(Value::unit))
    }

    /// Looks up a name bound by this session or the prelude and applies it.
    pub fn call(&self, name: &str, args: Vec<Value>) -> Result<Value, SessionError> {
        let f = self.values.lookup(name)?;
        let blame = crate::runtime::Blame {
            unit: SourceUnit::new("<call>", name),
            span: Span::new(0, name.len()),
        };
        args.into_iter()
            .try_fold(f, |f, a| self.interp.apply(f, a, &blame))
            .map_err(SessionError::from)
    }
}
