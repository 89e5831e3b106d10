//! Gradual Hindley-Milner inference.
//!
//! Constraints are solved as soon as they are generated. Annotated terms take
//! the annotation as their type even when something more precise was
//! inferred, so `incr : ? -> Int` has type `? -> Int`.

mod dynamic;
mod sites;

use std::collections::{HashMap, HashSet};

use thiserror::Error;

pub use dynamic::{annotate_dynamic_by_default, dynamic_binding};
pub use sites::{Obligation, Obligations, Site, SiteKind};

use crate::syntax::{Literal, MatchArm, Span, SurfaceType, Term, TermKind};
use crate::typegraph::{kind_check, AnnotationScope, Kind, KindError, NodeId, Payload, Resolver, Scheme, TypeStore};
use crate::unify::{self, TraceLine, UnifyError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferError {
    #[error("unbound variable `{name}`")]
    Unbound { name: String, span: Span },
    #[error("{source}")]
    Kind { source: KindError, span: Span },
    #[error("annotation has kind {kind} but a type of kind * is required")]
    NotAType { kind: Kind, span: Span },
    #[error("{source}")]
    Unify { source: UnifyError, span: Span },
    #[error("`let rec` can only bind a function")]
    RecNotFunction { span: Span },
}

impl InferError {
    pub fn span(&self) -> Span {
        match self {
            InferError::Unbound { span, .. }
            | InferError::Kind { span, .. }
            | InferError::NotAType { span, .. }
            | InferError::Unify { span, .. }
            | InferError::RecNotFunction { span } => *span,
        }
    }
}

/// Lexically scoped map from names to schemes. Later bindings shadow
/// earlier ones.
#[derive(Debug, Clone, Default)]
pub struct TypeEnv {
    entries: Vec<(String, Scheme)>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, name: &str) -> Option<&Scheme> {
        self.entries.iter().rev().find(|(n, _)| n == name).map(|(_, s)| s)
    }

    pub fn bind(&mut self, name: &str, scheme: Scheme) {
        self.entries.push((name.to_string(), scheme));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn truncate(&mut self, len: usize) {
        self.entries.truncate(len);
    }

    /// Visible names, innermost binding only.
    pub fn names(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (n, _) in self.entries.iter().rev() {
            if seen.insert(n.as_str()) {
                out.push(n.as_str());
            }
        }
        out.reverse();
        out
    }

    /// Type variables free in the environment.
    fn free_vars(&self, store: &TypeStore) -> HashSet<NodeId> {
        let mut out = HashSet::new();
        for (_, scheme) in &self.entries {
            for n in store.reachable(scheme.body) {
                if matches!(store.payload(n), Payload::Var) && !scheme.quantified.contains(&n) {
                    out.insert(n);
                }
            }
        }
        out
    }
}

/// Quantifies the variables of `ty` that the environment does not mention.
/// Only syntactic values are generalized. Any `?` left in the body is reset
/// to the canonical one so each use of the binding copies it afresh.
pub fn generalize(store: &mut TypeStore, env: &TypeEnv, ty: NodeId, is_value: bool) -> Scheme {
    let canonical = store.canonical_dyn();
    let copies: HashSet<NodeId> = store
        .reachable(ty)
        .into_iter()
        .filter(|&n| matches!(store.payload(n), Payload::Dyn { canonical: false }))
        .collect();
    let body = store.rebuild(ty, &|r| copies.contains(&r), &mut |_, _| canonical);
    if !is_value {
        return Scheme::mono(body);
    }
    let env_vars = env.free_vars(store);
    let quantified = store
        .reachable(body)
        .into_iter()
        .filter(|&n| matches!(store.payload(n), Payload::Var) && !env_vars.contains(&n))
        .collect();
    Scheme { quantified, body }
}

/// Replaces quantified variables with fresh ones. `?` nodes are kept.
pub fn instantiate(store: &mut TypeStore, scheme: &Scheme) -> NodeId {
    if scheme.quantified.is_empty() {
        return scheme.body;
    }
    let mut fresh: HashMap<NodeId, NodeId> = HashMap::new();
    let quantified = &scheme.quantified;
    store.rebuild(scheme.body, &|r| quantified.contains(&r), &mut |store, r| {
        *fresh.entry(r).or_insert_with(|| store.fresh_var())
    })
}

#[derive(Debug, Clone, Default)]
pub struct InferOptions {
    /// Record every constraint and the unification steps it took.
    pub trace: bool,
}

/// Result of inferring one term.
#[derive(Debug, Clone)]
pub struct InferOutcome {
    pub ty: NodeId,
    /// Type of every subterm, keyed by its span.
    pub types: Vec<(Span, NodeId)>,
    /// Places where a value may cross a `?` boundary.
    pub sites: Vec<Site>,
    pub trace: Vec<String>,
}

impl InferOutcome {
    pub fn resolved_types(&self, store: &TypeStore) -> Vec<(Span, SurfaceType)> {
        let mut r = Resolver::new(store);
        self.types.iter().map(|&(span, n)| (span, r.resolve(n))).collect()
    }

    pub fn obligations(&self, store: &TypeStore) -> Obligations {
        sites::obligations(store, &self.sites)
    }
}

pub fn infer(
    store: &mut TypeStore,
    env: &mut TypeEnv,
    term: &Term,
    options: &InferOptions,
) -> Result<InferOutcome, InferError> {
    let mut cx = Infer {
        store,
        env,
        types: Vec::new(),
        sites: Vec::new(),
        trace: options.trace.then(Vec::new),
    };
    let ty = cx.term(term)?;
    Ok(InferOutcome {
        ty,
        types: cx.types,
        sites: cx.sites,
        trace: cx.trace.unwrap_or_default(),
    })
}

/// Infers a `let`-style binding without a body and generalizes it.
pub fn infer_binding(
    store: &mut TypeStore,
    env: &mut TypeEnv,
    recursive: bool,
    name: &str,
    bound: &Term,
    options: &InferOptions,
) -> Result<(Scheme, InferOutcome), InferError> {
    let mut cx = Infer {
        store,
        env,
        types: Vec::new(),
        sites: Vec::new(),
        trace: options.trace.then(Vec::new),
    };
    let (scheme, ty) = cx.binding(recursive, name, bound)?;
    let outcome = InferOutcome {
        ty,
        types: cx.types,
        sites: cx.sites,
        trace: cx.trace.unwrap_or_default(),
    };
    Ok((scheme, outcome))
}

/// Interns an annotation after checking it has kind `*`.
pub fn annotation_type(store: &mut TypeStore, ty: &SurfaceType, span: Span) -> Result<NodeId, InferError> {
    match kind_check(ty, store.kinds()) {
        Ok(Kind::Star) => Ok(store.intern(ty, &mut AnnotationScope::default())),
        Ok(kind) => Err(InferError::NotAType { kind, span }),
        Err(source) => Err(InferError::Kind { source, span }),
    }
}

const ARITH: &[&str] = &["+", "-", "*", "/"];
const COMPARE: &[&str] = &["==", "<", "<=", ">", ">="];

struct Infer<'a> {
    store: &'a mut TypeStore,
    env: &'a mut TypeEnv,
    types: Vec<(Span, NodeId)>,
    sites: Vec<Site>,
    trace: Option<Vec<String>>,
}

impl Infer<'_> {
    fn unify(&mut self, l: NodeId, r: NodeId, span: Span) -> Result<(), InferError> {
        let result = match &mut self.trace {
            Some(trace) => {
                trace.push(format!(
                    "CONSTRAINT: {} ≃ {}",
                    self.store.summary(l),
                    self.store.summary(r)
                ));
                let (result, lines) = unify::unify_traced(self.store, l, r);
                trace.extend(lines.iter().map(TraceLine::to_string));
                result
            }
            None => unify::unify(self.store, l, r),
        };
        result.map_err(|source| InferError::Unify { source, span })
    }

    fn site(&mut self, kind: SiteKind, span: Span, blame: Span, from: NodeId, to: NodeId) {
        self.sites.push(Site {
            kind,
            span,
            blame,
            from,
            to,
        });
    }

    fn term(&mut self, t: &Term) -> Result<NodeId, InferError> {
        let ty = self.term_inner(t)?;
        self.types.push((t.span, ty));
        Ok(ty)
    }

    fn term_inner(&mut self, t: &Term) -> Result<NodeId, InferError> {
        match &t.kind {
            TermKind::Var(x) => {
                let scheme = self.env.lookup(x).cloned().ok_or_else(|| InferError::Unbound {
                    name: x.clone(),
                    span: t.span,
                })?;
                Ok(instantiate(self.store, &scheme))
            }
            TermKind::Lit(lit) => Ok(self.literal(lit)),
            TermKind::Lambda { param, param_ty, body } => {
                let dom = match param_ty {
                    Some(pt) => annotation_type(self.store, pt, t.span)?,
                    None => self.store.fresh_var(),
                };
                let mark = self.env.len();
                self.env.bind(param, Scheme::mono(dom));
                let cod = self.term(body);
                self.env.truncate(mark);
                let cod = cod?;
                Ok(self.store.arrow(dom, cod))
            }
            TermKind::App(f, a) => {
                if let Some(ty) = self.operator(t, f, a)? {
                    return Ok(ty);
                }
                let tf = self.term(f)?;
                let ta = self.term(a)?;
                self.apply(t, tf, f.span, ta, a.span)
            }
            TermKind::Let { recursive, name, bound, body } => {
                let (scheme, _) = self.binding(*recursive, name, bound)?;
                let mark = self.env.len();
                self.env.bind(name, scheme);
                let ty = self.term(body);
                self.env.truncate(mark);
                ty
            }
            TermKind::Annot(inner, ann) => {
                let ti = self.term(inner)?;
                let ta = annotation_type(self.store, ann, t.span)?;
                self.unify(ti, ta, t.span)?;
                self.site(SiteKind::Annot, t.span, inner.span, ti, ta);
                Ok(ta)
            }
            TermKind::Record(fields) => {
                let mut tys = Vec::with_capacity(fields.len());
                for (label, ft) in fields {
                    tys.push((label.as_str(), self.term(ft)?));
                }
                let eps = self.store.empty_row();
                let row = self.store.row(&tys, eps);
                Ok(self.store.record(row))
            }
            TermKind::Project(inner, label) => {
                let ti = self.term(inner)?;
                let alpha = self.store.fresh_var();
                let rho = self.store.fresh_var();
                let row = self.store.field(label, alpha, rho);
                let expected = self.store.record(row);
                self.unify(ti, expected, t.span)?;
                self.site(SiteKind::Project, t.span, inner.span, ti, expected);
                Ok(alpha)
            }
            TermKind::Variant(label, payload) => {
                let tp = self.term(payload)?;
                let rho = self.store.fresh_var();
                let row = self.store.field(label, tp, rho);
                Ok(self.store.variant(row))
            }
            TermKind::Match(scrutinee, arms) => self.match_expr(t, scrutinee, arms),
        }
    }

    fn literal(&mut self, lit: &Literal) -> NodeId {
        let name = match lit {
            Literal::Int(_) => "Int",
            Literal::Double(_) => "Double",
            Literal::Str(_) => "String",
            Literal::Date(_) => "Date",
            Literal::Currency(_) => "Currency",
        };
        self.store.ctor(name)
    }

    /// `f a` where `f : tf` and `a : ta`.
    fn apply(&mut self, app: &Term, tf: NodeId, f_span: Span, ta: NodeId, a_span: Span) -> Result<NodeId, InferError> {
        let beta = self.store.fresh_var();
        let expected = self.store.arrow(ta, beta);
        self.unify(tf, expected, app.span)?;
        self.site(SiteKind::AppFn, app.span, f_span, tf, expected);
        self.site(SiteKind::AppArg, app.span, a_span, ta, tf);
        Ok(beta)
    }

    /// Built-in infix operators are overloaded; the instance is chosen from
    /// the operand types already known.
    fn operator(&mut self, t: &Term, f: &Term, rhs: &Term) -> Result<Option<NodeId>, InferError> {
        let TermKind::App(op, lhs) = &f.kind else {
            return Ok(None);
        };
        let TermKind::Var(name) = &op.kind else {
            return Ok(None);
        };
        let arith = ARITH.contains(&name.as_str());
        if !arith && !COMPARE.contains(&name.as_str()) {
            return Ok(None);
        }
        let tl = self.term(lhs)?;
        let tr = self.term(rhs)?;
        let instance = self.pick_instance(tl, tr, arith);
        let result = if arith {
            instance
        } else {
            crate::typegraph::bool_type(self.store)
        };
        let rest = self.store.arrow(instance, result);
        let op_ty = self.store.arrow(instance, rest);
        self.types.push((op.span, op_ty));
        let partial = self.apply(f, op_ty, op.span, tl, lhs.span)?;
        self.types.push((f.span, partial));
        self.apply(t, partial, f.span, tr, rhs.span).map(Some)
    }

    /// Double, Obs and the comparable base types win over Int. With no
    /// concrete operand, `?` operands make the instance `?`, and otherwise
    /// it defaults to Int.
    fn pick_instance(&mut self, tl: NodeId, tr: NodeId, arith: bool) -> NodeId {
        let mut saw_dyn = false;
        for side in [tl, tr] {
            match self.store.view(side).clone() {
                Payload::Ctor { name, .. } if name == "Double" => return self.store.ctor("Double"),
                Payload::Ctor { name, .. } if !arith && ["String", "Date", "Currency"].contains(&name.as_str()) => {
                    return self.store.ctor(&name);
                }
                Payload::Ctor { name, .. } if name == "Int" => return self.store.ctor("Int"),
                Payload::App(head, _) if arith => {
                    if matches!(self.store.view(head), Payload::Ctor { name, .. } if name == "Obs") {
                        let obs = self.store.ctor("Obs");
                        let double = self.store.ctor("Double");
                        return self.store.app(obs, double);
                    }
                }
                Payload::Dyn { .. } => saw_dyn = true,
                _ => {}
            }
        }
        if saw_dyn {
            return self.store.canonical_dyn();
        }
        self.store.ctor("Int")
    }

    fn binding(&mut self, recursive: bool, name: &str, bound: &Term) -> Result<(Scheme, NodeId), InferError> {
        let ty = if recursive {
            if !is_function(bound) {
                return Err(InferError::RecNotFunction { span: bound.span });
            }
            let self_ty = self.store.fresh_var();
            let mark = self.env.len();
            self.env.bind(name, Scheme::mono(self_ty));
            let ty = self.term(bound).and_then(|ty| {
                self.unify(self_ty, ty, bound.span)?;
                Ok(ty)
            });
            self.env.truncate(mark);
            ty?
        } else {
            self.term(bound)?
        };
        let scheme = generalize(self.store, self.env, ty, bound.is_value());
        Ok((scheme, ty))
    }

    fn match_expr(&mut self, t: &Term, scrutinee: &Term, arms: &[MatchArm]) -> Result<NodeId, InferError> {
        let ts = self.term(scrutinee)?;
        let has_wildcard = arms.iter().any(|a| a.label.is_none());
        let mut tail = if has_wildcard {
            self.store.fresh_var()
        } else {
            self.store.empty_row()
        };
        let payloads: Vec<Option<NodeId>> = arms
            .iter()
            .map(|a| a.label.as_ref().map(|_| self.store.fresh_var()))
            .collect();
        for (arm, payload) in arms.iter().zip(&payloads).rev() {
            if let (Some(label), Some(p)) = (&arm.label, payload) {
                tail = self.store.field(label, *p, tail);
            }
        }
        let expected = self.store.variant(tail);
        self.unify(ts, expected, t.span)?;
        self.site(SiteKind::Match, t.span, scrutinee.span, ts, expected);

        let result = self.store.fresh_var();
        for (arm, payload) in arms.iter().zip(payloads) {
            let mark = self.env.len();
            if let (Some(binder), Some(p)) = (&arm.binder, payload) {
                self.env.bind(binder, Scheme::mono(p));
            }
            let tb = self.term(&arm.body);
            self.env.truncate(mark);
            let tb = tb?;
            self.unify(result, tb, arm.body.span)?;
            self.site(SiteKind::ArmResult, arm.body.span, arm.body.span, tb, result);
        }
        Ok(result)
    }
}

fn is_function(t: &Term) -> bool {
    match &t.kind {
        TermKind::Lambda { .. } => true,
        TermKind::Annot(inner, _) => is_function(inner),
        _ => false,
    }
}
