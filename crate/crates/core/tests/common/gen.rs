//! Seeded random programs and the rewrites applied to them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gradual::syntax::{Literal, MatchArm, Span, SurfaceType, Term, TermKind};

fn mk(kind: TermKind) -> Term {
    Term::new(kind, Span::default())
}

fn var(x: &str) -> Term {
    mk(TermKind::Var(x.into()))
}

fn app(f: Term, a: Term) -> Term {
    mk(TermKind::App(Box::new(f), Box::new(a)))
}

pub fn binop(op: &str, l: Term, r: Term) -> Term {
    app(app(var(op), l), r)
}

pub fn annot(t: Term, ty: SurfaceType) -> Term {
    mk(TermKind::Annot(Box::new(t), ty))
}

const LABELS: [&str; 3] = ["a", "b", "c"];
const TAGS: [&str; 3] = ["A", "B", "C"];

pub struct Gen {
    pub rng: ChaCha8Rng,
    next_var: usize,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_var: 0,
        }
    }

    fn fresh(&mut self) -> String {
        self.next_var += 1;
        format!("x{}", self.next_var)
    }

    pub fn literal(&mut self) -> Literal {
        match self.rng.gen_range(0..3) {
            0 => Literal::Int(self.rng.gen_range(0..10)),
            1 => Literal::Double(f64::from(self.rng.gen_range(0..10)) + 0.5),
            _ => Literal::Str(["s", "t", "u"].choose(&mut self.rng).unwrap().to_string()),
        }
    }

    fn simple_type(&mut self) -> SurfaceType {
        match self.rng.gen_range(0..5) {
            0 => SurfaceType::con("String"),
            1 => SurfaceType::con("Double"),
            2 => SurfaceType::arrow(SurfaceType::con("Int"), SurfaceType::con("Int")),
            _ => SurfaceType::con("Int"),
        }
    }

    /// A closed, `?`-free term of roughly the given depth.
    pub fn term(&mut self, depth: u32) -> Term {
        self.next_var = 0;
        self.go(depth, &mut Vec::new())
    }

    fn leaf(&mut self, scope: &[String]) -> Term {
        if !scope.is_empty() && self.rng.gen_bool(0.6) {
            var(scope.choose(&mut self.rng).unwrap())
        } else {
            mk(TermKind::Lit(self.literal()))
        }
    }

    fn go(&mut self, depth: u32, scope: &mut Vec<String>) -> Term {
        if depth == 0 {
            return self.leaf(scope);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..22) {
            0..=2 => self.leaf(scope),
            3..=5 => {
                let param = self.fresh();
                let param_ty = self.rng.gen_bool(0.25).then(|| self.simple_type());
                scope.push(param.clone());
                let body = self.go(d, scope);
                scope.pop();
                mk(TermKind::Lambda {
                    param,
                    param_ty,
                    body: Box::new(body),
                })
            }
            6..=8 => {
                let f = self.go(d, scope);
                let a = self.go(d, scope);
                app(f, a)
            }
            9..=10 => {
                let name = self.fresh();
                let bound = self.go(d, scope);
                scope.push(name.clone());
                let body = self.go(d, scope);
                scope.pop();
                mk(TermKind::Let {
                    recursive: false,
                    name,
                    bound: Box::new(bound),
                    body: Box::new(body),
                })
            }
            11 => {
                let n = self.rng.gen_range(0..=2);
                let fields = LABELS[..n].iter().map(|l| (l.to_string(), self.go(d, scope))).collect();
                mk(TermKind::Record(fields))
            }
            12 => {
                let r = self.go(d, scope);
                mk(TermKind::Project(Box::new(r), LABELS.choose(&mut self.rng).unwrap().to_string()))
            }
            13 => {
                let p = self.go(d, scope);
                mk(TermKind::Variant(TAGS.choose(&mut self.rng).unwrap().to_string(), Box::new(p)))
            }
            14..=15 => self.matching(d, scope),
            16..=18 => {
                let op = if self.rng.gen_bool(0.7) { "+" } else { "==" };
                let l = self.go(d, scope);
                let r = self.go(d, scope);
                binop(op, l, r)
            }
            19 => {
                let t = self.go(d, scope);
                let ty = self.simple_type();
                annot(t, ty)
            }
            _ => {
                // Applying a fresh lambda keeps many generated terms well typed.
                let param = self.fresh();
                let a = self.go(d, scope);
                scope.push(param.clone());
                let body = self.go(d, scope);
                scope.pop();
                let f = mk(TermKind::Lambda {
                    param,
                    param_ty: None,
                    body: Box::new(body),
                });
                app(f, a)
            }
        }
    }

    fn matching(&mut self, d: u32, scope: &mut Vec<String>) -> Term {
        let scrutinee = if self.rng.gen_bool(0.5) {
            let p = self.go(d, scope);
            mk(TermKind::Variant(TAGS.choose(&mut self.rng).unwrap().to_string(), Box::new(p)))
        } else {
            self.go(d, scope)
        };
        let n = self.rng.gen_range(1..=2);
        let mut arms = Vec::new();
        for label in &TAGS[..n] {
            let binder = self.fresh();
            scope.push(binder.clone());
            let body = self.go(d, scope);
            scope.pop();
            arms.push(MatchArm {
                label: Some(label.to_string()),
                binder: Some(binder),
                body,
                span: Span::default(),
            });
        }
        if self.rng.gen_bool(0.4) {
            arms.push(MatchArm {
                label: None,
                binder: None,
                body: self.go(d, scope),
                span: Span::default(),
            });
        }
        mk(TermKind::Match(Box::new(scrutinee), arms))
    }
}

/// Rebuilds `t` bottom-up, letting `f` replace each rebuilt node.
pub fn map_term(t: &Term, f: &mut impl FnMut(Term) -> Term) -> Term {
    let kind = match &t.kind {
        TermKind::Var(_) | TermKind::Lit(_) => t.kind.clone(),
        TermKind::Lambda { param, param_ty, body } => TermKind::Lambda {
            param: param.clone(),
            param_ty: param_ty.clone(),
            body: Box::new(map_term(body, f)),
        },
        TermKind::App(a, b) => {
            // Operator heads stay bare so the application is still an operator.
            let a = match &a.kind {
                TermKind::App(op, l) if matches!(&op.kind, TermKind::Var(o) if is_operator(o)) => {
                    Term::new(TermKind::App(op.clone(), Box::new(map_term(l, f))), a.span)
                }
                _ => map_term(a, f),
            };
            TermKind::App(Box::new(a), Box::new(map_term(b, f)))
        }
        TermKind::Let { recursive, name, bound, body } => TermKind::Let {
            recursive: *recursive,
            name: name.clone(),
            bound: Box::new(map_term(bound, f)),
            body: Box::new(map_term(body, f)),
        },
        TermKind::Annot(inner, ty) => TermKind::Annot(Box::new(map_term(inner, f)), ty.clone()),
        TermKind::Record(fields) => TermKind::Record(fields.iter().map(|(l, x)| (l.clone(), map_term(x, f))).collect()),
        TermKind::Project(inner, l) => TermKind::Project(Box::new(map_term(inner, f)), l.clone()),
        TermKind::Variant(l, p) => TermKind::Variant(l.clone(), Box::new(map_term(p, f))),
        TermKind::Match(s, arms) => TermKind::Match(
            Box::new(map_term(s, f)),
            arms.iter()
                .map(|arm| MatchArm {
                    body: map_term(&arm.body, f),
                    ..arm.clone()
                })
                .collect(),
        ),
    };
    f(Term::new(kind, t.span))
}

pub fn is_operator(name: &str) -> bool {
    ["+", "-", "*", "/", "==", "<", "<=", ">", ">="].contains(&name)
}

fn type_of(types: &[(Span, SurfaceType)], span: Span) -> Option<&SurfaceType> {
    // The last entry for a span belongs to the outermost term with it.
    types.iter().rev().find(|(s, _)| *s == span).map(|(_, t)| t)
}

/// Annotates every lambda parameter, and each subterm with probability
/// `p`, with its resolved type. `types` must come from checking `t`.
pub fn annotate_fully(t: &Term, types: &[(Span, SurfaceType)], p: f64, rng: &mut ChaCha8Rng) -> Term {
    map_term(t, &mut |node| {
        let ty = type_of(types, node.span).cloned();
        let node = match (node.kind, &ty) {
            (TermKind::Lambda { param, param_ty: None, body }, Some(SurfaceType::Arrow(dom, _))) => Term::new(
                TermKind::Lambda {
                    param,
                    param_ty: Some((**dom).clone()),
                    body,
                },
                node.span,
            ),
            (kind, _) => Term::new(kind, node.span),
        };
        match ty {
            Some(ty) if rng.gen_bool(p) && !matches!(node.kind, TermKind::Annot(..)) => {
                Term::new(TermKind::Annot(Box::new(node), ty), Span::default())
            }
            _ => node,
        }
    })
}

/// Every type annotation in `t`, in pre-order.
pub fn annotations(t: &Term) -> Vec<SurfaceType> {
    let mut out = Vec::new();
    t.walk(&mut |n| match &n.kind {
        TermKind::Lambda { param_ty: Some(ty), .. } | TermKind::Annot(_, ty) => out.push(ty.clone()),
        _ => {}
    });
    out
}

/// Number of positions of kind `*` in `ty`: the type itself and every
/// type nested in it, excluding rows and row tails.
pub fn star_positions(ty: &SurfaceType) -> usize {
    match ty {
        SurfaceType::Var(_) | SurfaceType::Dyn => 1,
        SurfaceType::Con(_, args) => 1 + args.iter().map(star_positions).sum::<usize>(),
        SurfaceType::Arrow(a, b) => 1 + star_positions(a) + star_positions(b),
        SurfaceType::Record(r) | SurfaceType::Variant(r) => 1 + row_positions(r),
        SurfaceType::Mu(_, b) => 1 + star_positions(b),
        SurfaceType::RowField { .. } | SurfaceType::EmptyRow => 0,
    }
}

fn row_positions(r: &SurfaceType) -> usize {
    r.row_parts().0.iter().map(|(_, t)| star_positions(t)).sum()
}

/// Replaces the `n`th kind-`*` position of `ty` (pre-order) with `?`.
pub fn dyn_at(ty: &SurfaceType, n: &mut usize) -> SurfaceType {
    if *n == 0 {
        *n = usize::MAX;
        return SurfaceType::Dyn;
    }
    if *n == usize::MAX {
        return ty.clone();
    }
    *n -= 1;
    match ty {
        SurfaceType::Var(_) | SurfaceType::Dyn | SurfaceType::EmptyRow => ty.clone(),
        SurfaceType::Con(c, args) => SurfaceType::Con(c.clone(), args.iter().map(|a| dyn_at(a, n)).collect()),
        SurfaceType::Arrow(a, b) => {
            let a = dyn_at(a, n);
            SurfaceType::arrow(a, dyn_at(b, n))
        }
        SurfaceType::Record(r) => SurfaceType::Record(Box::new(dyn_in_row(r, n))),
        SurfaceType::Variant(r) => SurfaceType::Variant(Box::new(dyn_in_row(r, n))),
        SurfaceType::Mu(v, b) => SurfaceType::Mu(v.clone(), Box::new(dyn_at(b, n))),
        SurfaceType::RowField { .. } => dyn_in_row(ty, n),
    }
}

fn dyn_in_row(r: &SurfaceType, n: &mut usize) -> SurfaceType {
    match r {
        SurfaceType::RowField { label, ty, tail } => {
            let ty = dyn_at(ty, n);
            SurfaceType::field(label, ty, dyn_in_row(tail, n))
        }
        _ => r.clone(),
    }
}

/// Replaces position `pos` of the `which`th annotation of `t` with `?`.
pub fn loosen_annotation(t: &Term, which: usize, pos: usize) -> Term {
    let mut seen = 0;
    let mut hit = |ty: &SurfaceType| {
        let this = seen;
        seen += 1;
        if this == which {
            dyn_at(ty, &mut pos.clone())
        } else {
            ty.clone()
        }
    };
    // Pre-order numbering: rebuild top-down so it matches `annotations`.
    fn down(t: &Term, hit: &mut impl FnMut(&SurfaceType) -> SurfaceType) -> Term {
        let kind = match &t.kind {
            TermKind::Var(_) | TermKind::Lit(_) => t.kind.clone(),
            TermKind::Lambda { param, param_ty, body } => {
                let param_ty = param_ty.as_ref().map(&mut *hit);
                TermKind::Lambda {
                    param: param.clone(),
                    param_ty,
                    body: Box::new(down(body, hit)),
                }
            }
            TermKind::App(a, b) => {
                let a = down(a, hit);
                TermKind::App(Box::new(a), Box::new(down(b, hit)))
            }
            TermKind::Let { recursive, name, bound, body } => {
                let bound = down(bound, hit);
                TermKind::Let {
                    recursive: *recursive,
                    name: name.clone(),
                    bound: Box::new(bound),
                    body: Box::new(down(body, hit)),
                }
            }
            TermKind::Annot(inner, ty) => {
                let ty = hit(ty);
                TermKind::Annot(Box::new(down(inner, hit)), ty)
            }
            TermKind::Record(fields) => TermKind::Record(fields.iter().map(|(l, x)| (l.clone(), down(x, hit))).collect()),
            TermKind::Project(inner, l) => TermKind::Project(Box::new(down(inner, hit)), l.clone()),
            TermKind::Variant(l, p) => TermKind::Variant(l.clone(), Box::new(down(p, hit))),
            TermKind::Match(s, arms) => {
                let s = down(s, hit);
                TermKind::Match(
                    Box::new(s),
                    arms.iter()
                        .map(|arm| MatchArm {
                            body: down(&arm.body, hit),
                            ..arm.clone()
                        })
                        .collect(),
                )
            }
        };
        Term::new(kind, t.span)
    }
    down(t, &mut hit)
}

/// Sprinkles `?` into a well-typed program: subterms are cast to `?` with
/// probability `p`, and literals are swapped for a literal of another type
/// hidden behind `?` with probability `q`.
pub fn dynamize(t: &Term, p: f64, q: f64, rng: &mut ChaCha8Rng) -> Term {
    map_term(t, &mut |node| {
        if let TermKind::Lit(lit) = &node.kind {
            if rng.gen_bool(q) {
                let other = match lit {
                    Literal::Int(_) => Literal::Str("oops".into()),
                    Literal::Str(_) => Literal::Double(2.5),
                    _ => Literal::Int(7),
                };
                return annot(mk(TermKind::Lit(other)), SurfaceType::Dyn);
            }
        }
        if rng.gen_bool(p) {
            annot(node, SurfaceType::Dyn)
        } else {
            node
        }
    })
}

pub fn has_dyn_annotation(t: &Term) -> bool {
    annotations(t).iter().any(SurfaceType::has_dyn)
}

/// Types the type-directed generator aims for.
#[derive(Debug, Clone, PartialEq)]
pub enum GTy {
    Int,
    Double,
    Str,
    Fun(Box<GTy>, Box<GTy>),
    /// A record with fields `a` and `b`.
    Rec(Box<GTy>, Box<GTy>),
    /// A closed variant `[A : _; B : _]`.
    Sum(Box<GTy>, Box<GTy>),
}

impl GTy {
    pub fn surface(&self) -> SurfaceType {
        match self {
            GTy::Int => SurfaceType::con("Int"),
            GTy::Double => SurfaceType::con("Double"),
            GTy::Str => SurfaceType::con("String"),
            GTy::Fun(a, b) => SurfaceType::arrow(a.surface(), b.surface()),
            GTy::Rec(a, b) => SurfaceType::record(vec![("a".into(), a.surface()), ("b".into(), b.surface())]),
            GTy::Sum(a, b) => SurfaceType::variant(vec![("A".into(), a.surface()), ("B".into(), b.surface())]),
        }
    }
}

impl Gen {
    pub fn gty(&mut self, depth: u32) -> GTy {
        let base = |g: &mut Gen| match g.rng.gen_range(0..3) {
            0 => GTy::Int,
            1 => GTy::Double,
            _ => GTy::Str,
        };
        if depth == 0 || self.rng.gen_bool(0.6) {
            return base(self);
        }
        let a = Box::new(self.gty(depth - 1));
        let b = Box::new(self.gty(depth - 1));
        match self.rng.gen_range(0..3) {
            0 => GTy::Fun(a, b),
            1 => GTy::Rec(a, b),
            _ => GTy::Sum(a, b),
        }
    }

    /// A closed, `?`-free term of type `ty`.
    pub fn typed(&mut self, ty: &GTy, depth: u32) -> Term {
        self.next_var = 0;
        self.typed_in(ty, depth, &mut Vec::new())
    }

    fn typed_leaf(&mut self, ty: &GTy, scope: &mut Vec<(String, GTy)>) -> Term {
        let candidates: Vec<&String> = scope.iter().filter(|(_, t)| t == ty).map(|(x, _)| x).collect();
        if !candidates.is_empty() && self.rng.gen_bool(0.7) {
            return var(candidates.choose(&mut self.rng).unwrap());
        }
        match ty {
            GTy::Int => mk(TermKind::Lit(Literal::Int(self.rng.gen_range(0..10)))),
            GTy::Double => mk(TermKind::Lit(Literal::Double(f64::from(self.rng.gen_range(0..10)) + 0.5))),
            GTy::Str => mk(TermKind::Lit(Literal::Str("s".into()))),
            _ => self.typed_shape(ty, 0, scope),
        }
    }

    /// The introduction form for `ty`.
    fn typed_shape(&mut self, ty: &GTy, d: u32, scope: &mut Vec<(String, GTy)>) -> Term {
        match ty {
            GTy::Fun(a, b) => {
                let param = self.fresh();
                let param_ty = self.rng.gen_bool(0.2).then(|| a.surface());
                scope.push((param.clone(), (**a).clone()));
                let body = self.typed_in(b, d, scope);
                scope.pop();
                mk(TermKind::Lambda {
                    param,
                    param_ty,
                    body: Box::new(body),
                })
            }
            GTy::Rec(a, b) => {
                let a = self.typed_in(a, d, scope);
                let b = self.typed_in(b, d, scope);
                mk(TermKind::Record(vec![("a".into(), a), ("b".into(), b)]))
            }
            GTy::Sum(a, b) => {
                let (label, payload) = if self.rng.gen_bool(0.5) { ("A", a) } else { ("B", b) };
                let p = self.typed_in(payload, d, scope);
                mk(TermKind::Variant(label.into(), Box::new(p)))
            }
            _ => self.typed_leaf(ty, scope),
        }
    }

    /// Operator instances are chosen from operand types known at that point
    /// and default to Int, so non-Int left operands carry an annotation.
    fn operand(&mut self, ty: &GTy, d: u32, scope: &mut Vec<(String, GTy)>) -> Term {
        let t = self.typed_in(ty, d, scope);
        if *ty == GTy::Int {
            t
        } else {
            annot(t, ty.surface())
        }
    }

    fn typed_in(&mut self, ty: &GTy, depth: u32, scope: &mut Vec<(String, GTy)>) -> Term {
        if depth == 0 {
            return self.typed_leaf(ty, scope);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..12) {
            0 => self.typed_leaf(ty, scope),
            1..=2 => self.typed_shape(ty, d, scope),
            3..=4 => {
                let a = self.gty(1);
                let f = self.typed_in(&GTy::Fun(Box::new(a.clone()), Box::new(ty.clone())), d, scope);
                let arg = self.typed_in(&a, d, scope);
                app(f, arg)
            }
            5 => {
                let a = self.gty(1);
                let name = self.fresh();
                let bound = self.typed_in(&a, d, scope);
                scope.push((name.clone(), a));
                let body = self.typed_in(ty, d, scope);
                scope.pop();
                mk(TermKind::Let {
                    recursive: false,
                    name,
                    bound: Box::new(bound),
                    body: Box::new(body),
                })
            }
            6 => {
                let other = self.gty(0);
                let (rec, label) = if self.rng.gen_bool(0.5) {
                    (GTy::Rec(Box::new(ty.clone()), Box::new(other)), "a")
                } else {
                    (GTy::Rec(Box::new(other), Box::new(ty.clone())), "b")
                };
                let r = self.typed_in(&rec, d, scope);
                mk(TermKind::Project(Box::new(r), label.into()))
            }
            7 => {
                let (a, b) = (self.gty(0), self.gty(0));
                let s = self.typed_in(&GTy::Sum(Box::new(a.clone()), Box::new(b.clone())), d, scope);
                let mut arms = Vec::new();
                for (label, payload) in [("A", a), ("B", b)] {
                    let binder = self.fresh();
                    scope.push((binder.clone(), payload));
                    let body = self.typed_in(ty, d, scope);
                    scope.pop();
                    arms.push(MatchArm {
                        label: Some(label.into()),
                        binder: Some(binder),
                        body,
                        span: Span::default(),
                    });
                }
                mk(TermKind::Match(Box::new(s), arms))
            }
            8 => {
                // A comparison scrutinized as a boolean.
                let operand = if self.rng.gen_bool(0.5) { GTy::Int } else { GTy::Str };
                let l = self.operand(&operand, d, scope);
                let r = self.typed_in(&operand, d, scope);
                let arms = ["True", "False"]
                    .into_iter()
                    .map(|label| MatchArm {
                        label: Some(label.into()),
                        binder: None,
                        body: self.typed_in(ty, d, scope),
                        span: Span::default(),
                    })
                    .collect();
                mk(TermKind::Match(Box::new(binop("==", l, r)), arms))
            }
            9 if matches!(ty, GTy::Int | GTy::Double) => {
                let l = self.operand(ty, d, scope);
                let r = self.typed_in(ty, d, scope);
                binop("+", l, r)
            }
            10 => {
                let t = self.typed_in(ty, d, scope);
                annot(t, ty.surface())
            }
            _ => self.typed_shape(ty, d, scope),
        }
    }
}
