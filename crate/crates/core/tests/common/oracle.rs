//! Reference implementations written independently of the library: a
//! substitution-based Algorithm W with rows, and a structural consistency
//! relation on ground types.

use std::collections::{HashMap, HashSet};

use gradual::syntax::{Literal, MatchArm, SurfaceType, Term, TermKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Ty {
    Var(u32),
    Con(String, Vec<Ty>),
    Arrow(Box<Ty>, Box<Ty>),
    Record(Box<Ty>),
    Variant(Box<Ty>),
    Field(String, Box<Ty>, Box<Ty>),
    Empty,
}

fn arrow(a: Ty, b: Ty) -> Ty {
    Ty::Arrow(Box::new(a), Box::new(b))
}

fn con(n: &str) -> Ty {
    Ty::Con(n.into(), vec![])
}

fn unit() -> Ty {
    Ty::Record(Box::new(Ty::Empty))
}

fn bool_ty() -> Ty {
    let row = Ty::Field(
        "False".into(),
        Box::new(unit()),
        Box::new(Ty::Field("True".into(), Box::new(unit()), Box::new(Ty::Empty))),
    );
    Ty::Variant(Box::new(row))
}

#[derive(Debug, Clone)]
struct Scheme {
    vars: Vec<u32>,
    ty: Ty,
}

#[derive(Debug)]
pub struct Fail(pub String);

#[derive(Default)]
pub struct W {
    subst: HashMap<u32, Ty>,
    next: u32,
}

impl W {
    fn fresh(&mut self) -> Ty {
        self.next += 1;
        Ty::Var(self.next)
    }

    /// Applies the substitution everywhere.
    pub fn zonk(&self, t: &Ty) -> Ty {
        match t {
            Ty::Var(v) => match self.subst.get(v) {
                Some(t) => self.zonk(t),
                None => t.clone(),
            },
            Ty::Con(c, args) => Ty::Con(c.clone(), args.iter().map(|a| self.zonk(a)).collect()),
            Ty::Arrow(a, b) => arrow(self.zonk(a), self.zonk(b)),
            Ty::Record(r) => Ty::Record(Box::new(self.zonk(r))),
            Ty::Variant(r) => Ty::Variant(Box::new(self.zonk(r))),
            Ty::Field(l, t, r) => Ty::Field(l.clone(), Box::new(self.zonk(t)), Box::new(self.zonk(r))),
            Ty::Empty => Ty::Empty,
        }
    }

    fn head(&self, t: &Ty) -> Ty {
        match t {
            Ty::Var(v) => match self.subst.get(v) {
                Some(t) => self.head(t),
                None => t.clone(),
            },
            _ => t.clone(),
        }
    }

    fn ftv(&self, t: &Ty, out: &mut HashSet<u32>) {
        match self.head(t) {
            Ty::Var(v) => {
                out.insert(v);
            }
            Ty::Con(_, args) => args.iter().for_each(|a| self.ftv(a, out)),
            Ty::Arrow(a, b) => {
                self.ftv(&a, out);
                self.ftv(&b, out);
            }
            Ty::Record(r) | Ty::Variant(r) => self.ftv(&r, out),
            Ty::Field(_, t, r) => {
                self.ftv(&t, out);
                self.ftv(&r, out);
            }
            Ty::Empty => {}
        }
    }

    fn bind(&mut self, v: u32, t: Ty) -> Result<(), Fail> {
        let mut fv = HashSet::new();
        self.ftv(&t, &mut fv);
        if fv.contains(&v) {
            return Err(Fail("occurs".into()));
        }
        self.subst.insert(v, t);
        Ok(())
    }

    pub fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), Fail> {
        let a = self.head(a);
        let b = self.head(b);
        match (&a, &b) {
            (Ty::Var(x), Ty::Var(y)) if x == y => Ok(()),
            (Ty::Var(x), _) => self.bind(*x, b.clone()),
            (_, Ty::Var(y)) => self.bind(*y, a.clone()),
            (Ty::Con(c, xs), Ty::Con(d, ys)) if c == d && xs.len() == ys.len() => {
                xs.iter().zip(ys).try_for_each(|(x, y)| self.unify(x, y))
            }
            (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) => {
                self.unify(a1, a2)?;
                self.unify(b1, b2)
            }
            (Ty::Record(r1), Ty::Record(r2)) | (Ty::Variant(r1), Ty::Variant(r2)) => self.unify(r1, r2),
            (Ty::Empty, Ty::Empty) => Ok(()),
            (Ty::Field(l, t1, r1), Ty::Field(..)) => {
                let tail = self.row_tail(r1);
                let (t2, r2) = self.rewrite(&b, l)?;
                if let Some(v) = tail {
                    if self.subst.contains_key(&v) {
                        return Err(Fail("recursive row".into()));
                    }
                }
                self.unify(t1, &t2)?;
                self.unify(r1, &r2)
            }
            _ => Err(Fail(format!("{a:?} vs {b:?}"))),
        }
    }

    fn row_tail(&self, r: &Ty) -> Option<u32> {
        match self.head(r) {
            Ty::Var(v) => Some(v),
            Ty::Field(_, _, rest) => self.row_tail(&rest),
            _ => None,
        }
    }

    /// Brings label `l` to the front of row `r`.
    fn rewrite(&mut self, r: &Ty, l: &str) -> Result<(Ty, Ty), Fail> {
        match self.head(r) {
            Ty::Field(m, t, rest) if m == l => Ok((*t, *rest)),
            Ty::Field(m, t, rest) => {
                let (found, rest) = self.rewrite(&rest, l)?;
                Ok((found, Ty::Field(m, t, Box::new(rest))))
            }
            Ty::Var(v) => {
                let t = self.fresh();
                let rest = self.fresh();
                self.bind(v, Ty::Field(l.into(), Box::new(t.clone()), Box::new(rest.clone())))?;
                Ok((t, rest))
            }
            other => Err(Fail(format!("no field {l} in {other:?}"))),
        }
    }

    fn instantiate(&mut self, s: &Scheme) -> Ty {
        let map: HashMap<u32, Ty> = s.vars.iter().map(|&v| (v, self.fresh())).collect();
        fn go(t: &Ty, map: &HashMap<u32, Ty>) -> Ty {
            match t {
                Ty::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
                Ty::Con(c, args) => Ty::Con(c.clone(), args.iter().map(|a| go(a, map)).collect()),
                Ty::Arrow(a, b) => arrow(go(a, map), go(b, map)),
                Ty::Record(r) => Ty::Record(Box::new(go(r, map))),
                Ty::Variant(r) => Ty::Variant(Box::new(go(r, map))),
                Ty::Field(l, t, r) => Ty::Field(l.clone(), Box::new(go(t, map)), Box::new(go(r, map))),
                Ty::Empty => Ty::Empty,
            }
        }
        let body = self.zonk(&s.ty);
        go(&body, &map)
    }

    fn generalize(&self, env: &[(String, Scheme)], t: &Ty) -> Scheme {
        let mut env_vars = HashSet::new();
        for (_, s) in env {
            let mut fv = HashSet::new();
            self.ftv(&s.ty, &mut fv);
            env_vars.extend(fv.into_iter().filter(|v| !s.vars.contains(v)));
        }
        let mut fv = HashSet::new();
        self.ftv(t, &mut fv);
        Scheme {
            vars: fv.into_iter().filter(|v| !env_vars.contains(v)).collect(),
            ty: self.zonk(t),
        }
    }

    fn annotation(&mut self, t: &SurfaceType, names: &mut HashMap<String, Ty>) -> Ty {
        match t {
            SurfaceType::Var(v) => {
                if let Some(t) = names.get(v) {
                    return t.clone();
                }
                let f = self.fresh();
                names.insert(v.clone(), f.clone());
                f
            }
            SurfaceType::Con(c, args) if c == "Bool" && args.is_empty() => bool_ty(),
            SurfaceType::Con(c, args) if c == "Unit" && args.is_empty() => unit(),
            SurfaceType::Con(c, args) => Ty::Con(c.clone(), args.iter().map(|a| self.annotation(a, names)).collect()),
            SurfaceType::Arrow(a, b) => {
                let a = self.annotation(a, names);
                arrow(a, self.annotation(b, names))
            }
            SurfaceType::Record(r) => Ty::Record(Box::new(self.annotation(r, names))),
            SurfaceType::Variant(r) => Ty::Variant(Box::new(self.annotation(r, names))),
            SurfaceType::RowField { label, ty, tail } => {
                let ty = self.annotation(ty, names);
                Ty::Field(label.clone(), Box::new(ty), Box::new(self.annotation(tail, names)))
            }
            SurfaceType::EmptyRow => Ty::Empty,
            SurfaceType::Dyn | SurfaceType::Mu(..) => panic!("the oracle handles static, non-recursive types only"),
        }
    }

    fn infer(&mut self, env: &mut Vec<(String, Scheme)>, t: &Term) -> Result<Ty, Fail> {
        match &t.kind {
            TermKind::Var(x) => {
                let s = env
                    .iter()
                    .rev()
                    .find(|(n, _)| n == x)
                    .map(|(_, s)| s.clone())
                    .ok_or_else(|| Fail(format!("unbound {x}")))?;
                Ok(self.instantiate(&s))
            }
            TermKind::Lit(l) => Ok(con(match l {
                Literal::Int(_) => "Int",
                Literal::Double(_) => "Double",
                Literal::Str(_) => "String",
                Literal::Date(_) => "Date",
                Literal::Currency(_) => "Currency",
            })),
            TermKind::Lambda { param, param_ty, body } => {
                let dom = match param_ty {
                    Some(pt) => self.annotation(pt, &mut HashMap::new()),
                    None => self.fresh(),
                };
                env.push((param.clone(), Scheme { vars: vec![], ty: dom.clone() }));
                let cod = self.infer(env, body);
                env.pop();
                Ok(arrow(dom, cod?))
            }
            TermKind::App(f, a) => {
                if let Some(r) = self.operator(env, f, a)? {
                    return Ok(r);
                }
                let tf = self.infer(env, f)?;
                let ta = self.infer(env, a)?;
                let beta = self.fresh();
                self.unify(&tf, &arrow(ta, beta.clone()))?;
                Ok(beta)
            }
            TermKind::Let { recursive, name, bound, body } => {
                let ty = if *recursive {
                    let self_ty = self.fresh();
                    env.push((name.clone(), Scheme { vars: vec![], ty: self_ty.clone() }));
                    let ty = self.infer(env, bound);
                    env.pop();
                    let ty = ty?;
                    self.unify(&self_ty, &ty)?;
                    ty
                } else {
                    self.infer(env, bound)?
                };
                let scheme = if bound.is_value() {
                    self.generalize(env, &ty)
                } else {
                    Scheme { vars: vec![], ty }
                };
                env.push((name.clone(), scheme));
                let r = self.infer(env, body);
                env.pop();
                r
            }
            TermKind::Annot(inner, ann) => {
                let ti = self.infer(env, inner)?;
                let ta = self.annotation(ann, &mut HashMap::new());
                self.unify(&ti, &ta)?;
                Ok(ta)
            }
            TermKind::Record(fields) => {
                let mut row = Ty::Empty;
                let mut tys = Vec::new();
                for (l, ft) in fields {
                    tys.push((l.clone(), self.infer(env, ft)?));
                }
                for (l, ty) in tys.into_iter().rev() {
                    row = Ty::Field(l, Box::new(ty), Box::new(row));
                }
                Ok(Ty::Record(Box::new(row)))
            }
            TermKind::Project(inner, l) => {
                let ti = self.infer(env, inner)?;
                let a = self.fresh();
                let r = self.fresh();
                self.unify(&ti, &Ty::Record(Box::new(Ty::Field(l.clone(), Box::new(a.clone()), Box::new(r)))))?;
                Ok(a)
            }
            TermKind::Variant(l, p) => {
                let tp = self.infer(env, p)?;
                let r = self.fresh();
                Ok(Ty::Variant(Box::new(Ty::Field(l.clone(), Box::new(tp), Box::new(r)))))
            }
            TermKind::Match(s, arms) => self.match_expr(env, s, arms),
        }
    }

    fn match_expr(&mut self, env: &mut Vec<(String, Scheme)>, s: &Term, arms: &[MatchArm]) -> Result<Ty, Fail> {
        let ts = self.infer(env, s)?;
        let mut row = if arms.iter().any(|a| a.label.is_none()) {
            self.fresh()
        } else {
            Ty::Empty
        };
        let payloads: Vec<Option<Ty>> = arms.iter().map(|a| a.label.as_ref().map(|_| self.fresh())).collect();
        for (arm, p) in arms.iter().zip(&payloads).rev() {
            if let (Some(l), Some(p)) = (&arm.label, p) {
                row = Ty::Field(l.clone(), Box::new(p.clone()), Box::new(row));
            }
        }
        self.unify(&ts, &Ty::Variant(Box::new(row)))?;
        let result = self.fresh();
        for (arm, p) in arms.iter().zip(payloads) {
            let bound = matches!((&arm.binder, &p), (Some(_), Some(_)));
            if let (Some(b), Some(p)) = (&arm.binder, p) {
                env.push((b.clone(), Scheme { vars: vec![], ty: p }));
            }
            let tb = self.infer(env, &arm.body);
            if bound {
                env.pop();
            }
            self.unify(&result, &tb?)?;
        }
        Ok(result)
    }

    fn operator(&mut self, env: &mut Vec<(String, Scheme)>, f: &Term, rhs: &Term) -> Result<Option<Ty>, Fail> {
        let TermKind::App(op, lhs) = &f.kind else {
            return Ok(None);
        };
        let TermKind::Var(name) = &op.kind else {
            return Ok(None);
        };
        let arith = ["+", "-", "*", "/"].contains(&name.as_str());
        if !arith && !["==", "<", "<=", ">", ">="].contains(&name.as_str()) {
            return Ok(None);
        }
        let tl = self.infer(env, lhs)?;
        let tr = self.infer(env, rhs)?;
        let mut inst = None;
        for side in [&tl, &tr] {
            inst = match self.head(side) {
                Ty::Con(c, _) if c == "Double" => Some(con("Double")),
                Ty::Con(c, _) if !arith && ["String", "Date", "Currency"].contains(&c.as_str()) => Some(con(&c)),
                Ty::Con(c, _) if c == "Int" => Some(con("Int")),
                Ty::Con(c, _) if arith && c == "Obs" => Some(Ty::Con("Obs".into(), vec![con("Double")])),
                _ => None,
            };
            if inst.is_some() {
                break;
            }
        }
        let inst = inst.unwrap_or_else(|| con("Int"));
        self.unify(&tl, &inst)?;
        self.unify(&tr, &inst)?;
        Ok(Some(if arith { inst } else { bool_ty() }))
    }

    /// Converts a solved type back to surface syntax.
    pub fn surface(&self, t: &Ty) -> SurfaceType {
        match self.head(t) {
            Ty::Var(v) => SurfaceType::Var(format!("v{v}")),
            Ty::Con(c, args) => SurfaceType::Con(c, args.iter().map(|a| self.surface(a)).collect()),
            Ty::Arrow(a, b) => SurfaceType::arrow(self.surface(&a), self.surface(&b)),
            Ty::Record(r) => SurfaceType::Record(Box::new(self.surface(&r))),
            Ty::Variant(r) => SurfaceType::Variant(Box::new(self.surface(&r))),
            Ty::Field(l, t, r) => SurfaceType::field(&l, self.surface(&t), self.surface(&r)),
            Ty::Empty => SurfaceType::EmptyRow,
        }
    }
}

/// Infers a closed, `?`-free term. `Err` means the term is ill-typed.
pub fn algorithm_w(t: &Term) -> Result<SurfaceType, Fail> {
    let mut w = W::default();
    let ty = w.infer(&mut Vec::new(), t)?;
    Ok(w.surface(&ty))
}

/// Consistency on ground types: `?` is consistent with everything,
/// everything else must agree structurally.
pub fn consistent(a: &SurfaceType, b: &SurfaceType) -> bool {
    use SurfaceType as S;
    match (a, b) {
        (S::Dyn, _) | (_, S::Dyn) => true,
        (S::Con(c, xs), S::Con(d, ys)) => c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| consistent(x, y)),
        (S::Arrow(a1, b1), S::Arrow(a2, b2)) => consistent(a1, a2) && consistent(b1, b2),
        (S::Record(r1), S::Record(r2)) | (S::Variant(r1), S::Variant(r2)) => {
            let (f1, t1) = r1.row_parts();
            let (f2, t2) = r2.row_parts();
            let mut f1 = f1;
            let mut f2 = f2;
            f1.sort_by_key(|(l, _)| *l);
            f2.sort_by_key(|(l, _)| *l);
            t1 == t2
                && f1.len() == f2.len()
                && f1.iter().zip(&f2).all(|((l1, x), (l2, y))| l1 == l2 && consistent(x, y))
        }
        _ => false,
    }
}

/// Every ground type of depth at most `depth` over `Int`, `String`, `?`,
/// arrows and single-field records.
pub fn ground_types(depth: usize) -> Vec<SurfaceType> {
    let mut all = vec![SurfaceType::con("Int"), SurfaceType::con("String"), SurfaceType::Dyn];
    for _ in 1..depth {
        let prev = all.clone();
        let mut next = vec![SurfaceType::con("Int"), SurfaceType::con("String"), SurfaceType::Dyn];
        for a in &prev {
            for b in &prev {
                next.push(SurfaceType::arrow(a.clone(), b.clone()));
            }
        }
        for label in ["a", "b"] {
            for a in &prev {
                next.push(SurfaceType::record(vec![(label.into(), a.clone())]));
            }
        }
        all = next;
    }
    all
}
