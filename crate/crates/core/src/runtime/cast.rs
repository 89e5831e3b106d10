use std::rc::Rc;

use super::value::{Guard, Value};
use super::{Blame, RuntimeError, RuntimeTypeError};
use crate::infer::SiteKind;
use crate::syntax::{pretty_type, SurfaceType};

/// A check that a value of static type `from` may be used at type `to`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cast {
    pub from: SurfaceType,
    pub to: SurfaceType,
    pub blame: Blame,
    pub site: Option<SiteKind>,
}

impl Cast {
    pub fn new(from: SurfaceType, to: SurfaceType, blame: Blame, site: Option<SiteKind>) -> Self {
        Cast { from, to, blame, site }
    }

    pub fn apply(&self, v: Value) -> Result<Value, RuntimeError> {
        cast(v, &self.from, &self.to, &self.blame, self.site)
    }

    /// The same check, blaming a different region.
    pub fn blaming(&self, blame: &Blame) -> Cast {
        Cast {
            blame: blame.clone(),
            ..self.clone()
        }
    }
}

/// Moves `v` from type `from` to type `to`.
///
/// First-order values get a tag check wherever `from` is `?`. Functions are
/// wrapped in a guard. Records and variants are walked so that nested
/// functions are wrapped too.
pub fn cast(
    v: Value,
    from: &SurfaceType,
    to: &SurfaceType,
    blame: &Blame,
    site: Option<SiteKind>,
) -> Result<Value, RuntimeError> {
    if from == to || !(from.has_dyn() || to.has_dyn()) && !matches!(from, SurfaceType::Var(_)) {
        return Ok(v);
    }
    let from = head_normal(from);
    let to = head_normal(to);
    let fail = |v: &Value| -> RuntimeError {
        RuntimeTypeError {
            blame: blame.clone(),
            site,
            expected: pretty_type(&to),
            actual: v.tag(),
        }
        .into()
    };
    match (&from, &to) {
        (_, SurfaceType::Var(_)) => Ok(v),
        (_, SurfaceType::Dyn) => inject(v, &from, blame, site),
        (SurfaceType::Dyn | SurfaceType::Var(_), _) => project(v, &to, blame, site, fail),
        (SurfaceType::Arrow(fd, fc), SurfaceType::Arrow(td, tc)) => {
            if !v.is_function() {
                return Err(fail(&v));
            }
            Ok(guard(v, td, fd, fc, tc, blame, site))
        }
        (SurfaceType::Record(fr), SurfaceType::Record(tr)) => {
            let Value::Record(fields) = &v else {
                return Err(fail(&v));
            };
            let (from_fields, _) = fr.row_parts();
            let (to_fields, _) = tr.row_parts();
            let mut out = Vec::with_capacity(fields.len());
            for (label, fv) in fields.iter() {
                let ft = lookup(&from_fields, label);
                let tt = lookup(&to_fields, label);
                let fv = cast(fv.clone(), &ft, &tt, blame, site)?;
                out.push((label.clone(), fv));
            }
            for (label, _) in &to_fields {
                if !fields.iter().any(|(l, _)| l == label) {
                    return Err(fail(&v));
                }
            }
            Ok(Value::Record(Rc::new(out)))
        }
        (SurfaceType::Variant(fr), SurfaceType::Variant(tr)) => {
            let Value::Variant(label, payload) = &v else {
                return Err(fail(&v));
            };
            let (from_fields, _) = fr.row_parts();
            let (to_fields, to_tail) = tr.row_parts();
            if !to_fields.iter().any(|(l, _)| *l == &**label) && !is_open(to_tail) {
                return Err(fail(&v));
            }
            let ft = lookup(&from_fields, label);
            let tt = lookup(&to_fields, label);
            let payload = cast((**payload).clone(), &ft, &tt, blame, site)?;
            Ok(Value::Variant(label.clone(), Rc::new(payload)))
        }
        // Same constructor, possibly with `?` among its arguments. The only
        // such types are `Obs _`, whose values carry doubles.
        (SurfaceType::Con(a, _), SurfaceType::Con(b, _)) if a == b => {
            if tag_matches(&v, &to) {
                Ok(v)
            } else {
                Err(fail(&v))
            }
        }
        _ => Err(fail(&v)),
    }
}

/// Unrolls `mu` and expands the built-in abbreviations until the head is
/// a concrete type former.
fn head_normal(t: &SurfaceType) -> SurfaceType {
    let mut t = t.unroll();
    loop {
        t = match &t {
            SurfaceType::Con(c, args) => match (c.as_str(), args.as_slice()) {
                ("List", [elem]) => {
                    // `'` cannot appear in a user's type variable.
                    let v = SurfaceType::Var("'l".into());
                    let cell = SurfaceType::record(vec![("head".into(), elem.clone()), ("tail".into(), v)]);
                    let body = SurfaceType::variant(vec![("Nil".into(), SurfaceType::unit()), ("Cons".into(), cell)]);
                    SurfaceType::Mu("'l".into(), Box::new(body)).unroll()
                }
                ("Bool", []) => SurfaceType::variant(vec![
                    ("False".into(), SurfaceType::unit()),
                    ("True".into(), SurfaceType::unit()),
                ]),
                ("Unit", []) => SurfaceType::unit(),
                _ => return t,
            },
            _ => return t,
        };
    }
}

/// A field's or label's type in a row, `?` when the row does not list it.
fn lookup(fields: &[(&str, &SurfaceType)], label: &str) -> SurfaceType {
    fields
        .iter()
        .find(|(l, _)| *l == label)
        .map_or(SurfaceType::Dyn, |(_, t)| (*t).clone())
}

fn is_open(tail: &SurfaceType) -> bool {
    matches!(tail, SurfaceType::Var(_) | SurfaceType::Dyn)
}

/// Builds a guard that takes arguments of `outer_dom`, hands them to `f` at
/// `inner_dom`, and returns results of `inner_cod` at `outer_cod`.
fn guard(
    f: Value,
    outer_dom: &SurfaceType,
    inner_dom: &SurfaceType,
    inner_cod: &SurfaceType,
    outer_cod: &SurfaceType,
    blame: &Blame,
    site: Option<SiteKind>,
) -> Value {
    if outer_dom == inner_dom && inner_cod == outer_cod {
        return f;
    }
    Value::Guard(Rc::new(Guard {
        inner: f,
        dom: Cast::new(outer_dom.clone(), inner_dom.clone(), blame.clone(), site),
        cod: Cast::new(inner_cod.clone(), outer_cod.clone(), blame.clone(), site),
    }))
}

/// `from` to `?`: nothing to check now, but functions inside the value
/// must keep their static domain checked.
fn inject(v: Value, from: &SurfaceType, blame: &Blame, site: Option<SiteKind>) -> Result<Value, RuntimeError> {
    match from {
        SurfaceType::Dyn | SurfaceType::Var(_) => Ok(v),
        SurfaceType::Arrow(..) | SurfaceType::Record(_) | SurfaceType::Variant(_) => {
            let dynamic = dyn_shape(from);
            cast(v, from, &dynamic, blame, site)
        }
        _ => Ok(v),
    }
}

/// `?` to `to`: check the tag, then walk into the value.
fn project(
    v: Value,
    to: &SurfaceType,
    blame: &Blame,
    site: Option<SiteKind>,
    fail: impl Fn(&Value) -> RuntimeError,
) -> Result<Value, RuntimeError> {
    if !tag_matches(&v, to) {
        return Err(fail(&v));
    }
    match to {
        SurfaceType::Arrow(..) | SurfaceType::Record(_) | SurfaceType::Variant(_) => {
            let dynamic = dyn_shape(to);
            cast(v, &dynamic, to, blame, site)
        }
        _ => Ok(v),
    }
}

/// The least precise type with the same outermost shape as `t`.
fn dyn_shape(t: &SurfaceType) -> SurfaceType {
    match t {
        SurfaceType::Arrow(..) => SurfaceType::arrow(SurfaceType::Dyn, SurfaceType::Dyn),
        SurfaceType::Record(row) => {
            let (fields, tail) = row.row_parts();
            let fields = fields.iter().map(|(l, _)| (l.to_string(), SurfaceType::Dyn)).collect();
            SurfaceType::Record(Box::new(SurfaceType::row(fields, tail.clone())))
        }
        SurfaceType::Variant(row) => {
            let (fields, tail) = row.row_parts();
            let fields = fields.iter().map(|(l, _)| (l.to_string(), SurfaceType::Dyn)).collect();
            SurfaceType::Variant(Box::new(SurfaceType::row(fields, tail.clone())))
        }
        other => other.clone(),
    }
}

/// Whether the outermost shape of `v` fits `t`.
pub(crate) fn tag_matches(v: &Value, t: &SurfaceType) -> bool {
    match (v, t) {
        (_, SurfaceType::Dyn | SurfaceType::Var(_)) => true,
        (_, SurfaceType::Mu(..)) => tag_matches(v, &head_normal(t)),
        (_, SurfaceType::Con(c, _)) if ["List", "Bool", "Unit"].contains(&c.as_str()) => {
            tag_matches(v, &head_normal(t))
        }
        (Value::Int(_), SurfaceType::Con(c, _)) => c == "Int",
        (Value::Double(_), SurfaceType::Con(c, _)) => c == "Double",
        (Value::Str(_), SurfaceType::Con(c, _)) => c == "String",
        (Value::Date(_), SurfaceType::Con(c, _)) => c == "Date",
        (Value::Currency(_), SurfaceType::Con(c, _)) => c == "Currency",
        (Value::Obs(_), SurfaceType::Con(c, args)) => {
            c == "Obs" && args.iter().all(|a| matches!(a, SurfaceType::Dyn | SurfaceType::Var(_)) || *a == SurfaceType::con("Double"))
        }
        (Value::Contract(_), SurfaceType::Con(c, _)) => c == "Contract",
        (Value::Closure(_) | Value::Prim(_) | Value::Guard(_), SurfaceType::Arrow(..)) => true,
        (Value::Record(fields), SurfaceType::Record(row)) => {
            let (expected, _) = row.row_parts();
            expected.iter().all(|(l, _)| fields.iter().any(|(f, _)| f == l))
        }
        (Value::Variant(label, _), SurfaceType::Variant(row)) => {
            let (expected, tail) = row.row_parts();
            is_open(tail) || expected.iter().any(|(l, _)| *l == &**label)
        }
        _ => false,
    }
}
