use std::fmt::Write;

use super::ast::{Literal, SurfaceType, Term, TermKind};
use super::OPERATORS;

pub fn pretty_type(t: &SurfaceType) -> String {
    let mut out = String::new();
    ty(&mut out, t, TyCtx::Top);
    out
}

pub fn pretty_term(t: &Term) -> String {
    let mut out = String::new();
    term(&mut out, t, Level::Expr);
    out
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum TyCtx {
    Top,
    /// Left of an arrow or inside a field: no bare rows, arrows or μ.
    ArrowLeft,
    /// Argument of a constructor application.
    Arg,
}

fn ty(out: &mut String, t: &SurfaceType, ctx: TyCtx) {
    match t {
        SurfaceType::Var(v) => out.push_str(v),
        SurfaceType::Dyn => out.push('?'),
        SurfaceType::EmptyRow => out.push_str("eps"),
        SurfaceType::Con(name, args) if args.is_empty() => out.push_str(name),
        SurfaceType::Con(name, args) => {
            paren(out, ctx >= TyCtx::Arg, |out| {
                out.push_str(name);
                for a in args {
                    out.push(' ');
                    ty(out, a, TyCtx::Arg);
                }
            });
        }
        SurfaceType::Arrow(a, b) => paren(out, ctx >= TyCtx::ArrowLeft, |out| {
            ty(out, a, TyCtx::ArrowLeft);
            out.push_str(" -> ");
            ty(out, b, TyCtx::Top);
        }),
        SurfaceType::Record(row) => braced(out, row, '{', '}', false),
        SurfaceType::Variant(row) => braced(out, row, '[', ']', true),
        SurfaceType::RowField { label, ty: fty, tail } => {
            paren(out, ctx > TyCtx::Top, |out| {
                let _ = write!(out, "{label} : ");
                ty(out, fty, TyCtx::ArrowLeft);
                out.push_str("; ");
                ty(out, tail, TyCtx::Top);
            });
        }
        SurfaceType::Mu(v, body) => paren(out, ctx > TyCtx::Top, |out| {
            let _ = write!(out, "mu {v}. ");
            ty(out, body, TyCtx::Top);
        }),
    }
}

fn braced(out: &mut String, row: &SurfaceType, open: char, close: char, variant: bool) {
    let (fields, tail) = row.row_parts();
    out.push(open);
    for (i, (label, fty)) in fields.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        out.push_str(label);
        if !(variant && **fty == SurfaceType::unit()) {
            out.push_str(" : ");
            ty(out, fty, TyCtx::ArrowLeft);
        }
    }
    if *tail != SurfaceType::EmptyRow {
        out.push_str(if fields.is_empty() { "| " } else { " | " });
        ty(out, tail, TyCtx::Top);
    }
    out.push(close);
}

fn paren(out: &mut String, yes: bool, f: impl FnOnce(&mut String)) {
    if yes {
        out.push('(');
    }
    f(out);
    if yes {
        out.push(')');
    }
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Level {
    Expr,
    Cmp,
    Add,
    Mul,
    Pow,
    App,
    Postfix,
}

fn op_level(op: &str) -> (Level, bool) {
    match op {
        "==" | "<" | "<=" | ">" | ">=" => (Level::Cmp, false),
        "+" | "-" => (Level::Add, false),
        "*" | "/" => (Level::Mul, false),
        _ => (Level::Pow, true),
    }
}

fn next(level: Level) -> Level {
    match level {
        Level::Expr => Level::Cmp,
        Level::Cmp => Level::Add,
        Level::Add => Level::Mul,
        Level::Mul => Level::Pow,
        Level::Pow => Level::App,
        Level::App | Level::Postfix => Level::Postfix,
    }
}

/// Recognizes `App(App(Var op, l), r)` for an infix operator.
fn as_binop(t: &Term) -> Option<(&str, &Term, &Term)> {
    if let TermKind::App(f, r) = &t.kind {
        if let TermKind::App(op, l) = &f.kind {
            if let TermKind::Var(name) = &op.kind {
                if OPERATORS.contains(&name.as_str()) {
                    return Some((name, l, r));
                }
            }
        }
    }
    None
}

fn term(out: &mut String, t: &Term, ctx: Level) {
    if let Some((op, l, r)) = as_binop(t) {
        let (level, right_assoc) = op_level(op);
        let (lctx, rctx) = if right_assoc {
            (next(level), level)
        } else if level == Level::Cmp {
            (next(level), next(level))
        } else {
            (level, next(level))
        };
        paren(out, ctx > level, |out| {
            term(out, l, lctx);
            let _ = write!(out, " {op} ");
            term(out, r, rctx);
        });
        return;
    }
    match &t.kind {
        TermKind::Var(x) => out.push_str(x),
        TermKind::Lit(lit) => literal(out, lit),
        TermKind::Lambda {
            param,
            param_ty,
            body,
        } => paren(out, ctx > Level::Expr, |out| {
            out.push_str("fun ");
            match param_ty {
                Some(pt) => {
                    let _ = write!(out, "({param} : ");
                    ty(out, pt, TyCtx::Top);
                    out.push(')');
                }
                None => out.push_str(param),
            }
            out.push_str(" -> ");
            term(out, body, Level::Expr);
        }),
        TermKind::Let {
            recursive,
            name,
            bound,
            body,
        } => paren(out, ctx > Level::Expr, |out| {
            out.push_str(if *recursive { "let rec " } else { "let " });
            let _ = write!(out, "{name} = ");
            term(out, bound, Level::Expr);
            out.push_str(" in ");
            term(out, body, Level::Expr);
        }),
        TermKind::Annot(inner, annot) => paren(out, ctx > Level::Expr, |out| {
            term(out, inner, Level::Cmp);
            out.push_str(" : ");
            ty(out, annot, TyCtx::Top);
        }),
        TermKind::App(f, a) => paren(out, ctx > Level::App, |out| {
            let head_ctx = if matches!(f.kind, TermKind::Variant(..)) {
                Level::Postfix
            } else {
                Level::App
            };
            term(out, f, head_ctx);
            out.push(' ');
            term(out, a, Level::Postfix);
        }),
        TermKind::Variant(label, payload) => {
            let unit = matches!(&payload.kind, TermKind::Record(f) if f.is_empty());
            if unit {
                paren(out, ctx > Level::App, |out| out.push_str(label));
            } else {
                paren(out, ctx > Level::App, |out| {
                    let _ = write!(out, "{label} ");
                    term(out, payload, Level::Postfix);
                });
            }
        }
        TermKind::Project(inner, label) => {
            term(out, inner, Level::Postfix);
            let _ = write!(out, ".{label}");
        }
        TermKind::Record(fields) => {
            out.push('{');
            for (i, (label, ft)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{label} = ");
                term(out, ft, Level::Expr);
            }
            out.push('}');
        }
        TermKind::Match(scrutinee, arms) => paren(out, ctx > Level::Expr, |out| {
            out.push_str("match ");
            term(out, scrutinee, Level::Expr);
            out.push_str(" with");
            for (i, arm) in arms.iter().enumerate() {
                out.push_str(" | ");
                match &arm.label {
                    Some(l) => out.push_str(l),
                    None => out.push('_'),
                }
                if let Some(b) = &arm.binder {
                    let _ = write!(out, " {b}");
                }
                out.push_str(" -> ");
                // Only the last arm may extend to the right.
                let body_ctx = if i + 1 == arms.len() {
                    Level::Expr
                } else {
                    Level::Cmp
                };
                term(out, &arm.body, body_ctx);
            }
        }),
    }
}

fn literal(out: &mut String, lit: &Literal) {
    match lit {
        Literal::Int(n) if *n < 0 => {
            let _ = write!(out, "({n})");
        }
        Literal::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Literal::Double(d) if d.is_sign_negative() => {
            let _ = write!(out, "({d:?})");
        }
        Literal::Double(d) => {
            let _ = write!(out, "{d:?}");
        }
        Literal::Str(s) => {
            out.push('"');
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\t' => out.push_str("\\t"),
                    c => out.push(c),
                }
            }
            out.push('"');
        }
        Literal::Date(d) => {
            let _ = write!(out, "{}", d.format("%Y-%m-%d"));
        }
        Literal::Currency(c) => out.push_str(&c.0),
    }
}
