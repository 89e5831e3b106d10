//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

pub mod gen;
pub mod oracle;

use std::collections::HashMap;

use gradual::infer::{infer, InferError, InferOptions, InferOutcome, TypeEnv};
use gradual::syntax::{parse_term, pretty_term, SurfaceType, Term};
use gradual::typegraph::TypeStore;

/// Renames variables in order of first appearance and sorts row fields, so
/// that α-equivalent types compare equal.
pub fn normalize(t: &SurfaceType) -> SurfaceType {
    let sorted = sort_rows(t);
    let mut names = HashMap::new();
    rename(&sorted, &mut names)
}

fn sort_rows(t: &SurfaceType) -> SurfaceType {
    match t {
        SurfaceType::Var(_) | SurfaceType::Dyn | SurfaceType::EmptyRow => t.clone(),
        SurfaceType::Con(c, args) => SurfaceType::Con(c.clone(), args.iter().map(sort_rows).collect()),
        SurfaceType::Arrow(a, b) => SurfaceType::arrow(sort_rows(a), sort_rows(b)),
        SurfaceType::Record(r) => SurfaceType::Record(Box::new(sort_rows(r))),
        SurfaceType::Variant(r) => SurfaceType::Variant(Box::new(sort_rows(r))),
        SurfaceType::Mu(v, b) => SurfaceType::Mu(v.clone(), Box::new(sort_rows(b))),
        SurfaceType::RowField { .. } => {
            let (fields, tail) = t.row_parts();
            let mut fields: Vec<(String, SurfaceType)> =
                fields.into_iter().map(|(l, ft)| (l.to_string(), sort_rows(ft))).collect();
            fields.sort_by(|a, b| a.0.cmp(&b.0));
            SurfaceType::row(fields, sort_rows(tail))
        }
    }
}

fn rename(t: &SurfaceType, names: &mut HashMap<String, String>) -> SurfaceType {
    match t {
        SurfaceType::Var(v) => {
            let n = names.len();
            SurfaceType::Var(names.entry(v.clone()).or_insert_with(|| format!("t{n}")).clone())
        }
        SurfaceType::Dyn | SurfaceType::EmptyRow => t.clone(),
        SurfaceType::Con(c, args) => SurfaceType::Con(c.clone(), args.iter().map(|a| rename(a, names)).collect()),
        SurfaceType::Arrow(a, b) => {
            let a = rename(a, names);
            SurfaceType::arrow(a, rename(b, names))
        }
        SurfaceType::Record(r) => SurfaceType::Record(Box::new(rename(r, names))),
        SurfaceType::Variant(r) => SurfaceType::Variant(Box::new(rename(r, names))),
        SurfaceType::Mu(v, b) => {
            let n = names.len();
            let fresh = format!("t{n}");
            names.insert(v.clone(), fresh.clone());
            SurfaceType::Mu(fresh, Box::new(rename(b, names)))
        }
        SurfaceType::RowField { label, ty, tail } => {
            let ty = rename(ty, names);
            SurfaceType::field(label, ty, rename(tail, names))
        }
    }
}

/// The precision order: `less ⊑ more` when `less` is `more` with some
/// parts replaced by `?`. Type variables of `less` may stand for any type
/// of `more`, consistently.
pub fn less_precise(less: &SurfaceType, more: &SurfaceType) -> bool {
    fn go(l: &SurfaceType, m: &SurfaceType, inst: &mut HashMap<String, SurfaceType>) -> bool {
        match (l, m) {
            (SurfaceType::Dyn, _) => true,
            (SurfaceType::Var(v), _) => match inst.get(v) {
                Some(prev) => prev == m,
                None => {
                    inst.insert(v.clone(), m.clone());
                    true
                }
            },
            (SurfaceType::EmptyRow, SurfaceType::EmptyRow) => true,
            (SurfaceType::Con(a, xs), SurfaceType::Con(b, ys)) => {
                a == b && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, inst))
            }
            (SurfaceType::Arrow(a, b), SurfaceType::Arrow(c, d)) => go(a, c, inst) && go(b, d, inst),
            (SurfaceType::Record(a), SurfaceType::Record(b)) | (SurfaceType::Variant(a), SurfaceType::Variant(b)) => {
                go(a, b, inst)
            }
            (SurfaceType::RowField { .. }, SurfaceType::RowField { .. }) => {
                let (lf, lt) = l.row_parts();
                let (mf, mt) = m.row_parts();
                lf.len() == mf.len()
                    && lf.iter().zip(&mf).all(|((a, x), (b, y))| a == b && go(x, y, inst))
                    && go(lt, mt, inst)
            }
            (SurfaceType::Mu(..), _) | (_, SurfaceType::Mu(..)) => l.unroll() == m.unroll(),
            _ => false,
        }
    }
    go(&normalize(less), &normalize(more), &mut HashMap::new())
}

/// Runs the library's inference on a closed term in a fresh store.
pub fn infer_closed(t: &Term) -> (TypeStore, Result<InferOutcome, InferError>) {
    let mut store = TypeStore::new();
    let mut env = TypeEnv::new();
    let r = infer(&mut store, &mut env, t, &InferOptions::default());
    (store, r)
}

/// Pretty-prints and re-parses, so that spans point into real source.
pub fn reparse(t: &Term) -> Option<(String, Term)> {
    let src = pretty_term(t);
    let parsed = parse_term(&src).ok()?;
    (parsed.without_spans() == t.without_spans()).then_some((src, parsed))
}
